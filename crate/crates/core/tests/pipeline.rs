//! End-to-end pipeline over the library API alone: records -> filter ->
//! graphs -> factors -> ground truth -> calibration -> walker.

use std::collections::HashMap;

use techrank_core::calibration::{calibrate, normalize_minmax, GridSpec};
use techrank_core::factors::{
    compose_ground_truth, investment_factor_companies, investment_factor_technologies,
    location_factor, GeoPoint, PreferenceProfile, LOCATION, PREVIOUS_INVESTMENTS,
};
use techrank_core::graph::Layer;
use techrank_core::ingestion::{
    build_graphs, filter_sector, FundingRoundRecord, OrganizationRecord, SectorFilter,
};
use techrank_core::walker::{self, WalkerParams};

fn org(
    id: &str,
    name: &str,
    description: &str,
    categories: &[&str],
    lat: f64,
    lon: f64,
) -> OrganizationRecord {
    OrganizationRecord {
        id: id.into(),
        name: name.into(),
        description: description.into(),
        categories: categories.iter().map(|c| c.to_string()).collect(),
        latitude: Some(lat),
        longitude: Some(lon),
        country: None,
    }
}

fn round(id: &str, investor: &str, company: &str, amount: f64) -> FundingRoundRecord {
    FundingRoundRecord {
        round_id: id.into(),
        investor_id: investor.into(),
        company_id: company.into(),
        amount,
        announced_on: None,
    }
}

#[test]
fn records_to_ranked_scores() {
    let orgs = vec![
        org(
            "a",
            "Alpha",
            "secure storage with privacy controls",
            &["Storage", "Encryption"],
            40.7,
            -74.0,
        ),
        org(
            "b",
            "Bravo",
            "security and integrity tooling",
            &["Encryption", "Monitoring"],
            37.8,
            -122.4,
        ),
        org(
            "c",
            "Charlie",
            "safe and reliable... security stack",
            &["Monitoring", "Networking"],
            51.5,
            -0.1,
        ),
        org(
            "d",
            "Delta",
            "privacy with confidentiality audits",
            &["Networking", "Storage"],
            48.9,
            2.4,
        ),
        org(
            "e",
            "Echo",
            "a grocery marketplace",
            &["Marketplace"],
            41.4,
            2.2,
        ),
        org(
            "f",
            "Foxtrot",
            "secure availability platform",
            &["Monitoring", "Encryption", "Storage"],
            52.5,
            13.4,
        ),
    ];
    let rounds = vec![
        round("r1", "inv1", "a", 10.0),
        round("r2", "inv1", "b", 6.0),
        round("r3", "inv2", "b", 2.0),
        round("r4", "inv2", "d", 4.0),
        round("r5", "inv3", "f", 12.0),
        round("r6", "inv3", "e", 99.0),
        round("r7", "inv3", "ghost", 1.0),
    ];

    let filter = SectorFilter::new(
        [
            "secure",
            "security",
            "privacy",
            "integrity",
            "safe",
            "confidentiality",
            "availability",
            "reliable",
        ],
        2,
    )
    .unwrap();
    let kept = filter_sector(orgs, &filter);
    assert_eq!(kept.len(), 5, "the marketplace org is filtered out");

    let built = build_graphs(&kept, &rounds).unwrap();
    assert_eq!(built.bipartite.n_companies(), 5);
    assert_eq!(
        built.dropped_rounds, 2,
        "round to 'e' and to 'ghost' both drop"
    );

    let investments = investment_factor_companies(&built.investments).unwrap();
    let tech_investments =
        investment_factor_technologies(&built.investments, &built.bipartite).unwrap();
    assert_eq!(investments.values.len(), 5);
    assert_eq!(
        tech_investments.values.len(),
        built.bipartite.n_technologies()
    );

    let locations: HashMap<String, GeoPoint> = kept
        .iter()
        .filter_map(|o| {
            let point = GeoPoint::new(o.latitude?, o.longitude?).ok()?;
            Some((o.name.to_lowercase(), point))
        })
        .collect();
    let investor = GeoPoint::new(40.7128, -74.006).unwrap();
    let proximity = location_factor(built.bipartite.companies(), &locations, investor).unwrap();
    assert!(proximity.missing.is_empty());

    let profile = PreferenceProfile::new(
        vec![(PREVIOUS_INVESTMENTS.into(), 0.8), (LOCATION.into(), 0.2)],
        Layer::Companies,
    )
    .unwrap();
    let truth = compose_ground_truth(&profile, &[investments, proximity.feature]).unwrap();

    let grid = GridSpec::new(-0.8, 0.8, -0.8, 0.8, 0.2).unwrap();
    let result = calibrate(
        &built.bipartite,
        &truth,
        Layer::Companies,
        &grid,
        &WalkerParams::default(),
    )
    .unwrap();
    assert!(
        result.rho_star > 0.0,
        "some grid point correlates positively"
    );

    let state = walker::run(
        &built.bipartite,
        &WalkerParams::new(result.alpha_star, result.beta_star),
    )
    .unwrap();
    assert!(state.converged);
    let scores = normalize_minmax(&state.company_weights);
    assert_eq!(scores.len(), 5);
    assert!(scores.iter().all(|s| (0.0..=1.0).contains(s)));
}

//! Command implementations sharing one ingestion pipeline.

pub mod bench;
pub mod compare;
pub mod ingest;
pub mod rank;

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use techrank_core::factors::GeoPoint;
use techrank_core::graph::{BipartiteGraph, EntityRegistry, InvestmentGraph};
use techrank_core::ingestion::{
    build_graphs, filter_sector, load_funding_rounds, load_locations, load_organizations,
    SectorFilter,
};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::IngestCounts;

/// Everything the downstream phases need from the data files.
pub struct IngestedData {
    pub bipartite: BipartiteGraph,
    pub investments: InvestmentGraph,
    /// Coordinates keyed by normalized company name.
    pub locations: HashMap<String, GeoPoint>,
    pub counts: IngestCounts,
}

/// Loads, filters, optionally samples, and builds the graphs.
///
/// Subset sampling shuffles the eligible distinct company names once with the
/// seeded generator and keeps a prefix, so smaller subsets nest inside larger
/// ones under the same seed.
pub fn ingest_pipeline(config: &RunConfig, subset: Option<usize>) -> CliResult<IngestedData> {
    let filter = SectorFilter::from_file(&config.keywords, config.min_matches)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let orgs_load = load_organizations(&config.organizations, &config.csv_options)?;
    let organizations_total = orgs_load.records.len() + orgs_load.skipped;
    let rounds_load = load_funding_rounds(&config.funding_rounds, &config.csv_options)?;
    let funding_rows_total = rounds_load.records.len() + rounds_load.skipped;

    let kept = filter_sector(orgs_load.records, &filter);
    let kept_after_filter = kept.len();

    // Companies eligible for the graph: distinct normalized names with at
    // least one category across their records.
    let mut eligible_names: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    for org in &kept {
        if org.categories.is_empty() {
            continue;
        }
        let name = EntityRegistry::normalize(&org.name);
        if seen.insert(name.clone()) {
            eligible_names.push(name);
        }
    }
    let eligible = eligible_names.len();

    let selected = match subset {
        Some(n) => {
            if n > eligible {
                return Err(CliError::Data(format!(
                    "subset of {n} companies requested but only {eligible} are eligible"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            eligible_names.shuffle(&mut rng);
            eligible_names.truncate(n);
            let wanted: HashSet<&String> = eligible_names.iter().collect();
            kept.iter()
                .filter(|org| wanted.contains(&EntityRegistry::normalize(&org.name)))
                .cloned()
                .collect()
        }
        None => kept,
    };

    let built = build_graphs(&selected, &rounds_load.records).map_err(CliError::from)?;

    // Coordinates from the organization records themselves (first record of a
    // name wins), then overridden by the lookup file when present.
    let mut locations: HashMap<String, GeoPoint> = HashMap::new();
    let mut by_org_id: HashMap<&str, String> = HashMap::new();
    for org in &selected {
        let name = EntityRegistry::normalize(&org.name);
        by_org_id.insert(org.id.as_str(), name.clone());
        if let (Some(lat), Some(lon)) = (org.latitude, org.longitude) {
            if let Ok(point) = GeoPoint::new(lat, lon) {
                locations.entry(name).or_insert(point);
            }
        }
    }
    if let Some(path) = &config.locations {
        let lookup = load_locations(path, &config.csv_options)?;
        for (entity_id, point) in lookup.records {
            let name = by_org_id
                .get(entity_id.as_str())
                .cloned()
                .unwrap_or_else(|| EntityRegistry::normalize(&entity_id));
            if built.bipartite.companies().index_of(&name).is_some() {
                locations.insert(name, point);
            }
        }
    }

    let counts = IngestCounts {
        organizations_total,
        organizations_skipped: orgs_load.skipped,
        organizations_kept_after_filter: kept_after_filter,
        organizations_without_categories: built.orgs_without_categories,
        eligible_companies: eligible,
        funding_rows_total,
        funding_rows_skipped: rounds_load.skipped,
        dropped_rounds: built.dropped_rounds,
        n_companies: built.bipartite.n_companies(),
        n_technologies: built.bipartite.n_technologies(),
        n_investors: built.investments.n_investors(),
        n_edges: built.bipartite.edge_count(),
    };

    Ok(IngestedData {
        bipartite: built.bipartite,
        investments: built.investments,
        locations,
        counts,
    })
}

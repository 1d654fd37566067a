//! Exogenous ground-truth features: previous-investment totals propagated to
//! companies and technologies, geographic proximity to an investor, and their
//! signed weighted composition.

use std::collections::HashMap;

use crate::calibration::normalize_minmax;
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, EntityRegistry, InvestmentGraph, Layer};

pub const PREVIOUS_INVESTMENTS: &str = "previous_investments";
pub const LOCATION: &str = "location";

/// Mean Earth radius used by the haversine distance, in kilometers.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Named per-entity feature with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub name: String,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        for &v in &values {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::FeatureOutOfRange { name, value: v });
            }
        }
        Ok(Self { name, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Investor interest weights over named features.
///
/// Weights may be negative to mark repelling features; magnitudes sum to one
/// so the unit interest budget is preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceProfile {
    entries: Vec<(String, f64)>,
    target: Layer,
}

impl PreferenceProfile {
    pub fn new(entries: Vec<(String, f64)>, target: Layer) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProfile("no features".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut budget = 0.0;
        for (name, weight) in &entries {
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidProfile(format!("duplicate feature '{name}'")));
            }
            if !weight.is_finite() {
                return Err(Error::InvalidProfile(format!(
                    "weight for '{name}' is not finite"
                )));
            }
            budget += weight.abs();
        }
        if (budget - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProfile(format!(
                "absolute weights must sum to 1, got {budget}"
            )));
        }
        Ok(Self { entries, target })
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn target(&self) -> Layer {
        self.target
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }
}

/// Latitude/longitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    latitude: f64,
    longitude: f64,
}

impl GeoPoint {
    pub fn new(latitude: f64, longitude: f64) -> Result<Self> {
        let ok = latitude.is_finite()
            && longitude.is_finite()
            && (-90.0..=90.0).contains(&latitude)
            && longitude > -180.0
            && longitude <= 180.0;
        if !ok {
            return Err(Error::InvalidCoordinate {
                latitude,
                longitude,
            });
        }
        Ok(Self {
            latitude,
            longitude,
        })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }
}

fn hav(x: f64) -> f64 {
    (x / 2.0).sin().powi(2)
}

/// Great-circle distance in kilometers on a sphere of radius
/// [`EARTH_RADIUS_KM`].
pub fn haversine(a: GeoPoint, b: GeoPoint) -> f64 {
    let phi1 = a.latitude.to_radians();
    let phi2 = b.latitude.to_radians();
    let lam1 = a.longitude.to_radians();
    let lam2 = b.longitude.to_radians();
    let h = hav(phi2 - phi1) + phi1.cos() * phi2.cos() * hav(lam2 - lam1);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Previous-investment factor per company: total received funding divided by
/// the maximum total. Companies without rounds score zero; at least one
/// positive total is required.
pub fn investment_factor_companies(ig: &InvestmentGraph) -> Result<FeatureVector> {
    let totals = ig.company_totals();
    let max = totals.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateFactor(
            "no positive investment amount among companies".into(),
        ));
    }
    FeatureVector::new(
        PREVIOUS_INVESTMENTS,
        totals.iter().map(|&e| e / max).collect(),
    )
}

/// Previous-investment factor per technology: company totals pushed through
/// the company-technology adjacency, divided by the maximum.
pub fn investment_factor_technologies(
    ig: &InvestmentGraph,
    g: &BipartiteGraph,
) -> Result<FeatureVector> {
    if ig.companies().names() != g.companies().names() {
        return Err(Error::RegistryMismatch(
            "investment and bipartite graphs index different companies".into(),
        ));
    }
    let company_totals = ig.company_totals();
    let mut tech_totals = vec![0.0; g.n_technologies()];
    for (t, total) in tech_totals.iter_mut().enumerate() {
        *total = g.companies_of(t).iter().map(|&c| company_totals[c]).sum();
    }
    let max = tech_totals.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateFactor(
            "no positive investment amount among technologies".into(),
        ));
    }
    FeatureVector::new(
        PREVIOUS_INVESTMENTS,
        tech_totals.iter().map(|&e| e / max).collect(),
    )
}

/// Location factor plus the companies that had to be skipped.
#[derive(Debug, Clone)]
pub struct LocationFactor {
    pub feature: FeatureVector,
    /// Registry names with no known coordinates; they receive factor zero.
    pub missing: Vec<String>,
}

/// Proximity factor per company: `1 - h / h_max` with `h` the haversine
/// distance to the investor. A collocated company scores one, the farthest
/// scores zero. Companies without coordinates score zero and are reported.
/// Requires at least two located companies not all collocated with the
/// investor.
pub fn location_factor(
    companies: &EntityRegistry,
    locations: &HashMap<String, GeoPoint>,
    investor: GeoPoint,
) -> Result<LocationFactor> {
    let mut distances: Vec<Option<f64>> = Vec::with_capacity(companies.len());
    let mut missing = Vec::new();
    for name in companies.names() {
        match locations.get(name) {
            Some(&point) => distances.push(Some(haversine(investor, point))),
            None => {
                missing.push(name.clone());
                distances.push(None);
            }
        }
    }
    let located = distances.iter().flatten().count();
    if located < 2 {
        return Err(Error::DegenerateFactor(format!(
            "need at least two located companies, found {located}"
        )));
    }
    let h_max = distances.iter().flatten().copied().fold(0.0, f64::max);
    if h_max <= 0.0 {
        return Err(Error::DegenerateFactor(
            "all located companies are collocated with the investor".into(),
        ));
    }
    let values = distances
        .iter()
        .map(|d| match d {
            Some(h) => (1.0 - h / h_max).clamp(0.0, 1.0),
            None => 0.0,
        })
        .collect();
    Ok(LocationFactor {
        feature: FeatureVector::new(LOCATION, values)?,
        missing,
    })
}

/// Composes features into the exogenous evaluation: the signed weighted sum
/// per entity, min-max normalized onto [0, 1].
///
/// Profile entries and features must match by name one-to-one, and all
/// features must cover the same layer length.
pub fn compose_ground_truth(
    profile: &PreferenceProfile,
    features: &[FeatureVector],
) -> Result<Vec<f64>> {
    if profile.entries().len() != features.len() {
        return Err(Error::FeatureMismatch(format!(
            "profile has {} entries but {} features were supplied",
            profile.entries().len(),
            features.len()
        )));
    }
    let by_name: HashMap<&str, &FeatureVector> =
        features.iter().map(|f| (f.name.as_str(), f)).collect();
    if by_name.len() != features.len() {
        return Err(Error::FeatureMismatch("duplicate feature names".into()));
    }
    let len = features
        .first()
        .map(FeatureVector::len)
        .ok_or_else(|| Error::FeatureMismatch("no features".into()))?;
    for f in features {
        if f.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: f.len(),
            });
        }
    }
    let mut combined = vec![0.0; len];
    for (name, weight) in profile.entries() {
        let feature = by_name
            .get(name.as_str())
            .ok_or_else(|| Error::FeatureMismatch(format!("no feature named '{name}'")))?;
        for (acc, &v) in combined.iter_mut().zip(&feature.values) {
            *acc += weight * v;
        }
    }
    Ok(normalize_minmax(&combined))
}

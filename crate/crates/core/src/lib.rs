//! Scoring of companies and technologies over a bipartite graph.
//!
//! A recursive walker spreads weight between the two node classes through
//! degree-parameterized transition matrices; the exponents are calibrated by
//! grid search against an exogenous, investor-preference-weighted ground
//! truth built from funding totals and geographic proximity. Raw data comes
//! in as CSV exports of organizations and funding rounds.

pub mod calibration;
pub mod error;
pub mod factors;
pub mod graph;
pub mod ingestion;
pub mod synth;
pub mod walker;

pub use calibration::{calibrate, normalize_minmax, spearman, CalibrationResult, GridSpec};
pub use error::{Error, Result};
pub use factors::{FeatureVector, GeoPoint, LocationFactor, PreferenceProfile};
pub use graph::{BipartiteGraph, EntityRegistry, InvestmentGraph, Layer};
pub use walker::{Trajectory, TransitionMatrices, WalkerParams, WalkerState};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by graph construction, the walker, calibration, factor
/// building, and data ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot build a graph from an empty pair list")]
    EmptyPairList,

    #[error("{kind} '{name}' has no edges")]
    IsolatedEntity { kind: &'static str, name: String },

    #[error("edge references unknown company '{0}'")]
    UnknownCompany(String),

    #[error("invalid amount {amount} on edge {investor} -> {company}")]
    InvalidAmount {
        investor: String,
        company: String,
        amount: f64,
    },

    #[error("transition weights are not finite at alpha={alpha}, beta={beta}")]
    ParameterRange { alpha: f64, beta: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid walker parameters: {0}")]
    InvalidParams(String),

    #[error("vector lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("degenerate factor: {0}")]
    DegenerateFactor(String),

    #[error("registry mismatch: {0}")]
    RegistryMismatch(String),

    #[error("invalid preference profile: {0}")]
    InvalidProfile(String),

    #[error("feature mismatch: {0}")]
    FeatureMismatch(String),

    #[error("coordinates out of range: lat={latitude}, lon={longitude}")]
    InvalidCoordinate { latitude: f64, longitude: f64 },

    #[error("feature '{name}' has value {value} outside [0, 1]")]
    FeatureOutOfRange { name: String, value: f64 },

    #[error("malformed header in {path}: {reason}")]
    MalformedHeader { path: String, reason: String },

    #[error("empty pipeline: {0}")]
    EmptyPipeline(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

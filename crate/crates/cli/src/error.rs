use techrank_core::Error as CoreError;

/// CLI failures classified by exit code: configuration problems exit 1, data
/// problems exit 2, strict-mode non-convergence exits 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::NonConvergence(msg) => write!(f, "non-convergence: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidGrid(_)
            | CoreError::InvalidParams(_)
            | CoreError::InvalidProfile(_)
            | CoreError::InvalidCoordinate { .. } => CliError::Config(err.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid bath: {0}")]
    InvalidBath(String),

    #[error("quadrature unraveling requires a bath of symmetric mode pairs")]
    NotSymmetric,

    #[error("sample kind does not match requested noise kind: {0}")]
    SampleMismatch(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("expectation history has {have} entries, need {need}")]
    HistoryTooShort { have: usize, need: usize },

    #[error("invalid system model: {0}")]
    InvalidModel(String),

    #[error("state norm {0:e} too small to take expectations")]
    ZeroNorm(f64),

    #[error("ansatz diverged at t = {t}: |F| = {magnitude:e} exceeds bound {bound:e}")]
    AnsatzDivergence { t: f64, magnitude: f64, bound: f64 },

    #[error("trajectory {index} failed: {source}")]
    Trajectory {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{failed} of {total} trajectories failed; first: {first}")]
    Ensemble {
        failed: usize,
        total: u64,
        first: Box<Error>,
    },

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("comparison failed: max deviation {max_deviation:e} exceeds tolerance {tolerance:e}")]
    ComparisonFailed { max_deviation: f64, tolerance: f64 },

    #[error("malformed csv at line {line}: {message}")]
    Csv { line: usize, message: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag, used by the CLI and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidBath(_) => "invalid_bath",
            Error::NotSymmetric => "not_symmetric",
            Error::SampleMismatch(_) => "sample_mismatch",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::HistoryTooShort { .. } => "history_too_short",
            Error::InvalidModel(_) => "invalid_model",
            Error::ZeroNorm(_) => "zero_norm",
            Error::AnsatzDivergence { .. } => "ansatz_divergence",
            Error::Trajectory { .. } => "trajectory",
            Error::Ensemble { .. } => "ensemble",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::ComparisonFailed { .. } => "comparison_failed",
            Error::Csv { .. } => "csv",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

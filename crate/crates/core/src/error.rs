use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} samples")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parameter outside the open unit disc: |a| = {modulus}")]
    Domain { modulus: f64 },

    #[error("signal nearly vanishes on the boundary at sample {index} (|f| = {modulus:e})")]
    NearZeroBoundary { index: usize, modulus: f64 },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("candidate is linearly dependent on the current basis (defect {defect:e})")]
    LinearDependence { defect: f64 },

    #[error("every dictionary candidate is dependent on the selected system")]
    DictionaryExhausted,

    #[error("kernel tuple is ill-conditioned (smallest defect {defect:e})")]
    IllConditionedTuple { defect: f64 },

    #[error("invalid signal spec: {0}")]
    Spec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::Domain { .. } => "domain",
            Error::NearZeroBoundary { .. } => "near_zero_boundary",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::LinearDependence { .. } => "linear_dependence",
            Error::DictionaryExhausted => "dictionary_exhausted",
            Error::IllConditionedTuple { .. } => "ill_conditioned_tuple",
            Error::Spec(_) => "spec",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("confidence {value} at record {index} is outside [0, 1]")]
    ConfidenceOutOfRange { index: usize, value: f64 },

    #[error("credit {value} at record {index} is outside [0, 1]")]
    CreditOutOfRange { index: usize, value: f64 },

    #[error("label {label} at record {index} is not below the class count {class_count}")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        class_count: usize,
    },

    #[error("evaluation set is empty")]
    EmptySet,

    #[error("class count must be positive")]
    ZeroClasses,

    #[error("threshold {0} is outside [0, 1)")]
    InvalidThreshold(f64),

    #[error("confidence {confidence} is below the threshold {tau}; filter before weighting")]
    BelowThreshold { confidence: f64, tau: f64 },

    #[error("record {index} is retained but carries no credit value")]
    MissingCredit { index: usize },

    #[error("bin count must be at least 1")]
    InvalidBinning,

    #[error("invalid threshold grid: {0}")]
    InvalidGrid(String),

    #[error("curve has {usable} usable points; at least 2 are required")]
    InsufficientData { usable: usize },

    #[error("reports do not share a threshold grid: {0}")]
    IncompatibleReports(String),

    #[error("nothing to rank")]
    NoReports,

    #[error("invalid archetype spec: {0}")]
    InvalidSpec(String),

    #[error("unknown archetype {0:?} (expected calibrated, overconfident, underconfident, perfect or random)")]
    UnknownArchetype(String),

    #[error("unknown metric {0:?} (expected cwsa, cwsa_plus or selective_accuracy)")]
    UnknownMetric(String),

    #[error("{path}: line {line}: {reason}")]
    Row {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{path}: {reason}")]
    Input { path: PathBuf, reason: String },

    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

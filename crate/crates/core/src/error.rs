use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaxError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid value {value} at ({row}, {col}): entries must be finite and nonnegative")]
    InvalidEntry { row: usize, col: usize, value: f64 },

    /// An oracle probe returned a negative value or exceeded its declared norm bound.
    /// Indices are 1-based.
    #[error("oracle `{oracle}` violated its contract at ({row}, {col}): value {value}, bound {bound}")]
    OracleViolation {
        oracle: String,
        row: usize,
        col: usize,
        value: f64,
        bound: f64,
    },

    #[error("unknown gallery entry `{0}`")]
    UnknownGallery(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("power series unbounded: norm {norm} exceeded cap {cap} at depth {depth}")]
    PowerUnbounded { norm: f64, cap: f64, depth: usize },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for MaxError {
    fn from(e: serde_json::Error) -> Self {
        MaxError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MaxError>;

use thiserror::Error;

/// Errors surfaced by every module in the crate.
#[derive(Debug, Error)]
pub enum FinrError {
    /// A precondition on an argument was violated (shape, range, emptiness).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two objects that must agree in shape do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    /// A computation produced or received a NaN/Inf it cannot recover from.
    #[error("numeric abort: {0}")]
    NumericAbort(String),

    /// A cached tape no longer matches the parameters it was recorded with.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A file did not conform to its declared format.
    #[error("format error: {0}")]
    Format(String),

    /// A configuration file failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// An enumeration or allocation exceeded its configured cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The operation is only defined on a different input domain.
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FinrError>;

impl FinrError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        FinrError::InvalidInput(msg.into())
    }

    pub fn dim(expected: impl Into<String>, got: impl Into<String>) -> Self {
        FinrError::DimensionMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }
}

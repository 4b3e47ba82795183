use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("net too large: cover of the unit sphere in dimension {dim} needs {points} points, cap is {cap}")]
    NetTooLarge { dim: usize, points: u128, cap: u64 },

    #[error("enumeration cap exceeded: {tuples} net tuples, cap is {cap}; use smaller dimensions or a larger epsilon")]
    EnumerationCapExceeded { tuples: u128, cap: u64 },

    #[error("tensor format: {0}")]
    TensorFormat(String),

    #[error("config: {0}")]
    Config(String),

    #[error("no records to report")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {index} lies outside the bounding box")]
    PointOutsideBox { index: usize },

    #[error("datasets are not replacement neighbors: {0}")]
    NotNeighbors(String),

    #[error("requested {requested} empty bins but only {available} exist")]
    NotEnoughEmptyBins { requested: u128, available: u128 },

    #[error("{0}")]
    Infeasible(String),

    #[error("csv parse error at row {row}: {message}")]
    CsvParse { row: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

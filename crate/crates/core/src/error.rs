use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("tuning failed: {0}")]
    TuningFailed(String),

    #[error("intercept calibration failed: {0}")]
    Calibration(String),

    #[error("ingest spec error: {0}")]
    Spec(String),

    #[error("ingest error: {0}")]
    Ingest(String),

    #[error("persisted state does not match this run: {0}")]
    ResumeMismatch(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

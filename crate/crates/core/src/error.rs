use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory must contain at least one point")]
    Empty,
    #[error("timestamps must be strictly increasing (row {index}: {prev} then {next})")]
    NonMonotonicTime { index: usize, prev: f64, next: f64 },
    #[error("non-finite coordinate at row {index}")]
    NonFinite { index: usize },
    #[error("gap out of range: {0}")]
    OutOfRange(String),
    #[error("fill timestamps do not match the missing times: {0}")]
    TimeMismatch(String),
    #[error("value overflows f64: {0}")]
    Overflow(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("every midpoint lies on its chord; the likelihood has no interior maximum")]
    Degenerate,
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

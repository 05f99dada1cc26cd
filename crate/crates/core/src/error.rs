use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid fitness value {0}")]
    InvalidFitness(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("evaluation budget of {limit} exhausted")]
    BudgetExhausted { limit: usize },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("model has not been fitted")]
    Unfitted,

    #[error("operation requires a {expected} model")]
    WrongMode { expected: &'static str },

    #[error("Cholesky factorisation failed even with jitter {jitter:e}")]
    Cholesky { jitter: f64 },

    #[error("evaluation {index} timed out")]
    Timeout { index: usize },

    #[error("black-box protocol error at evaluation {index}: {message}")]
    Protocol { index: usize, message: String },

    #[error("need at least {needed} non-zero paired differences, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("report error: {0}")]
    Report(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

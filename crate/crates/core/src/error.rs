use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source_id}: invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { source_id: String, offset: usize },

    /// An estimator or operation needs more tokens than it was given.
    #[error("{what} requires at least {required} tokens, got {actual}")]
    TooShort {
        what: &'static str,
        required: usize,
        actual: usize,
    },

    #[error("requested {requested} items but only {available} are available")]
    OutOfRange { requested: usize, available: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Inputs with no spread (zero variance, identical x values, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sequence too short: need at least {needed} symbols, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("pair ({0}, {1}) does not occur in the sequence")]
    NoOccurrence(u32, u32),

    #[error("symbol {0} is already registered in the alphabet")]
    SymbolExists(u32),

    #[error("no pair available for selection")]
    EmptyTable,

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("scale {scale} with ratio {ratio} cannot be stored: {reason}")]
    InvalidPoint {
        scale: usize,
        ratio: f64,
        reason: &'static str,
    },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

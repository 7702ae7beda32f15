use std::path::PathBuf;

use thiserror::Error;

use crate::expr::DomainError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in `{input}` at {position}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },

    #[error("evaluation failed: {0}")]
    Domain(#[from] DomainError),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("unknown builtin problem `{0}`")]
    UnknownBuiltin(String),

    #[error("problem `{0}` has no oracle map")]
    NoOracle(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported report schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl std::error::Error for DomainError {}

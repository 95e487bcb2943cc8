use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by dataset construction, solving, and the benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical invariant violated: {0}")]
    NumericalInvariant(String),

    #[error("parse error in {path} at row {row}, column {col}: {message}")]
    CsvParse {
        path: PathBuf,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

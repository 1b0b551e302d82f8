use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: u64, column: usize, message: String },

    #[error("unmapped label '{label}' at line {line}")]
    Label { line: u64, label: String },

    #[error("non-finite feature at line {line}, column {column}")]
    NonFinite { line: u64, column: usize },

    #[error("network error: {0}")]
    Network(String),

    #[error("checksum mismatch for {path}: recorded {expected}, found {found}")]
    ChecksumMismatch { path: PathBuf, expected: String, found: String },

    #[error("dataset does not have the expected layout: {0}")]
    DatasetShape(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Core(#[from] rpens_core::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

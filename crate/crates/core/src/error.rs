use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid warp: {0}")]
    InvalidWarp(String),
    #[error("invalid truncation constant: K = {k} is below the finite height {height}")]
    InvalidK { k: f64, height: f64 },
    #[error("invalid merge tree: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("edit error: {0}")]
    Edit(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("ingestion error at line {line} (id {id}): {message}")]
    Ingestion {
        id: String,
        line: u64,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

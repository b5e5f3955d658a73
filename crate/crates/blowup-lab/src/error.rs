use blowup_core::{CoreError, ParseError};
use thiserror::Error;

/// Errors of the lab layer; every variant is an input error (exit status 2).
#[derive(Debug, Error)]
pub enum LabError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("line {line}: {source}")]
    Replay { line: usize, source: CoreError },
    #[error("family config line {line}: {message}")]
    Config { line: usize, message: String },
}

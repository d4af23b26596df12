//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (bad index, level outside (0,1), ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A text input could not be parsed. Line and column are 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A matrix was singular, indefinite, or otherwise outside the domain of
    /// the requested operation.
    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),

    /// An iterative routine failed to converge. This signals a bug or an
    /// ill-posed input, not an expected runtime condition.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

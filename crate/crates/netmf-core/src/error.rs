//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input data (edge lists, label files, embedding files).
    #[error("format error: {0}")]
    Format(String),

    /// Input violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// An iterative method failed to reach its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// A size cap was exceeded; the message names the cheaper alternative.
    #[error("capacity error: {0}")]
    Capacity(String),
}

impl Error {
    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was called with arguments outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A distribution could not be built from the requested parameters.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A numerical routine failed to reach its accuracy target.
    #[error("numerical failure in {routine}: {message}")]
    Numerical { routine: &'static str, message: String },

    /// A matrix factorization failed even after jitter escalation.
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// An operation needs more data than the caller supplied.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }

    pub fn numerical(routine: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerical { routine, message: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

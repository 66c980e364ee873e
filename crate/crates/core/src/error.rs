//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error enum.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition (bad shape, out-of-range
    /// argument, non-finite entry, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numeric routine failed (singular system, eigensolver stall, ...).
    /// The message carries diagnostics such as the offending pivot.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An on-disk artifact (manifest, CSV, labels file) is malformed.
    #[error("format error: {0}")]
    Format(String),

    /// A structural constraint could not be satisfied (e.g. a mask that
    /// would drop an instance from every view).
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn constraint(msg: impl Into<String>) -> Self {
        Error::Constraint(msg.into())
    }
}

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid base {0}: need q >= 2")]
    InvalidBase(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("resource guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("property violated: {0}")]
    PropertyViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::GuardExceeded(msg.into())
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}

use thiserror::Error;

/// Errors raised at the library boundary.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The arguments violate an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A search would exceed the enforced size budget.
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    /// Malformed textual graph encoding.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn budget<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Budget(msg.into()))
}

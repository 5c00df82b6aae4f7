use thiserror::Error;

/// Errors raised by the library. The CLI maps bad parameters and parse
/// failures to status 1, [`Error::ResourceGuard`] to 3 and the rest to 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("generator exhausted: needed {needed} elements, only {available} available")]
    Exhausted { needed: u64, available: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

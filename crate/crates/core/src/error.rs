use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource budget exceeded: {what} (reached {count})")]
    Resource { what: String, count: usize },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("numeric failure: {msg} (residual {residual:e})")]
    Numeric { msg: String, residual: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

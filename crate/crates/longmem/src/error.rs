use thiserror::Error;

/// Crate-wide error type.
///
/// `Domain` covers invalid arguments (parameter out of range, malformed
/// model), `Numerical` covers internal failures of a numerical routine
/// (non-positive-definite embedding, quadrature self-check, zero variance),
/// `Estimation` covers estimators that cannot produce a value on the given
/// input, `Config` covers invalid experiment configurations, and `Io`/`Parse`
/// cover file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("estimation error: {0}")]
    Estimation(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn estimation(msg: impl Into<String>) -> Self {
        Error::Estimation(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

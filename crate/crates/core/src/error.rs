use thiserror::Error;

/// Errors surfaced by lattice construction, combinatorial conversions and
/// the numeric backends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    Invalid(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("enumeration cap of {cap} matchings exceeded")]
    CapExceeded { cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-physical covariance matrix: {0}")]
    NonPhysicalCovariance(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("Fock cutoff {cutoff} too small: truncation deficit {deficit:.3e} exceeds {limit:.1e}")]
    CutoffTooSmall {
        cutoff: usize,
        deficit: f64,
        limit: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}

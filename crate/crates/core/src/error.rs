use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("source does not majorize target")]
    NotMajorized,
    #[error("source does not submajorize target")]
    NotSubmajorized,
    #[error("no doubly stochastic map exists: {0}")]
    NotExtendable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("refinement to a common mass grid needs {needed} atoms (cap {cap})")]
    GridTooFine { needed: usize, cap: usize },
    #[error("state is not LOCC-convertible to the target")]
    NotConvertible,
    #[error("permutation extraction left residual mass {0:e}")]
    BirkhoffResidual(f64),
    #[error("malformed protocol: {0}")]
    MalformedProtocol(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}

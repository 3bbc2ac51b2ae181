use thiserror::Error;

use crate::tail::Regime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A theorem-specific precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The regime has no closed-form coefficient to evaluate.
    #[error("regime {0} carries no coefficient")]
    UnsupportedRegime(Regime),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

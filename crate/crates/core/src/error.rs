use crate::enclosure::Enclosure;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A precondition on the mathematical domain of an operation failed.
    #[error("domain error: {0}")]
    Domain(String),
    /// The arguments are mathematically valid but outside the supported range.
    #[error("range error: {0}")]
    Range(String),
    /// The result does not fit in an `f64`.
    #[error("overflow: {0}")]
    Overflow(String),
    /// An integrand or objective produced a non-finite value.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// Adaptive refinement stopped before the requested tolerance was reached.
    #[error("tolerance not met: {message} (best effort {best_effort})")]
    Convergence {
        message: String,
        best_effort: Enclosure,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

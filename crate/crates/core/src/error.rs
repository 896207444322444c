use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    /// The adaptive integrator ran out of subdivisions. Carries the best
    /// estimate so callers can still report a partial value.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    NonConvergence { estimate: f64, error: f64 },
    #[error("insufficient trials: {0}")]
    InsufficientTrials(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

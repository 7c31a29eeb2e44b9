use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument sits on a pole of a gamma-type factor.
    #[error("pole at {0}")]
    Pole(String),

    /// Argument outside the validated domain of the routine.
    #[error("argument outside domain: {0}")]
    Domain(String),

    /// A series or quadrature failed to reach its tolerance.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// An allocation could not be satisfied.
    #[error("capacity exhausted: {0}")]
    Capacity(String),

    /// An index or parameter pair lies outside the admissible range.
    #[error("out of range: {0}")]
    Range(String),

    /// Too few usable data points for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

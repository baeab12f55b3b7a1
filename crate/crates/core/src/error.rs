use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The protocol parameters violate a feasibility condition of the bound.
    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    /// Power-series division by a series with a zero constant term.
    #[error("series singularity: {0}")]
    Singular(String),

    /// No sign change was found while bracketing a root.
    #[error("no sign change found while bracketing {0}")]
    Bracket(String),

    /// Too few samples for a stable estimate.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        // Written as a negation so that NaN inputs fail the check.
        let holds: bool = $cond;
        if !holds {
            return Err($crate::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;

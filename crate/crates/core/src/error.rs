use thiserror::Error;

/// Errors produced by the evaluators, integrators and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(
        "quadrature did not converge after {subdivisions} bisection levels \
         (partial value {value:e}, error estimate {error_estimate:e})"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: u32,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("denominator {0:e} below overflow guard")]
    OverflowGuard(f64),

    #[error("inconsistent function spec: {0}")]
    InconsistentSpec(String),

    #[error("insufficient data: {got} usable scales, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    #[error("degenerate Lipschitz window around x = {x}: width {width:e}")]
    DegenerateWindow { x: f64, width: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

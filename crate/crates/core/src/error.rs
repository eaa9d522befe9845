use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpdError {
    #[error("Levy measure is not integrable against 1 ∧ x²: {0}")]
    NonIntegrable(String),
    #[error("process has bounded variation (sigma = 0 and the small-jump first moment is finite)")]
    BoundedVariation,
    #[error("quadrature failed to reach tolerance: {0}")]
    QuadratureFailure(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("divergent moment: {0}")]
    DivergentMoment(String),
    #[error("argument outside the range of the generalized inverse: {0}")]
    RangeError(String),
    #[error("root not bracketed: {0}")]
    NoBracket(String),
    #[error("ladder exponent evaluated at its pole lambda = theta0 = {0}")]
    PoleAtTheta0(f64),
    #[error("no saddle point: {0}")]
    OutOfRange(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("inversion produced a negative density {value:e} (tolerance {tol:e})")]
    NegativeDensity { value: f64, tol: f64 },
    #[error("time {t} outside the admissible range (0, {t_max})")]
    OutOfTimeRange { t: f64, t_max: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("invalid grid: {0}")]
    GridError(String),
    #[error("invalid parameter `{path}`: {reason}")]
    InvalidParameter { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, SpdError>;

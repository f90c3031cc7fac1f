use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("point {re}+{im}i lies outside the domain")]
    OutOfDomain { re: f64, im: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("polynomial is not odd: coefficient of z^{index} is {magnitude:e}")]
    NotOdd { index: usize, magnitude: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("numerical range is a single point")]
    DegenerateRange,

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite integrand value at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("quadrature did not converge: last two levels differ by {diff:e} (tolerance {tol:e})")]
    QuadratureNonConvergence { diff: f64, tol: f64 },

    #[error("shooting did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence {
        residual: f64,
        iterations: usize,
        trace: Vec<ShotRecord>,
    },

    #[error("trajectory lost positivity at r = {r}: v = {v:e}")]
    PositivityLoss {
        r: f64,
        v: f64,
        trace: Vec<ShotRecord>,
    },

    #[error("integrator step size underflow at r = {r}")]
    StepSizeUnderflow { r: f64 },

    #[error("i/o: {0}")]
    Io(String),
}

/// One evaluated shot of the boundary-value map.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ShotRecord {
    pub v0: f64,
    pub w0: f64,
    pub residual: f64,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::spectra::SolverTrace;

#[derive(Debug, Error)]
pub enum BiquadError {
    #[error("dimension mismatch on {axis}: expected {expected}, found {found}")]
    DimensionMismatch {
        axis: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid dimensions m={m}, n={n}: both must be at least 2")]
    InvalidDimensions { m: usize, n: usize },

    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),

    #[error("{0} vector is zero")]
    ZeroVector(&'static str),

    #[error("{axis} vector is not unit length (norm {norm})")]
    NotUnit { axis: &'static str, norm: f64 },

    #[error("index pair ({i}, {j}) out of range for m={m}, n={n}")]
    IndexOutOfRange { i: usize, j: usize, m: usize, n: usize },

    #[error("scale factor {value} at position {index} of {axis} is not positive")]
    NonPositiveScale {
        axis: &'static str,
        index: usize,
        value: f64,
    },

    #[error("degenerate Cayley step: denominator {0:e}")]
    DegenerateStep(f64),

    #[error("search direction is not a descent direction (p.g = {0:e})")]
    NotDescent(f64),

    #[error("line search step underflow (alpha < {0:e})")]
    StepUnderflow(f64),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("no start converged; best lambda {best_lambda}")]
    NoConvergence {
        best_lambda: f64,
        trace: Box<SolverTrace>,
    },

    #[error("oracle limited to m, n <= {limit}; got m={m}, n={n}")]
    OracleTooLarge { m: usize, n: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BiquadError>;

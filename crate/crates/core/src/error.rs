use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector norm {norm:e} is below the zero threshold")]
    ZeroVector { norm: f64 },

    #[error("matrix is not orthogonal (deviation {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("degree {degree} out of range for dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    #[error("weight |x|^-{alpha} is not integrable at the origin of R^{dim}")]
    WeightNotIntegrable { alpha: f64, dim: usize },

    #[error("quadrature did not reach target: estimate {estimate:e} > {target:e} after {nodes} nodes")]
    QuadratureBudgetExceeded {
        estimate: f64,
        target: f64,
        nodes: u64,
    },

    #[error("global quadrature budget of {limit} node evaluations exhausted")]
    NodeBudgetExhausted { limit: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parameter s = {s} outside the strip 0 < s < {upper}")]
    OutOfStrip { s: f64, upper: f64 },

    #[error("transverse exponent (n-1)u = {exponent} must exceed 1")]
    ExponentTooSmall { exponent: f64 },

    #[error("descent chain bottom reached at m = {m} for degree {i}")]
    ChainBottom { m: usize, i: usize },

    #[error("unsupported generator: {0}")]
    UnsupportedGenerator(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input failed validation.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The requested box does not fit in the configured site budget.
    #[error("lattice box with dimension {dim} and radius {radius} exceeds the site budget of {budget}")]
    Capacity { dim: usize, radius: usize, budget: usize },

    /// Two objects built for different boxes (or tables too small for a box) were combined.
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    /// A quadrature failed its N versus 2N self-refinement check.
    #[error("{what} did not converge under refinement: N={n} gives {coarse:e}, N={refined_n} gives {fine:e} (change {delta:e} > tolerance {tolerance:e})")]
    Tolerance {
        what: String,
        n: usize,
        refined_n: usize,
        coarse: f64,
        fine: f64,
        delta: f64,
        tolerance: f64,
    },

    /// An internal consistency check (imaginary residue, positivity, method agreement) failed.
    #[error("numerical consistency: {0}")]
    Consistency(String),

    /// A table contained a value it must not contain.
    #[error("data error: {0}")]
    Data(String),

    #[error("ray through the field has no positive part, so it never meets the Nehari manifold")]
    NoProjection,

    #[error("{0} exceeded the growth limit 2^60")]
    Divergence(String),

    #[error("mountain-pass geometry: {0}")]
    Geometry(String),

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

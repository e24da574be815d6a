use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the configured maximum {max}")]
    Size { dim: usize, max: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("operator is not {expected}: residual {residual:.3e}")]
    Tag { expected: &'static str, residual: f64 },

    #[error("site {site} out of range for {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigendecomposition did not converge (residual {residual:.3e})")]
    Convergence { residual: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

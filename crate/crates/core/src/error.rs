use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BecError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix in {context} (det = {det:e})")]
    Singular { context: &'static str, det: f64 },

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("irrotationality residual {residual:e} exceeded {limit:e} at t = {t}")]
    Irrotationality { residual: f64, limit: f64, t: f64 },

    #[error("Sigma^-1 lost positive definiteness at t = {t}")]
    NotPositiveDefinite { t: f64 },

    #[error("no convergence in {what} after {iterations} iterations ({detail})")]
    NoConvergence { what: &'static str, iterations: usize, detail: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("boundary mass {mass:e} exceeds {limit:e}: {context}")]
    BoundaryMass { mass: f64, limit: f64, context: &'static str },
}

pub type Result<T> = std::result::Result<T, BecError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> BecError {
    BecError::InvalidParameter { name, reason: reason.into() }
}

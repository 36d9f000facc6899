//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("matrix is not hermitian: {0}")]
    NotHermitian(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not a valid Gaussian state: {0}")]
    InvalidState(String),
    #[error("operator is not trace class: {0}")]
    NotTraceClass(String),
    #[error("matrix is not symplectic: {0}")]
    NotSymplectic(String),
    #[error("operator is not a contraction: {0}")]
    NotContraction(String),
    #[error("product is not composable in E2: {0}")]
    NonComposable(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("ill-conditioned estimate: {0}")]
    IllConditioned(String),
    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),
    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

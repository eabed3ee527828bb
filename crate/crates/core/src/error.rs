use alloc::boxed::Box;
use alloc::string::String;

use crate::norms::SandwichCertificate;

/// Errors raised by the numerical and exact routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("subspace basis does not have full column rank")]
    RankDeficient,
    #[error("singular matrix")]
    Singular,
    #[error("degenerate norm: {0}")]
    Degenerate(String),
    #[error("eigen solver failed: {0}")]
    Eigen(String),
    #[error("ellipsoid fit did not converge after {iterations} iterations (leverage gap {gap:e})")]
    NotConverged {
        iterations: usize,
        gap: f64,
        best: Box<SandwichCertificate>,
    },
    #[error("audit failed: {0}")]
    Audit(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("insufficient quadrature resolution: {0}")]
    Resolution(String),
    #[error("law exceeds the distortion bound: {0}")]
    Unbounded(String),
}

pub type Result<T> = core::result::Result<T, Error>;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::backend::GradedPiece;
use crate::error::{Error, Result};
use crate::hermitian::HermitianForm;
use crate::linalg::{self, CMat};
use crate::norms::{john_form, EllipsoidOptions, NormOracle};

/// A norm on a graded piece, in the coordinates of its sections.
#[derive(Debug, Clone, PartialEq)]
pub enum PieceNorm {
    Hermitian(HermitianForm),
    Oracle(NormOracle),
}

impl PieceNorm {
    /// Restricts a Gram matrix in monomial coordinates to the piece.
    pub fn from_gram(piece: &GradedPiece, form: &HermitianForm) -> Result<Self> {
        Ok(PieceNorm::Hermitian(form.restrict(&piece.sections)?))
    }

    /// Composes the functionals of a norm in monomial coordinates with the
    /// sections of the piece.
    pub fn from_oracle(piece: &GradedPiece, oracle: &NormOracle) -> Result<Self> {
        match oracle {
            NormOracle::Functionals { kind, rows } => {
                Ok(PieceNorm::Oracle(NormOracle::functionals(*kind, rows * &piece.sections)?))
            }
            NormOracle::Hermitian(f) => Self::from_gram(piece, f),
            _ => Err(Error::Invalid("only functional families and forms restrict to pieces".into())),
        }
    }

    /// The Hermitian form itself, or the John surrogate of an oracle together
    /// with its certified spread `ln(upper / lower)`.
    pub fn hermitian(&self, opts: &EllipsoidOptions) -> Result<(HermitianForm, f64)> {
        match self {
            PieceNorm::Hermitian(f) => Ok((f.clone(), 0.0)),
            PieceNorm::Oracle(o) => {
                let cert = john_form(o, opts)?;
                let spread = cert.log_spread();
                Ok((cert.form, spread))
            }
        }
    }
}

/// `Φ(n, α) = -ln` of the quotient norm of the section with leading exponent
/// `α` modulo the sections of larger exponent, for a Hermitian norm in piece
/// coordinates. The quotient norm is the residual of the orthogonal
/// projection, read off a Cholesky factor with the basis in decreasing order.
pub fn gr_quotient_values(piece: &GradedPiece, form: &HermitianForm) -> Result<Vec<f64>> {
    let r = piece.rank();
    if form.dim() != r {
        return Err(Error::Dimension { expected: r, found: form.dim() });
    }
    let g = form.gram();
    let rev = CMat::from_fn(r, r, |i, j| g[(r - 1 - i, r - 1 - j)]);
    let l = linalg::cholesky_lower(&rev).ok_or(Error::NotPositiveDefinite)?;
    Ok((0..r).map(|k| -l[(r - 1 - k, r - 1 - k)].re.ln()).collect())
}

/// Values of a piece norm with the additive uncertainty of the surrogate:
/// each entry is within `budget` of the exact quotient-norm value.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientValues {
    pub values: Vec<f64>,
    pub budget: f64,
}

pub fn quotient_values(piece: &GradedPiece, norm: &PieceNorm, opts: &EllipsoidOptions) -> Result<QuotientValues> {
    let (form, spread) = norm.hermitian(opts)?;
    Ok(QuotientValues { values: gr_quotient_values(piece, &form)?, budget: spread })
}

/// `max_n (-min_α Φ(n, α) / n)` over the given levels, a lower-bound
/// constant for the Schwarz-type condition `Φ(n, α) ≥ -C n`.
pub fn schwarz_constant(levels: &[(usize, Vec<f64>)]) -> f64 {
    levels
        .iter()
        .filter(|(n, v)| *n > 0 && !v.is_empty())
        .map(|(n, v)| -v.iter().cloned().fold(f64::INFINITY, f64::min) / *n as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

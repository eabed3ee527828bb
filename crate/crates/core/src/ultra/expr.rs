use alloc::boxed::Box;

use super::field::ValuedField;
use super::matrix::Mat;
use super::norm::{max_norm, DiagonalNorm, Exponent};
use crate::error::{Error, Result};

/// Ultrametric norm built from diagonal norms by the standard constructions.
///
/// Subspaces are given by basis columns in the parent coordinates. A
/// restriction uses coordinates relative to those columns; a quotient uses
/// the coordinates of [`super::quotient_map`]; a dual uses dual coordinates;
/// a tensor uses Kronecker coordinates (left index major).
#[derive(Debug, Clone)]
pub enum UltraNormExpr<F: ValuedField> {
    Diagonal(DiagonalNorm<F>),
    Scale(Box<UltraNormExpr<F>>, Exponent),
    Max(Box<UltraNormExpr<F>>, Box<UltraNormExpr<F>>),
    Restrict(Box<UltraNormExpr<F>>, Mat<F::Elem>),
    Quotient(Box<UltraNormExpr<F>>, Mat<F::Elem>),
    Dual(Box<UltraNormExpr<F>>),
    Tensor(Box<UltraNormExpr<F>>, Box<UltraNormExpr<F>>),
}

impl<F: ValuedField> From<DiagonalNorm<F>> for UltraNormExpr<F> {
    fn from(d: DiagonalNorm<F>) -> Self {
        Self::Diagonal(d)
    }
}

impl<F: ValuedField> UltraNormExpr<F> {
    /// `‖x‖ q^a`.
    pub fn scale(self, a: Exponent) -> Self {
        Self::Scale(Box::new(self), a)
    }

    pub fn max(self, other: Self) -> Self {
        Self::Max(Box::new(self), Box::new(other))
    }

    pub fn restrict(self, w: Mat<F::Elem>) -> Self {
        Self::Restrict(Box::new(self), w)
    }

    pub fn quotient(self, w: Mat<F::Elem>) -> Self {
        Self::Quotient(Box::new(self), w)
    }

    pub fn dual(self) -> Self {
        Self::Dual(Box::new(self))
    }

    pub fn tensor(self, other: Self) -> Self {
        Self::Tensor(Box::new(self), Box::new(other))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Diagonal(d) => d.dim(),
            Self::Scale(c, _) | Self::Dual(c) => c.dim(),
            Self::Max(l, _) => l.dim(),
            Self::Restrict(_, w) => w.ncols(),
            Self::Quotient(c, w) => c.dim().saturating_sub(w.ncols()),
            Self::Tensor(l, r) => l.dim() * r.dim(),
        }
    }

    /// Equivalent diagonal norm. Every node kind maps diagonal norms to
    /// diagonal norms exactly.
    pub fn normalize(&self, f: &F) -> Result<DiagonalNorm<F>> {
        match self {
            Self::Diagonal(d) => Ok(d.clone()),
            Self::Scale(c, a) => Ok(c.normalize(f)?.scaled(*a)),
            Self::Max(l, r) => {
                let (l, r) = (l.normalize(f)?, r.normalize(f)?);
                if l.dim() != r.dim() {
                    return Err(Error::Dimension { expected: l.dim(), found: r.dim() });
                }
                max_norm(f, &l, &r)
            }
            Self::Restrict(c, w) => c.normalize(f)?.restrict(f, w),
            Self::Quotient(c, w) => c.normalize(f)?.quotient(f, w),
            Self::Dual(c) => Ok(c.normalize(f)?.dual()),
            Self::Tensor(l, r) => Ok(l.normalize(f)?.tensor(f, &r.normalize(f)?)),
        }
    }

    /// Exponent of `‖x‖`, `None` for `x = 0`.
    pub fn eval(&self, f: &F, x: &[F::Elem]) -> Result<Option<Exponent>> {
        let d = self.normalize(f)?;
        if x.len() != d.dim() {
            return Err(Error::Dimension { expected: d.dim(), found: x.len() });
        }
        Ok(d.eval(f, x))
    }
}

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::expr::UltraNormExpr;
use super::field::ValuedField;
use super::matrix::{self, Mat};
use super::norm::{int, reduce, simultaneous_basis, DiagonalNorm, Exponent};
use crate::error::{Error, Result};
use crate::spectral::SlopeProfile;

pub fn exponent_to_f64(e: Exponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

/// `e ln q` as a real number.
pub fn to_log<F: ValuedField>(f: &F, e: Exponent) -> f64 {
    exponent_to_f64(e) * f.log_base()
}

/// A basis with an exact orthogonality constant `α = q^alpha_exponent`.
///
/// Every combination satisfies `‖Σ λ_i b_i‖ ≥ α max_i |λ_i| ‖b_i‖`.
#[derive(Debug, Clone)]
pub struct AlphaCertificate<E> {
    pub basis: Mat<E>,
    pub alpha_exponent: Exponent,
}

impl<E> AlphaCertificate<E> {
    pub fn alpha(&self, log_base: f64) -> f64 {
        (exponent_to_f64(self.alpha_exponent) * log_base).exp()
    }

    pub fn is_orthogonal(&self) -> bool {
        self.alpha_exponent == int(0)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

fn check_eps(eps: Exponent) -> Result<()> {
    if eps > int(0) && eps < int(1) {
        Ok(())
    } else {
        Err(Error::Invalid("eps must lie in (0, 1)".into()))
    }
}

/// Best orthogonality constant of `basis`: the inverse of
/// `max_i ‖b_i^∨‖_* ‖b_i‖`, with `b_i^∨` the dual basis.
pub fn certified_alpha<F: ValuedField>(
    f: &F,
    basis: &Mat<F::Elem>,
    norm: &UltraNormExpr<F>,
) -> Result<AlphaCertificate<F::Elem>> {
    let d = norm.normalize(f)?;
    alpha_for(f, basis, &d)
}

pub(crate) fn alpha_for<F: ValuedField>(
    f: &F,
    basis: &Mat<F::Elem>,
    d: &DiagonalNorm<F>,
) -> Result<AlphaCertificate<F::Elem>> {
    check_dim(d.dim(), basis.nrows())?;
    check_dim(d.dim(), basis.ncols())?;
    let inv = matrix::inverse(f, basis).ok_or(Error::Singular)?;
    let mut worst = None::<Exponent>;
    for i in 0..basis.ncols() {
        let primal = d.eval(f, &basis.column(i)).expect("basis vector is nonzero");
        let dual = d.eval_dual(f, &inv.row(i)).expect("dual vector is nonzero");
        let s = primal + dual;
        worst = Some(worst.map_or(s, |w| w.max(s)));
    }
    Ok(AlphaCertificate { basis: basis.clone(), alpha_exponent: -worst.unwrap_or(int(0)) })
}

/// Basis adapted to the flag whose `i`-th step is spanned by the first `i`
/// columns of `flag`. Each new vector is the exact residual of the next
/// column against the previous step, so the certificate has `α = 1 ≥ 1 - eps`.
pub fn eps_orthogonalize<F: ValuedField>(
    f: &F,
    norm: &UltraNormExpr<F>,
    flag: &Mat<F::Elem>,
    eps: Exponent,
) -> Result<AlphaCertificate<F::Elem>> {
    check_eps(eps)?;
    let d = norm.normalize(f)?;
    check_dim(d.dim(), flag.nrows())?;
    check_dim(d.dim(), flag.ncols())?;
    let coords = matrix::mat_mul(f, &inverse_basis(f, &d)?, flag);
    let red = reduce(f, coords.columns(), d.exponents())?;
    let basis = matrix::mat_mul(f, d.basis(), &Mat::from_columns(&red.vectors));
    alpha_for(f, &basis, &d)
}

fn inverse_basis<F: ValuedField>(f: &F, d: &DiagonalNorm<F>) -> Result<Mat<F::Elem>> {
    matrix::inverse(f, d.basis()).ok_or(Error::Singular)
}

/// Exponent of `‖s‖_ψ / ‖s‖_φ` for the determinant `s` of the coordinate basis.
pub fn degree_ultra<F: ValuedField>(f: &F, phi: &UltraNormExpr<F>, psi: &UltraNormExpr<F>) -> Result<Exponent> {
    let (p, q) = (phi.normalize(f)?, psi.normalize(f)?);
    check_dim(p.dim(), q.dim())?;
    Ok(q.determinant_exponent(f) - p.determinant_exponent(f))
}

#[derive(Debug, Clone)]
pub struct UltraSlopes<E> {
    /// Slope exponents in descending order.
    pub exponents: Vec<Exponent>,
    /// Simultaneously orthogonal basis, columns ordered as the slopes.
    pub basis: Mat<E>,
    pub profile: SlopeProfile,
    /// Orthogonality exponent of the basis for both norms.
    pub alpha_exponent: Exponent,
    /// Per-slope error permitted by `eps`, namely `-2 ln(1 - eps)`. The
    /// basis is exactly orthogonal, so the slopes themselves carry no error.
    pub budget: f64,
}

/// Successive slopes `ln(‖e_i‖_ψ / ‖e_i‖_φ)` of the pair.
pub fn slopes_ultra<F: ValuedField>(
    f: &F,
    phi: &UltraNormExpr<F>,
    psi: &UltraNormExpr<F>,
    eps: Exponent,
) -> Result<UltraSlopes<F::Elem>> {
    check_eps(eps)?;
    let (p, q) = (phi.normalize(f)?, psi.normalize(f)?);
    check_dim(p.dim(), q.dim())?;
    let cb = simultaneous_basis(f, &p, &q)?;
    let mut order: Vec<(Exponent, usize)> = cb.psi.iter().zip(&cb.phi).map(|(&b, &a)| b - a).zip(0..).collect();
    order.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let basis = Mat::from_columns(&order.iter().map(|&(_, i)| cb.basis.column(i)).collect::<Vec<_>>());
    let exponents: Vec<Exponent> = order.iter().map(|&(e, _)| e).collect();
    let profile = SlopeProfile::new(exponents.iter().map(|&e| to_log(f, e)).collect())?;
    let alpha = alpha_for(f, &basis, &p)?.alpha_exponent.min(alpha_for(f, &basis, &q)?.alpha_exponent);
    let budget = -2.0 * (1.0 - exponent_to_f64(eps)).ln();
    Ok(UltraSlopes { exponents, basis, profile, alpha_exponent: alpha, budget })
}

/// Both sides of the truncation identity, as exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UltraTruncation {
    /// Degree of `(φ, ψ ∨ φ(a))`.
    pub degree: Exponent,
    /// `Σ max(μ_i, a)`.
    pub slope_sum: Exponent,
}

/// Degree of the truncated pair `(φ, max(ψ, φ q^a))` against the truncated
/// slope sum. The two agree exactly; a mismatch is reported as an audit error.
pub fn truncate_ultra<F: ValuedField>(
    f: &F,
    phi: &UltraNormExpr<F>,
    psi: &UltraNormExpr<F>,
    a: Exponent,
) -> Result<UltraTruncation> {
    let truncated = psi.clone().max(phi.clone().scale(a));
    let degree = degree_ultra(f, phi, &truncated)?;
    let half = Exponent::new(1, 2);
    let slopes = slopes_ultra(f, phi, psi, half)?;
    let slope_sum = slopes.exponents.iter().map(|&m| m.max(a)).sum();
    if degree != slope_sum {
        return Err(Error::Audit(alloc::format!("truncated degree {degree} differs from slope sum {slope_sum}")));
    }
    Ok(UltraTruncation { degree, slope_sum })
}

/// Kronecker product of two certificates, with `α = α_left α_right` for the
/// tensor norm.
pub fn tensor_alpha<F: ValuedField>(
    f: &F,
    left: &AlphaCertificate<F::Elem>,
    right: &AlphaCertificate<F::Elem>,
) -> AlphaCertificate<F::Elem> {
    AlphaCertificate {
        basis: matrix::kron(f, &left.basis, &right.basis),
        alpha_exponent: left.alpha_exponent + right.alpha_exponent,
    }
}

/// Columns of `flag` spanning its nested steps, completed to a basis: a flag
/// given as increasing subspaces `V_1 ⊂ ... ⊂ V_k` is turned into an ordered
/// basis whose leading spans hit every step.
pub fn flag_basis<F: ValuedField>(f: &F, steps: &[Mat<F::Elem>], dim: usize) -> Result<Mat<F::Elem>> {
    let mut cols: Vec<Vec<F::Elem>> = Vec::new();
    let mut candidates: Vec<Vec<F::Elem>> = steps.iter().flat_map(|s| s.columns()).collect();
    candidates.extend(matrix::identity(f, dim).columns());
    for c in candidates {
        check_dim(dim, c.len())?;
        let mut trial = cols.clone();
        trial.push(c.clone());
        if matrix::rank(f, &Mat::from_columns(&trial)) == trial.len() {
            cols = trial;
        }
    }
    let mut expected = 0;
    for s in steps {
        let span = matrix::rank(f, s);
        if span < expected {
            return Err(Error::Invalid("flag steps are not increasing".into()));
        }
        let lead = Mat::from_columns(&cols[..span]);
        let mut joined = lead.columns();
        joined.extend(s.columns());
        if matrix::rank(f, &Mat::from_columns(&joined)) != span {
            return Err(Error::Invalid("flag steps are not nested".into()));
        }
        expected = span;
    }
    Ok(Mat::from_columns(&cols))
}

//! Diagonal ultrametric norms and the exact operations that preserve them.
//!
//! A diagonal norm is given by a basis `B` and rational exponents `γ`; the
//! norm of `x` is `q^e` with `e = max_i (γ_i - v(y_i))` where `y = B⁻¹x` and
//! `q` is the base of the valuation. Zero coordinates do not contribute.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::Rational64;

use super::field::ValuedField;
use super::matrix::{self, Mat};
use crate::error::{Error, Result};

/// Exact exponent of a norm value in base `q`.
pub type Exponent = Rational64;

pub(crate) fn int(n: i64) -> Exponent {
    Rational64::from_integer(n)
}

#[derive(Debug, Clone)]
pub struct DiagonalNorm<F: ValuedField> {
    basis: Mat<F::Elem>,
    inv: Mat<F::Elem>,
    exps: Vec<Exponent>,
}

/// Columns reduced so that each has its weighted maximum at a row where all
/// later columns vanish.
pub(crate) struct Reduction<E> {
    /// Reduced columns, in the coordinates they were given in.
    pub vectors: Vec<Vec<E>>,
    /// Coefficients expressing each reduced column in the input columns.
    pub combos: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
    pub exps: Vec<Exponent>,
}

/// Weighted exponent `γ - v(y)`, or `None` when `y = 0`.
fn weighted<F: ValuedField>(f: &F, y: &F::Elem, gamma: Exponent) -> Option<Exponent> {
    f.valuation(y).map(|v| gamma - int(v))
}

/// Weighted maximum of `y` with its first attaining row.
pub(crate) fn pivot<F: ValuedField>(f: &F, y: &[F::Elem], exps: &[Exponent]) -> Option<(usize, Exponent)> {
    let mut best: Option<(usize, Exponent)> = None;
    for (i, (yi, &g)) in y.iter().zip(exps).enumerate() {
        if let Some(e) = weighted(f, yi, g) {
            if best.map_or(true, |(_, b)| e > b) {
                best = Some((i, e));
            }
        }
    }
    best
}

/// Sequential weighted elimination. The residual of each column against the
/// span of the earlier ones is an exact distance minimizer, so the output is
/// an orthogonal basis of the span. Fails on linearly dependent input.
pub(crate) fn reduce<F: ValuedField>(f: &F, cols: Vec<Vec<F::Elem>>, exps: &[Exponent]) -> Result<Reduction<F::Elem>> {
    let k = cols.len();
    let mut work = cols;
    let mut combos: Vec<Vec<F::Elem>> =
        (0..k).map(|j| (0..k).map(|i| if i == j { f.one() } else { f.zero() }).collect()).collect();
    let mut pivots = Vec::with_capacity(k);
    let mut out_exps = Vec::with_capacity(k);
    for j in 0..k {
        let (p, e) = pivot(f, &work[j], exps).ok_or(Error::RankDeficient)?;
        pivots.push(p);
        out_exps.push(e);
        let inv = f.inv(&work[j][p]).expect("nonzero pivot");
        for l in j + 1..k {
            if f.is_zero(&work[l][p]) {
                continue;
            }
            let c = f.mul(&work[l][p], &inv);
            work[l] = matrix::axpy(f, &work[l], &c, &work[j]);
            combos[l] = matrix::axpy(f, &combos[l], &c, &combos[j]);
        }
    }
    Ok(Reduction { vectors: work, combos, pivots, exps: out_exps })
}

/// Linear map onto canonical coordinates of `V / span(w)`: a class is
/// represented by its unique member vanishing on the echelon pivot rows of
/// `w`, and the coordinates are the remaining entries.
pub fn quotient_map<F: ValuedField>(f: &F, w: &Mat<F::Elem>) -> Result<Mat<F::Elem>> {
    let r = w.nrows();
    let pivots = matrix::column_pivots(f, w);
    if pivots.len() != w.ncols() {
        return Err(Error::RankDeficient);
    }
    let k = pivots.len();
    let free: Vec<usize> = (0..r).filter(|i| !pivots.contains(i)).collect();
    let wp = Mat::from_fn(k, k, |i, j| w.get(pivots[i], j).clone());
    let wf = Mat::from_fn(free.len(), k, |i, j| w.get(free[i], j).clone());
    let wp_inv = matrix::inverse(f, &wp).ok_or(Error::Singular)?;
    let t = matrix::mat_mul(f, &wf, &wp_inv);
    Ok(Mat::from_fn(free.len(), r, |i, c| {
        if let Some(pos) = pivots.iter().position(|&p| p == c) {
            f.neg(t.get(i, pos))
        } else if free[i] == c {
            f.one()
        } else {
            f.zero()
        }
    }))
}

impl<F: ValuedField> DiagonalNorm<F> {
    pub fn new(f: &F, basis: Mat<F::Elem>, exps: Vec<Exponent>) -> Result<Self> {
        if basis.nrows() != basis.ncols() {
            return Err(Error::Dimension { expected: basis.nrows(), found: basis.ncols() });
        }
        if exps.len() != basis.ncols() {
            return Err(Error::Dimension { expected: basis.ncols(), found: exps.len() });
        }
        let inv = matrix::inverse(f, &basis).ok_or(Error::Singular)?;
        Ok(Self { basis, inv, exps })
    }

    /// Norm with the coordinate basis and the given exponents.
    pub fn coordinate(f: &F, exps: Vec<Exponent>) -> Self {
        let n = exps.len();
        Self { basis: matrix::identity(f, n), inv: matrix::identity(f, n), exps }
    }

    pub fn trivial(f: &F, r: usize) -> Self {
        Self::coordinate(f, vec![int(0); r])
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn basis(&self) -> &Mat<F::Elem> {
        &self.basis
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    pub fn coords(&self, f: &F, x: &[F::Elem]) -> Vec<F::Elem> {
        matrix::mat_vec(f, &self.inv, x)
    }

    /// Exponent of `‖x‖`, or `None` for `x = 0`.
    pub fn eval(&self, f: &F, x: &[F::Elem]) -> Option<Exponent> {
        pivot(f, &self.coords(f, x), &self.exps).map(|(_, e)| e)
    }

    /// Exponent of the dual norm of the functional with coefficient row `l`.
    pub fn eval_dual(&self, f: &F, l: &[F::Elem]) -> Option<Exponent> {
        let y = matrix::mat_vec(f, &self.basis.transpose(), l);
        let neg: Vec<Exponent> = self.exps.iter().map(|&g| -g).collect();
        pivot(f, &y, &neg).map(|(_, e)| e)
    }

    pub fn scaled(&self, a: Exponent) -> Self {
        Self { basis: self.basis.clone(), inv: self.inv.clone(), exps: self.exps.iter().map(|&g| g + a).collect() }
    }

    /// Dual norm on the dual space, in the dual coordinates.
    pub fn dual(&self) -> Self {
        Self {
            basis: self.inv.transpose(),
            inv: self.basis.transpose(),
            exps: self.exps.iter().map(|&g| -g).collect(),
        }
    }

    /// Tensor norm on the Kronecker coordinates.
    pub fn tensor(&self, f: &F, other: &Self) -> Self {
        let exps = self.exps.iter().flat_map(|&g| other.exps.iter().map(move |&d| g + d)).collect();
        Self {
            basis: matrix::kron(f, &self.basis, &other.basis),
            inv: matrix::kron(f, &self.inv, &other.inv),
            exps,
        }
    }

    /// Restriction to `span(w)`, in coordinates relative to the columns of `w`.
    pub fn restrict(&self, f: &F, w: &Mat<F::Elem>) -> Result<Self> {
        if w.nrows() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: w.nrows() });
        }
        let y = matrix::mat_mul(f, &self.inv, w);
        let red = reduce(f, y.columns(), &self.exps)?;
        Self::new(f, Mat::from_columns(&red.combos), red.exps)
    }

    /// Quotient norm on `V / span(w)`, in the coordinates of [`quotient_map`].
    pub fn quotient(&self, f: &F, w: &Mat<F::Elem>) -> Result<Self> {
        if w.nrows() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: w.nrows() });
        }
        if w.ncols() >= self.dim() {
            return Err(Error::Invalid("quotient by the whole space".into()));
        }
        let q = quotient_map(f, w)?;
        let y = matrix::mat_mul(f, &self.inv, w);
        let red = reduce(f, y.columns(), &self.exps)?;
        let mut cols = Vec::new();
        let mut exps = Vec::new();
        for i in (0..self.dim()).filter(|i| !red.pivots.contains(i)) {
            cols.push(matrix::mat_vec(f, &q, &self.basis.column(i)));
            exps.push(self.exps[i]);
        }
        Self::new(f, Mat::from_columns(&cols), exps)
    }

    /// Exponent of `‖s_1 ∧ ... ∧ s_r‖` for the coordinate vectors `s_i`.
    pub fn determinant_exponent(&self, f: &F) -> Exponent {
        let v = f.valuation(&matrix::det(f, &self.basis)).expect("invertible basis");
        int(v) + self.exps.iter().copied().sum::<Exponent>()
    }

    /// Exponent of `‖e_1 ∧ ... ∧ e_r‖` for the columns of `e`, or `None` when
    /// they are dependent.
    pub fn wedge_exponent(&self, f: &F, e: &Mat<F::Elem>) -> Option<Exponent> {
        let c = matrix::mat_mul(f, &self.inv, e);
        let v = f.valuation(&matrix::det(f, &c))?;
        Some(self.exps.iter().copied().sum::<Exponent>() - int(v))
    }
}

/// A basis orthogonal for two norms at once, with both exponent lists.
#[derive(Debug, Clone)]
pub struct CommonBasis<E> {
    pub basis: Mat<E>,
    pub phi: Vec<Exponent>,
    pub psi: Vec<Exponent>,
}

/// Simultaneously orthogonal basis of two diagonal norms.
///
/// The first vector maximizes `‖·‖_φ / ‖·‖_ψ`, which is attained on a
/// ψ-orthogonal basis vector. Its φ-orthogonal complement is then also a
/// ψ-orthogonal complement, and the construction recurses there.
pub fn simultaneous_basis<F: ValuedField>(
    f: &F,
    phi: &DiagonalNorm<F>,
    psi: &DiagonalNorm<F>,
) -> Result<CommonBasis<F::Elem>> {
    let r = phi.dim();
    if psi.dim() != r {
        return Err(Error::Dimension { expected: r, found: psi.dim() });
    }
    if r == 0 {
        return Ok(CommonBasis { basis: Mat::from_fn(0, 0, |_, _| f.zero()), phi: Vec::new(), psi: Vec::new() });
    }
    let mut best: Option<(usize, Exponent, Exponent)> = None;
    for i in 0..r {
        let c = psi.basis.column(i);
        let ep = phi.eval(f, &c).expect("basis vector is nonzero");
        if best.map_or(true, |(_, p, q)| ep - psi.exps[i] > p - q) {
            best = Some((i, ep, psi.exps[i]));
        }
    }
    let (i, ep, eq) = best.expect("r > 0");
    let e1 = psi.basis.column(i);
    if r == 1 {
        return Ok(CommonBasis { basis: Mat::from_columns(&[e1]), phi: vec![ep], psi: vec![eq] });
    }
    let (k, _) = pivot(f, &phi.coords(f, &e1), &phi.exps).expect("nonzero");
    let keep: Vec<usize> = (0..r).filter(|&j| j != k).collect();
    let w = Mat::from_columns(&keep.iter().map(|&j| phi.basis.column(j)).collect::<Vec<_>>());
    let phi_w = DiagonalNorm::coordinate(f, keep.iter().map(|&j| phi.exps[j]).collect());
    let psi_w = psi.restrict(f, &w)?;
    let rest = simultaneous_basis(f, &phi_w, &psi_w)?;
    let lifted = matrix::mat_mul(f, &w, &rest.basis);
    let mut cols = vec![e1];
    cols.extend(lifted.columns());
    let mut phi_e = vec![ep];
    phi_e.extend(rest.phi);
    let mut psi_e = vec![eq];
    psi_e.extend(rest.psi);
    Ok(CommonBasis { basis: Mat::from_columns(&cols), phi: phi_e, psi: psi_e })
}

/// Pointwise maximum of two diagonal norms.
pub fn max_norm<F: ValuedField>(f: &F, phi: &DiagonalNorm<F>, psi: &DiagonalNorm<F>) -> Result<DiagonalNorm<F>> {
    let cb = simultaneous_basis(f, phi, psi)?;
    let exps = cb.phi.iter().zip(&cb.psi).map(|(&a, &b)| a.max(b)).collect();
    DiagonalNorm::new(f, cb.basis, exps)
}

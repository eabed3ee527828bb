//! Dense complex linear algebra helpers shared by the archimedean modules.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Lifts a real matrix to a complex one.
pub fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn complexify_vec(v: &DVector<f64>) -> CVec {
    v.map(|x| C64::new(x, 0.0))
}

/// Modulus of a complex number, available without `std`.
pub fn cabs(z: C64) -> f64 {
    z.norm_sqr().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, &z| acc.max(cabs(z)))
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            d = d.max(cabs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    d
}

/// Returns `(m + m^*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Lower Cholesky factor `L` with `g = L L^*`, or `None` if `g` is not
/// numerically positive definite.
pub fn cholesky_lower(g: &CMat) -> Option<CMat> {
    let l = g.clone().cholesky()?.l();
    if l.diagonal().iter().all(|d| d.re.is_finite() && d.re > 0.0) {
        Some(l)
    } else {
        None
    }
}

/// Hermitian eigen-decomposition sorted by descending eigenvalue.
pub fn eigh_desc(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitian_part(a).symmetric_eigen();
    let n = a.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vecs)
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn eig_range(a: &CMat) -> (f64, f64) {
    let eig = hermitian_part(a).symmetric_eigenvalues();
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Computes `L^{-1} b` for lower-triangular `L`.
pub fn solve_lower(l: &CMat, b: &CMat) -> Result<CMat> {
    l.solve_lower_triangular(b).ok_or(Error::Singular)
}

/// Computes `L^{-*} b` for lower-triangular `L`.
pub fn solve_lower_adjoint(l: &CMat, b: &CMat) -> Result<CMat> {
    let mut x = b.clone();
    if l.ad_solve_lower_triangular_mut(&mut x) {
        Ok(x)
    } else {
        Err(Error::Singular)
    }
}

/// Whitened pencil `L^{-1} psi L^{-*}` where `phi = L L^*`.
pub fn whiten(l: &CMat, psi: &CMat) -> Result<CMat> {
    let x = solve_lower(l, psi)?;
    let a = solve_lower(l, &x.adjoint())?.adjoint();
    Ok(hermitian_part(&a))
}

/// Generalized Hermitian eigenproblem `psi v = lambda phi v`.
///
/// Returns eigenvalues in descending order and eigenvectors as columns,
/// normalized so that `V^* phi V = I`.
pub fn pencil_eigen(phi: &CMat, psi: &CMat) -> Result<(Vec<f64>, CMat)> {
    let l = cholesky_lower(phi).ok_or(Error::NotPositiveDefinite)?;
    let a = whiten(&l, psi)?;
    let (values, y) = eigh_desc(&a);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue in pencil".into()));
    }
    let v = solve_lower_adjoint(&l, &y)?;
    Ok((values, v))
}

/// Inverse of a Hermitian positive definite matrix.
pub fn inverse_hpd(g: &CMat) -> Result<CMat> {
    let chol = g.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    Ok(hermitian_part(&chol.inverse()))
}

/// `ln det g` for Hermitian positive definite `g`.
pub fn log_det_hpd(g: &CMat) -> Result<f64> {
    let l = cholesky_lower(g).ok_or(Error::NotPositiveDefinite)?;
    Ok(2.0 * l.diagonal().iter().map(|d| d.re.ln()).sum::<f64>())
}

/// `x^* g x` (real part).
pub fn quad_form(g: &CMat, x: &CVec) -> f64 {
    x.dotc(&(g * x)).re
}

/// Whether the columns of `w` are linearly independent (relative tolerance
/// `1e-12` on singular values).
pub fn has_full_column_rank(w: &CMat) -> bool {
    if w.ncols() == 0 {
        return true;
    }
    if w.ncols() > w.nrows() {
        return false;
    }
    let sv = w.singular_values();
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    hi > 0.0 && lo > 1e-12 * hi
}

/// Orthonormal basis of the Euclidean orthogonal complement of the column
/// span of `w` (assumed of full column rank).
pub fn orthogonal_complement(w: &CMat) -> CMat {
    let r = w.nrows();
    let k = w.ncols();
    if k == 0 {
        return CMat::identity(r, r);
    }
    let gram = w.adjoint() * w;
    let inv = inverse_hpd(&gram).expect("full column rank checked by caller");
    let proj = w * inv * w.adjoint();
    let (values, vecs) = eigh_desc(&proj);
    debug_assert_eq!(values.len(), r);
    let mut out = CMat::zeros(r, r - k);
    for j in 0..(r - k) {
        out.set_column(j, &vecs.column(k + j));
    }
    out
}

/// Restricts a Gram matrix to the span of the columns of `w`: `w^* g w`.
pub fn congruence(g: &CMat, w: &CMat) -> CMat {
    hermitian_part(&(w.adjoint() * g * w))
}

/// Concatenates column blocks.
pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

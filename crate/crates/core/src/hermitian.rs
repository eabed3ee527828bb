//! Slope theory for a space with two Hermitian inner products.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};
use crate::spectral::{Polygon, SlopeProfile};

/// Relative gap below which neighbouring eigenvalues share a flag step.
pub const EIGEN_GAP: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Positive definite Hermitian (or real symmetric) Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    gram: CMat,
    kind: ScalarKind,
}

impl HermitianForm {
    /// Validates Hermitian symmetry (relative `1e-12`) and positivity; the
    /// stored matrix is the exact Hermitian part of the input.
    pub fn new(gram: CMat, kind: ScalarKind) -> Result<Self> {
        let r = gram.nrows();
        if r == 0 || gram.ncols() != r {
            return Err(Error::Invalid("Gram matrix must be square and non-empty".into()));
        }
        if gram.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite Gram entry".into()));
        }
        let scale = linalg::max_abs(&gram);
        let defect = linalg::hermitian_defect(&gram);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(defect));
        }
        if kind == ScalarKind::Real && gram.iter().any(|z| z.im.abs() > HERMITIAN_TOL * scale) {
            return Err(Error::Invalid("real form with complex entries".into()));
        }
        let mut gram = linalg::hermitian_part(&gram);
        if kind == ScalarKind::Real {
            gram.iter_mut().for_each(|z| z.im = 0.0);
        }
        let (lo, _) = linalg::eig_range(&gram);
        if !(lo > 0.0) || linalg::cholesky_lower(&gram).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { gram, kind })
    }

    pub fn real(gram: &DMatrix<f64>) -> Result<Self> {
        Self::new(linalg::complexify(gram), ScalarKind::Real)
    }

    pub fn complex(gram: CMat) -> Result<Self> {
        Self::new(gram, ScalarKind::Complex)
    }

    pub fn identity(r: usize, kind: ScalarKind) -> Self {
        Self { gram: CMat::identity(r, r), kind }
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    /// `||x|| = sqrt(x^* G x)`.
    pub fn norm(&self, x: &CVec) -> f64 {
        linalg::quad_form(&self.gram, x).max(0.0).sqrt()
    }

    /// The form of the norm `e^c ||.||`.
    pub fn scaled(&self, c: f64) -> Self {
        let f = (2.0 * c).exp();
        Self { gram: self.gram.map(|z| z * f), kind: self.kind }
    }

    /// Restriction to the column span of `w`, in the coordinates of `w`.
    pub fn restrict(&self, w: &CMat) -> Result<Self> {
        if w.nrows() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: w.nrows() });
        }
        if w.ncols() == 0 || !linalg::has_full_column_rank(w) {
            return Err(Error::RankDeficient);
        }
        Self::new(linalg::congruence(&self.gram, w), self.kind)
    }
}

/// Two Hermitian norms on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPair {
    phi: HermitianForm,
    psi: HermitianForm,
}

/// A flag of nested subspaces with the slopes of its subquotients.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    steps: Vec<CMat>,
    step_slopes: Vec<f64>,
}

impl Flag {
    /// Bases of `V_1 ⊂ ... ⊂ V_n = V` (the zero space is implicit).
    pub fn steps(&self) -> &[CMat] {
        &self.steps
    }

    pub fn step_slopes(&self) -> &[f64] {
        &self.step_slopes
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.ncols()).collect()
    }
}

/// Simultaneous diagonalization of a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonalization {
    /// Eigenvalues `e^{2 mu_i}` of the pencil, descending.
    pub eigenvalues: Vec<f64>,
    /// Columns orthonormal for `phi` and orthogonal for `psi`.
    pub basis: CMat,
}

/// Result of [`HermitianPair::truncated_degree`].
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    /// `sum_i max(mu_i, a)`.
    pub value: f64,
    /// Hermitian form comparable to `max(||.||_psi, e^a ||.||_phi)` within `sqrt 2`.
    pub surrogate: HermitianForm,
}

impl HermitianPair {
    pub fn new(phi: HermitianForm, psi: HermitianForm) -> Result<Self> {
        if phi.dim() != psi.dim() {
            return Err(Error::Dimension { expected: phi.dim(), found: psi.dim() });
        }
        if phi.kind() != psi.kind() {
            return Err(Error::Invalid("forms of different scalar kinds".into()));
        }
        Ok(Self { phi, psi })
    }

    pub fn phi(&self) -> &HermitianForm {
        &self.phi
    }

    pub fn psi(&self) -> &HermitianForm {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn kind(&self) -> ScalarKind {
        self.phi.kind()
    }

    pub fn diagonalize(&self) -> Result<Diagonalization> {
        let (eigenvalues, basis) = linalg::pencil_eigen(self.phi.gram(), self.psi.gram())?;
        if eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Eigen("non-positive pencil eigenvalue".into()));
        }
        Ok(Diagonalization { eigenvalues, basis })
    }

    /// Slopes `mu_i = ln(lambda_i) / 2` of the pencil `(psi, phi)`.
    pub fn relative_spectrum(&self) -> Result<SlopeProfile> {
        let d = self.diagonalize()?;
        SlopeProfile::new(d.eigenvalues.iter().map(|l| 0.5 * l.ln()).collect())
    }

    /// `ln det(psi) / 2 - ln det(phi) / 2`.
    pub fn degree(&self) -> f64 {
        let a = linalg::log_det_hpd(self.psi.gram()).expect("validated form");
        let b = linalg::log_det_hpd(self.phi.gram()).expect("validated form");
        0.5 * (a - b)
    }

    /// Cumulative eigenspaces of the pencil by descending eigenvalue.
    ///
    /// Eigenvalues closer than [`EIGEN_GAP`] (relative) share a step.
    pub fn hn_filtration(&self) -> Result<Flag> {
        let d = self.diagonalize()?;
        let r = self.dim();
        let mut steps = Vec::new();
        let mut step_slopes = Vec::new();
        let mut start = 0;
        while start < r {
            let mut end = start + 1;
            while end < r && d.eigenvalues[end - 1] - d.eigenvalues[end] <= EIGEN_GAP * d.eigenvalues[end - 1] {
                end += 1;
            }
            let mean = d.eigenvalues[start..end].iter().map(|l| 0.5 * l.ln()).sum::<f64>()
                / (end - start) as f64;
            steps.push(d.basis.columns(0, end).into_owned());
            step_slopes.push(mean);
            start = end;
        }
        Ok(Flag { steps, step_slopes })
    }

    pub fn polygon(&self) -> Result<Polygon> {
        Ok(self.relative_spectrum()?.polygon())
    }

    /// Both norms restricted to the column span of `w`.
    pub fn restrict(&self, w: &CMat) -> Result<HermitianPair> {
        HermitianPair::new(self.phi.restrict(w)?, self.psi.restrict(w)?)
    }

    /// Quotient norms on `V / span(w)`, expressed in the basis given by the
    /// images of [`HermitianPair::quotient_basis`].
    pub fn quotient(&self, w: &CMat) -> Result<HermitianPair> {
        let r = self.dim();
        if w.nrows() != r {
            return Err(Error::Dimension { expected: r, found: w.nrows() });
        }
        if w.ncols() == 0 || !linalg::has_full_column_rank(w) {
            return Err(Error::RankDeficient);
        }
        if w.ncols() == r {
            return Err(Error::Invalid("quotient by the whole space is zero".into()));
        }
        let u = linalg::orthogonal_complement(w);
        let full = linalg::hstack(w, &u);
        let k = w.ncols();
        let quo = |form: &HermitianForm| -> Result<HermitianForm> {
            let g = linalg::congruence(form.gram(), &full);
            let inv = linalg::inverse_hpd(&g)?;
            let block = inv.view((k, k), (r - k, r - k)).into_owned();
            HermitianForm::new(linalg::inverse_hpd(&block)?, form.kind())
        };
        HermitianPair::new(quo(&self.phi)?, quo(&self.psi)?)
    }

    /// Representatives in `V` of the quotient basis used by
    /// [`HermitianPair::quotient`]: an orthonormal basis of `span(w)^⊥`.
    pub fn quotient_basis(w: &CMat) -> CMat {
        linalg::orthogonal_complement(w)
    }

    /// `sum_i max(mu_i, a)` together with the diagonal surrogate of
    /// `max(||.||_psi, e^a ||.||_phi)`.
    pub fn truncated_degree(&self, a: f64) -> Result<Truncation> {
        let d = self.diagonalize()?;
        let floor = (2.0 * a).exp();
        let value = d.eigenvalues.iter().map(|l| (0.5 * l.ln()).max(a)).sum();
        // In coordinates y = E^{-1} x the surrogate is diag(max(lambda_i, e^{2a})),
        // and E^{-1} = E^* phi.
        let left = self.phi.gram() * &d.basis;
        let mut scaled = left.clone();
        for (j, l) in d.eigenvalues.iter().enumerate() {
            let m = C64::new(l.max(floor), 0.0);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= m);
        }
        let gram = linalg::hermitian_part(&(scaled * left.adjoint()));
        Ok(Truncation { value, surrogate: HermitianForm::new(gram, self.kind())? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn pair(phi: DMatrix<f64>, psi: DMatrix<f64>) -> HermitianPair {
        HermitianPair::new(HermitianForm::real(&phi).unwrap(), HermitianForm::real(&psi).unwrap()).unwrap()
    }

    fn sample() -> HermitianPair {
        pair(DMatrix::identity(2, 2), dmatrix![2.0, 1.0; 1.0, 2.0])
    }

    /// Roots of the characteristic polynomial of a symmetric 2x2 matrix.
    fn roots_2x2(a: f64, b: f64, d: f64) -> (f64, f64) {
        let tr = a + d;
        let det = a * d - b * b;
        let disc = (tr * tr - 4.0 * det).sqrt();
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }

    #[test]
    fn spectrum_of_sample_matches_characteristic_roots() {
        let (l1, l2) = roots_2x2(2.0, 1.0, 2.0);
        let s = sample().relative_spectrum().unwrap();
        assert!((s.slopes()[0] - 0.5 * l1.ln()).abs() < 1e-14);
        assert!((s.slopes()[1] - 0.5 * l2.ln()).abs() < 1e-14);
        assert!((s.slopes()[0] - 0.5 * 3f64.ln()).abs() < 1e-14);
        assert!(s.slopes()[1].abs() < 1e-14);
    }

    #[test]
    fn trivial_spectra() {
        let id = DMatrix::<f64>::identity(2, 2);
        let s = pair(id.clone(), id.clone()).relative_spectrum().unwrap();
        assert!(s.slopes().iter().all(|x| x.abs() < 1e-14));
        let c = 0.7;
        let p = pair(id.clone(), id.clone() * (2.0 * c).exp());
        assert!(p.relative_spectrum().unwrap().slopes().iter().all(|x| (x - c).abs() < 1e-14));
        assert!((p.degree() - 2.0 * c).abs() < 1e-14);
    }

    #[test]
    fn degree_of_sample() {
        let p = sample();
        assert!((p.degree() - 0.5 * 3f64.ln()).abs() < 1e-14);
        assert!((p.degree() - p.relative_spectrum().unwrap().degree()).abs() < 1e-14);
    }

    #[test]
    fn flags() {
        let id = DMatrix::<f64>::identity(2, 2);
        let f = pair(id.clone(), id.clone() * 3.0).hn_filtration().unwrap();
        assert_eq!(f.ranks(), [2]);

        let f = pair(id.clone(), dmatrix![1f64.exp().powi(2), 0.0; 0.0, 1.0]).hn_filtration().unwrap();
        assert_eq!(f.ranks(), [1, 2]);
        assert!((f.step_slopes()[0] - 1.0).abs() < 1e-14 && f.step_slopes()[1].abs() < 1e-14);
        let v = &f.steps()[0];
        assert!(v[(1, 0)].norm() < 1e-14 && v[(0, 0)].norm() > 0.5);

        let f = sample().hn_filtration().unwrap();
        let v = &f.steps()[0];
        // Eigenvector of [[2,1],[1,2]] for eigenvalue 3 is (1,1).
        assert!((v[(0, 0)] - v[(1, 0)]).norm() < 1e-12);
        assert!(v[(0, 0)].norm() > 0.1);
    }

    #[test]
    fn polygons() {
        let id = DMatrix::<f64>::identity(2, 2);
        let c = 0.4;
        let p = pair(id.clone(), id.clone() * (2.0 * c).exp()).polygon().unwrap();
        for (i, b) in p.breakpoints().iter().enumerate() {
            assert!((b - c * i as f64).abs() < 1e-14);
        }
        let p = pair(id.clone(), dmatrix![1f64.exp().powi(2), 0.0; 0.0, 1.0]).polygon().unwrap();
        assert!((p.breakpoints()[1] - 1.0).abs() < 1e-14 && (p.breakpoints()[2] - 1.0).abs() < 1e-14);
        let p = sample().polygon().unwrap();
        let h = 0.5 * 3f64.ln();
        assert!((p.breakpoints()[1] - h).abs() < 1e-14 && (p.breakpoints()[2] - h).abs() < 1e-14);
    }

    #[test]
    fn restriction_and_quotient() {
        let p = sample();
        let w = CMat::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let sub = p.restrict(&w).unwrap();
        assert!((sub.degree() - 0.5 * 2f64.ln()).abs() < 1e-14);
        let quo = p.quotient(&w).unwrap();
        // psi restricted to span(e1) is 2; the quotient Gram is 2 - 1/2.
        assert!((quo.degree() - 0.5 * 1.5f64.ln()).abs() < 1e-14);
        assert!((sub.degree() + quo.degree() - p.degree()).abs() < 1e-14);

        let whole = p.restrict(&CMat::identity(2, 2)).unwrap();
        assert!((whole.degree() - p.degree()).abs() < 1e-14);
        assert!(matches!(p.quotient(&CMat::identity(2, 2)), Err(Error::Invalid(_))));
        let bad = CMat::from_column_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!(p.restrict(&bad), Err(Error::RankDeficient));
    }

    #[test]
    fn truncation_examples() {
        let p = pair(DMatrix::identity(2, 2), dmatrix![1f64.exp().powi(2), 0.0; 0.0, 1.0]);
        assert!((p.truncated_degree(0.5).unwrap().value - 1.5).abs() < 1e-14);
        assert!((p.truncated_degree(-3.0).unwrap().value - p.degree()).abs() < 1e-14);
        assert!((p.truncated_degree(2.0).unwrap().value - 4.0).abs() < 1e-14);
        let t = p.truncated_degree(0.5).unwrap();
        let g = t.surrogate.gram();
        assert!((g[(0, 0)].re - 2f64.exp()).abs() < 1e-12 && (g[(1, 1)].re - 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_forms() {
        assert!(matches!(HermitianForm::real(&dmatrix![1.0, 2.0; 0.0, 1.0]), Err(Error::NotHermitian(_))));
        assert_eq!(HermitianForm::real(&dmatrix![1.0, 2.0; 2.0, 1.0]), Err(Error::NotPositiveDefinite));
        assert_eq!(HermitianForm::real(&dmatrix![0.0, 0.0; 0.0, 1.0]), Err(Error::NotPositiveDefinite));
    }
}

//! General archimedean norms as maxima of linear functionals and Hermitian
//! forms, with John/Löwner Hermitian surrogates.

mod bands;
mod design;
mod ellipsoid;

use alloc::boxed::Box;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianForm, ScalarKind};
use crate::linalg::{self, CMat, CVec, C64};

pub use bands::{degree_band, distance_estimate, polygon_band, DegreeBand, ErrorBudget, Interval, MonteCarloVolume};
pub use design::DesignOptions;
pub use ellipsoid::{john_form, lowner_form, CertificateKind, EllipsoidOptions, SandwichCertificate};

/// A norm given by an expression over functional families and forms.
#[derive(Debug, Clone, PartialEq)]
pub enum NormOracle {
    /// `||x|| = max_j |l_j(x)|`, one covector `l_j` per row.
    Functionals { kind: ScalarKind, rows: CMat },
    /// `e^a ||x||_base`.
    Scaled { base: Box<NormOracle>, a: f64 },
    /// Pointwise maximum.
    Max(Box<NormOracle>, Box<NormOracle>),
    Hermitian(HermitianForm),
}

impl NormOracle {
    /// Functional family; rejected unless the rows span the dual space.
    pub fn functionals(kind: ScalarKind, rows: CMat) -> Result<Self> {
        if rows.nrows() == 0 || rows.ncols() == 0 {
            return Err(Error::Degenerate("empty functional family".into()));
        }
        if rows.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite functional entry".into()));
        }
        if kind == ScalarKind::Real && rows.iter().any(|z| z.im != 0.0) {
            return Err(Error::Invalid("real family with complex entries".into()));
        }
        // Judged after diagonal equilibration so that badly scaled coordinates
        // are not mistaken for missing directions.
        let total = rows.adjoint() * &rows;
        let d: Vec<f64> = (0..total.nrows()).map(|i| 1.0 / total[(i, i)].re.sqrt()).collect();
        let scaled = CMat::from_fn(total.nrows(), total.ncols(), |i, j| total[(i, j)] * (d[i] * d[j]));
        let (lo, hi) = linalg::eig_range(&scaled);
        if rows.nrows() < rows.ncols() || !d.iter().all(|x| x.is_finite()) || !(lo > 1e-12 * hi) {
            return Err(Error::Degenerate("functionals do not span the dual space".into()));
        }
        Ok(NormOracle::Functionals { kind, rows })
    }

    pub fn real_functionals(rows: &nalgebra::DMatrix<f64>) -> Result<Self> {
        Self::functionals(ScalarKind::Real, linalg::complexify(rows))
    }

    pub fn hermitian(form: HermitianForm) -> Self {
        NormOracle::Hermitian(form)
    }

    /// `e^a ||.||`.
    pub fn scaled(self, a: f64) -> Self {
        NormOracle::Scaled { base: Box::new(self), a }
    }

    /// `max(||.||_left, ||.||_right)`.
    pub fn max_combine(left: NormOracle, right: NormOracle) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::Dimension { expected: left.dim(), found: right.dim() });
        }
        if left.kind() != right.kind() {
            return Err(Error::Invalid("norms over different scalar kinds".into()));
        }
        Ok(NormOracle::Max(Box::new(left), Box::new(right)))
    }

    pub fn dim(&self) -> usize {
        match self {
            NormOracle::Functionals { rows, .. } => rows.ncols(),
            NormOracle::Scaled { base, .. } => base.dim(),
            NormOracle::Max(l, _) => l.dim(),
            NormOracle::Hermitian(f) => f.dim(),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            NormOracle::Functionals { kind, .. } => *kind,
            NormOracle::Scaled { base, .. } => base.kind(),
            NormOracle::Max(l, _) => l.kind(),
            NormOracle::Hermitian(f) => f.kind(),
        }
    }

    pub fn eval(&self, x: &CVec) -> f64 {
        match self {
            NormOracle::Functionals { rows, .. } => {
                (rows * x).iter().fold(0.0, |acc, &z| acc.max(linalg::cabs(z)))
            }
            NormOracle::Scaled { base, a } => a.exp() * base.eval(x),
            NormOracle::Max(l, r) => l.eval(x).max(r.eval(x)),
            NormOracle::Hermitian(f) => f.norm(x),
        }
    }

    /// The Hermitian form when the oracle is (a scaling of) a single form.
    pub fn as_hermitian(&self) -> Option<HermitianForm> {
        match self {
            NormOracle::Hermitian(f) => Some(f.clone()),
            NormOracle::Scaled { base, a } => base.as_hermitian().map(|f| f.scaled(*a)),
            _ => None,
        }
    }

    /// Flattens to `max_a ||x||_a` over functionals and forms.
    pub(crate) fn atoms(&self) -> design::Atoms {
        let r = self.dim();
        let mut rows: Vec<CVec> = Vec::new();
        let mut forms: Vec<CMat> = Vec::new();
        self.collect(0.0, &mut rows, &mut forms);
        let mut functionals = CMat::zeros(rows.len(), r);
        for (i, row) in rows.iter().enumerate() {
            functionals.set_row(i, &row.transpose());
        }
        design::Atoms { r, functionals, forms }
    }

    fn collect(&self, a: f64, rows: &mut Vec<CVec>, forms: &mut Vec<CMat>) {
        match self {
            NormOracle::Functionals { rows: m, .. } => {
                let f = a.exp();
                for i in 0..m.nrows() {
                    rows.push(m.row(i).transpose().map(|z| z * f));
                }
            }
            NormOracle::Scaled { base, a: b } => base.collect(a + b, rows, forms),
            NormOracle::Max(l, r) => {
                l.collect(a, rows, forms);
                r.collect(a, rows, forms);
            }
            NormOracle::Hermitian(h) => {
                let f = (2.0 * a).exp();
                forms.push(h.gram().map(|z| z * f));
            }
        }
    }

    /// Real covectors of a purely functional real oracle, if it is one.
    pub(crate) fn real_functional_rows(&self) -> Option<nalgebra::DMatrix<f64>> {
        if self.kind() != ScalarKind::Real {
            return None;
        }
        let atoms = self.atoms();
        if !atoms.forms.is_empty() {
            return None;
        }
        Some(atoms.functionals.map(|z: C64| z.re))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, DMatrix};

    fn square() -> NormOracle {
        NormOracle::real_functionals(&DMatrix::identity(2, 2)).unwrap()
    }

    fn disc() -> NormOracle {
        NormOracle::hermitian(HermitianForm::identity(2, ScalarKind::Real))
    }

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() < tol)
    }

    #[test]
    fn square_john_and_lowner() {
        let opts = EllipsoidOptions::default();
        let j = john_form(&square(), &opts).unwrap();
        assert!(close(j.form.gram(), &CMat::identity(2, 2), 1e-6));
        assert!(j.lower_factor >= 1.0 / 2f64.sqrt() - 1e-6);
        let l = lowner_form(&square(), &opts).unwrap();
        assert!(close(l.form.gram(), &(CMat::identity(2, 2) * C64::new(0.5, 0.0)), 1e-6));
        assert!(l.upper_factor <= 2f64.sqrt() + 1e-6);
    }

    #[test]
    fn single_functional_is_degenerate() {
        let rows = dmatrix![1.0, 2.0];
        assert!(matches!(NormOracle::real_functionals(&rows), Err(Error::Degenerate(_))));
    }

    #[test]
    fn hermitian_oracle_returns_its_form() {
        let form = HermitianForm::real(&dmatrix![2.0, 0.5; 0.5, 1.0]).unwrap();
        let n = NormOracle::hermitian(form.clone());
        let opts = EllipsoidOptions::default();
        for c in [john_form(&n, &opts).unwrap(), lowner_form(&n, &opts).unwrap()] {
            assert_eq!(c.form, form);
            assert_eq!((c.lower_factor, c.upper_factor), (1.0, 1.0));
        }
    }

    #[test]
    fn random_family_certificates_pass_audit() {
        let mut rng = crate::random::rng(7);
        let rows = crate::random::matrix(&mut rng, 12, 3, ScalarKind::Real);
        let n = NormOracle::functionals(ScalarKind::Real, rows).unwrap();
        let opts = EllipsoidOptions::default();
        let j = john_form(&n, &opts).unwrap();
        let l = lowner_form(&n, &opts).unwrap();
        assert!(j.checked_directions >= 1000 && l.checked_directions >= 1000);
        assert!(j.lower_factor >= 1.0 / 3f64.sqrt() * (1.0 - 1e-6));
        assert!(l.upper_factor <= 3f64.sqrt() * (1.0 + 1e-6));
    }

    #[test]
    fn max_of_two_forms() {
        let a = NormOracle::hermitian(HermitianForm::real(&dmatrix![4.0, 0.0; 0.0, 1.0]).unwrap());
        let b = NormOracle::hermitian(HermitianForm::real(&dmatrix![1.0, 0.0; 0.0, 4.0]).unwrap());
        let m = NormOracle::max_combine(a, b).unwrap();
        let j = john_form(&m, &EllipsoidOptions::default()).unwrap();
        assert!(j.lower_factor >= 1.0 / 2f64.sqrt() - 1e-9);
    }

    #[test]
    fn square_versus_disc_degree() {
        let opts = EllipsoidOptions::default();
        let band = degree_band(&square(), &disc(), &opts, 1_000_000).unwrap();
        let exact = (4.0 / core::f64::consts::PI).ln();
        assert!(band.band.contains(exact));
        assert!(band.certified.contains(exact));
        let mc = band.monte_carlo.unwrap();
        assert!((mc.estimate - exact).abs() < 5.0 * mc.std_error + 1e-3, "{mc:?}");

        let same = degree_band(&square(), &square(), &opts, 0).unwrap();
        assert!(same.band.contains(0.0));

        let c = 0.3;
        let shifted = degree_band(&square(), &disc().scaled(c), &opts, 0).unwrap();
        assert!((shifted.band.lo - band.band.lo - 2.0 * c).abs() < 1e-9);
        assert!((shifted.band.hi - band.band.hi - 2.0 * c).abs() < 1e-9);
    }

    #[test]
    fn square_versus_disc_distance_and_polygon() {
        let opts = EllipsoidOptions::default();
        let d = distance_estimate(&square(), &disc(), &opts).unwrap();
        let half_ln2 = 0.5 * 2f64.ln();
        assert!(d.lo <= half_ln2 + 1e-12 && half_ln2 <= d.hi, "{d:?}");
        assert!((d.lo - 0.5 * 2f64.ln()).abs() < 1e-9, "{d:?}");

        let (_, budget) = polygon_band(&square(), &disc(), &opts).unwrap();
        assert!(budget.additive <= 0.5 * 2f64.ln() + 1e-6);

        let same = distance_estimate(&square(), &square(), &opts).unwrap();
        assert_eq!(same.lo, 0.0);
        let a = 0.25;
        let scaled = distance_estimate(&square(), &square().scaled(a), &opts).unwrap();
        assert!((scaled.lo - a).abs() < 1e-12 && scaled.contains(a));
    }

    #[test]
    fn hermitian_polygon_band_has_zero_width() {
        let p = HermitianForm::real(&dmatrix![1.0, 0.0; 0.0, 1.0]).unwrap();
        let q = HermitianForm::real(&dmatrix![2.0, 1.0; 1.0, 2.0]).unwrap();
        let opts = EllipsoidOptions::default();
        let (poly, budget) =
            polygon_band(&NormOracle::hermitian(p.clone()), &NormOracle::hermitian(q.clone()), &opts).unwrap();
        assert_eq!(budget.additive, 0.0);
        let exact = crate::HermitianPair::new(p, q).unwrap().polygon().unwrap();
        assert_eq!(poly, exact);
    }

    #[test]
    fn large_complex_family_converges() {
        let mut rng = crate::random::rng(3);
        let rows = crate::random::matrix(&mut rng, 20_000, 30, ScalarKind::Complex);
        let n = NormOracle::functionals(ScalarKind::Complex, rows).unwrap();
        let j = john_form(&n, &EllipsoidOptions::default()).unwrap();
        std::println!("iterations {} gap {:e}", j.iterations, j.gap);
        assert!(j.lower_factor >= 1.0 / 30f64.sqrt() * (1.0 - 1e-6), "{}", j.iterations);
    }
}

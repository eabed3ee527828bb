use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::design::{self, Atoms, DesignOptions};
use super::NormOracle;
use crate::error::{Error, Result};
use crate::hermitian::HermitianForm;
use crate::linalg::{self, CMat, CVec, C64};
use crate::random;

const AUDIT_TOL: f64 = 1e-9;
const EXTREME_DIRECTIONS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    /// Inscribed ellipsoid: `lower ||x||_G <= ||x|| <= ||x||_G`.
    John,
    /// Enclosing ellipsoid: `||x||_G <= ||x|| <= upper ||x||_G`.
    Lowner,
}

/// Hermitian form sandwiching a norm: `lower ||x||_G <= ||x|| <= upper ||x||_G`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCertificate {
    pub kind: CertificateKind,
    pub form: HermitianForm,
    pub lower_factor: f64,
    pub upper_factor: f64,
    /// Directions on which the sandwich was re-evaluated.
    pub checked_directions: usize,
    /// Extreme values of `||x|| / ||x||_G` seen by the audit.
    pub observed_min: f64,
    pub observed_max: f64,
    pub iterations: usize,
    /// `max_a g_a / r - 1` at termination.
    pub gap: f64,
}

impl SandwichCertificate {
    /// `ln(upper / lower)`, a bound on the distance between the norm and
    /// the form after rescaling.
    pub fn log_spread(&self) -> f64 {
        (self.upper_factor / self.lower_factor).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidOptions {
    pub design: DesignOptions,
    /// Random directions used by the audit.
    pub audit_directions: usize,
    pub seed: u64,
    /// Largest number of candidate linear systems for exact vertex
    /// enumeration in [`lowner_form`].
    pub vertex_limit: u128,
}

impl Default for EllipsoidOptions {
    fn default() -> Self {
        Self {
            design: DesignOptions::default(),
            audit_directions: 1000,
            seed: 0x6f6b_7370,
            vertex_limit: 200_000,
        }
    }
}

/// `max_a` of `l S^{-1} l^*` over functionals and `lambda_max(S^{-1} H)` over forms.
fn certificate_leverage(atoms: &Atoms, s: &CMat) -> Result<f64> {
    let sinv = linalg::inverse_hpd(s)?;
    let mut g = atoms
        .functional_leverages(&sinv)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    for h in &atoms.forms {
        let (nu, _) = linalg::pencil_eigen(s, h)?;
        g = g.max(nu[0]);
    }
    Ok(g)
}

fn hermitian_certificate(norm: &NormOracle, kind: CertificateKind, opts: &EllipsoidOptions) -> Option<Result<SandwichCertificate>> {
    let form = norm.as_hermitian()?;
    let cert = SandwichCertificate {
        kind,
        form,
        lower_factor: 1.0,
        upper_factor: 1.0,
        checked_directions: 0,
        observed_min: 1.0,
        observed_max: 1.0,
        iterations: 0,
        gap: 0.0,
    };
    Some(audit(norm, cert, opts))
}

/// Inscribed (John-type) Hermitian surrogate from a D-optimal design `S`:
/// `G = g_max S` with `S^{-1}`-leverage `g_max <= r (1 + tol)`.
pub fn john_form(norm: &NormOracle, opts: &EllipsoidOptions) -> Result<SandwichCertificate> {
    if let Some(c) = hermitian_certificate(norm, CertificateKind::John, opts) {
        return c;
    }
    let atoms = norm.atoms();
    let des = design::d_optimal(&atoms, &opts.design)?;
    let gmax = certificate_leverage(&atoms, &des.s)?;
    let form = HermitianForm::new(des.s.map(|z| z * gmax), norm.kind())?;
    let cert = SandwichCertificate {
        kind: CertificateKind::John,
        form,
        lower_factor: 1.0 / gmax.sqrt(),
        upper_factor: 1.0,
        checked_directions: 0,
        observed_min: f64::INFINITY,
        observed_max: 0.0,
        iterations: des.iterations,
        gap: des.gap,
    };
    finish(norm, cert, des.converged, opts)
}

/// Enclosing (Löwner-type) Hermitian surrogate.
///
/// For real functional families with few candidate vertices the unit ball is
/// enumerated exactly and the surrogate is the approximate minimum-volume
/// ellipsoid of its vertices; otherwise the design form `S` itself is used.
pub fn lowner_form(norm: &NormOracle, opts: &EllipsoidOptions) -> Result<SandwichCertificate> {
    if let Some(c) = hermitian_certificate(norm, CertificateKind::Lowner, opts) {
        return c;
    }
    if let Some(rows) = norm.real_functional_rows() {
        if let Some(vertices) = polytope_vertices(&rows, opts.vertex_limit) {
            let r = rows.ncols();
            let mut pts = CMat::zeros(vertices.len(), r);
            for (i, v) in vertices.iter().enumerate() {
                pts.set_row(i, &linalg::complexify_vec(v).transpose());
            }
            let atoms = Atoms { r, functionals: pts, forms: Vec::new() };
            let des = design::d_optimal(&atoms, &opts.design)?;
            let gmax = certificate_leverage(&atoms, &des.s)?;
            let gram = linalg::inverse_hpd(&des.s.map(|z| z * gmax))?;
            let cert = SandwichCertificate {
                kind: CertificateKind::Lowner,
                form: HermitianForm::new(gram, norm.kind())?,
                lower_factor: 1.0,
                upper_factor: gmax.sqrt(),
                checked_directions: 0,
                observed_min: f64::INFINITY,
                observed_max: 0.0,
                iterations: des.iterations,
                gap: des.gap,
            };
            return finish(norm, cert, des.converged, opts);
        }
    }
    let atoms = norm.atoms();
    let des = design::d_optimal(&atoms, &opts.design)?;
    let gmax = certificate_leverage(&atoms, &des.s)?;
    let cert = SandwichCertificate {
        kind: CertificateKind::Lowner,
        form: HermitianForm::new(des.s.clone(), norm.kind())?,
        lower_factor: 1.0,
        upper_factor: gmax.sqrt(),
        checked_directions: 0,
        observed_min: f64::INFINITY,
        observed_max: 0.0,
        iterations: des.iterations,
        gap: des.gap,
    };
    finish(norm, cert, des.converged, opts)
}

fn finish(norm: &NormOracle, cert: SandwichCertificate, converged: bool, opts: &EllipsoidOptions) -> Result<SandwichCertificate> {
    let cert = audit(norm, cert, opts)?;
    if converged {
        Ok(cert)
    } else {
        Err(Error::NotConverged { iterations: cert.iterations, gap: cert.gap, best: Box::new(cert) })
    }
}

/// Re-evaluates the sandwich on every functional (via its leverage), on the
/// extreme direction of the most constraining functionals and forms, and on
/// random directions.
fn audit(norm: &NormOracle, mut cert: SandwichCertificate, opts: &EllipsoidOptions) -> Result<SandwichCertificate> {
    let g = cert.form.gram();
    let ginv = linalg::inverse_hpd(g)?;
    let atoms = norm.atoms();
    let up2 = cert.upper_factor * cert.upper_factor;
    let lev = atoms.functional_leverages(&ginv);
    if let Some(bad) = lev.iter().position(|&l| l > up2 * (1.0 + 2.0 * AUDIT_TOL)) {
        return Err(Error::Audit(format!(
            "functional {bad} has leverage {} above {}",
            lev[bad], up2
        )));
    }

    let mut dirs: Vec<CVec> = Vec::new();
    let mut order: Vec<usize> = (0..lev.len()).collect();
    order.sort_by(|&a, &b| lev[b].total_cmp(&lev[a]).then(a.cmp(&b)));
    for &a in order.iter().take(EXTREME_DIRECTIONS) {
        let lstar: CVec = atoms.functionals.row(a).transpose().map(|z: C64| z.conj());
        dirs.push(&ginv * lstar);
    }
    for h in &atoms.forms {
        let (_, vecs) = linalg::pencil_eigen(g, h)?;
        dirs.push(vecs.column(0).into_owned());
        dirs.push(vecs.column(vecs.ncols() - 1).into_owned());
    }
    let mut rng = random::rng(opts.seed);
    for _ in 0..opts.audit_directions {
        dirs.push(random::vector(&mut rng, norm.dim(), norm.kind()));
    }

    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for x in &dirs {
        let nf = cert.form.norm(x);
        if nf == 0.0 {
            continue;
        }
        let ratio = norm.eval(x) / nf;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    if lo < cert.lower_factor * (1.0 - AUDIT_TOL) || hi > cert.upper_factor * (1.0 + AUDIT_TOL) {
        return Err(Error::Audit(format!(
            "observed ratios [{lo}, {hi}] outside [{}, {}]",
            cert.lower_factor, cert.upper_factor
        )));
    }
    cert.checked_directions = dirs.len();
    cert.observed_min = lo;
    cert.observed_max = hi;
    Ok(cert)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Vertices (one per antipodal pair) of `{x : |l_j x| <= 1}` for real rows
/// `l_j`, or `None` when more than `limit` linear systems would be needed.
pub(crate) fn polytope_vertices(rows: &DMatrix<f64>, limit: u128) -> Option<Vec<DVector<f64>>> {
    let (m, r) = rows.shape();
    let work = binomial(m, r).saturating_mul(1u128 << (r - 1));
    if work > limit {
        return None;
    }
    let mut found: BTreeMap<Vec<i64>, DVector<f64>> = BTreeMap::new();
    let mut combo: Vec<usize> = (0..r).collect();
    loop {
        let a = DMatrix::from_fn(r, r, |i, j| rows[(combo[i], j)]);
        let scale: f64 = combo.iter().map(|&i| rows.row(i).norm()).product();
        let lu = a.clone().lu();
        if lu.determinant().abs() > 1e-12 * scale {
            for mask in 0..(1u64 << (r - 1)) {
                let b = DVector::from_fn(r, |i, _| {
                    if i > 0 && mask & (1 << (i - 1)) != 0 {
                        -1.0
                    } else {
                        1.0
                    }
                });
                let Some(x) = lu.solve(&b) else { continue };
                let feasible = (rows * &x).iter().all(|v| v.abs() <= 1.0 + 1e-9);
                if feasible {
                    let sign = x
                        .iter()
                        .find(|v| v.abs() > 1e-9)
                        .map_or(1.0, |v| v.signum());
                    let x = x * sign;
                    let key: Vec<i64> = x.iter().map(|v| (v * 1e8).round() as i64).collect();
                    found.entry(key).or_insert(x);
                }
            }
        }
        // Next combination in lexicographic order.
        let mut i = r;
        loop {
            if i == 0 {
                return Some(found.into_values().collect());
            }
            i -= 1;
            if combo[i] < m - r + i {
                combo[i] += 1;
                for j in i + 1..r {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

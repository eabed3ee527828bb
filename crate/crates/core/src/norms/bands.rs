use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::ellipsoid::{john_form, lowner_form, EllipsoidOptions, SandwichCertificate};
use super::NormOracle;
use crate::error::{Error, Result};
use crate::hermitian::{HermitianForm, HermitianPair, ScalarKind};
use crate::linalg::{self, CMat, CVec, C64};
use crate::random;
use crate::spectral::Polygon;

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Additive slack per unit of rank, with the name of its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBudget {
    pub additive: f64,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloVolume {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeBand {
    /// `[deg(phi_J, psi_L) - r ln r, deg(phi_L, psi_J) + r ln r]`.
    pub band: Interval,
    /// `[deg(phi_J, psi_L), deg(phi_L, psi_J)]`, which already contains the
    /// volume degree.
    pub certified: Interval,
    pub monte_carlo: Option<MonteCarloVolume>,
}

/// `ln det(b) / 2 - ln det(a) / 2`.
fn form_degree(a: &HermitianForm, b: &HermitianForm) -> Result<f64> {
    Ok(0.5 * (linalg::log_det_hpd(b.gram())? - linalg::log_det_hpd(a.gram())?))
}

fn same_space(a: &NormOracle, b: &NormOracle) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    if a.kind() != b.kind() {
        return Err(Error::Invalid("norms over different scalar kinds".into()));
    }
    Ok(())
}

/// Band containing the volume-ratio degree of `(phi, psi)`. With
/// `monte_carlo_samples > 0` and real dimension at most 4, a seeded Monte
/// Carlo estimate is attached.
pub fn degree_band(
    phi: &NormOracle,
    psi: &NormOracle,
    opts: &EllipsoidOptions,
    monte_carlo_samples: usize,
) -> Result<DegreeBand> {
    same_space(phi, psi)?;
    let r = phi.dim() as f64;
    let (pj, pl) = (john_form(phi, opts)?, lowner_form(phi, opts)?);
    let (qj, ql) = (john_form(psi, opts)?, lowner_form(psi, opts)?);
    let lo = form_degree(&pj.form, &ql.form)?;
    let hi = form_degree(&pl.form, &qj.form)?;
    let slack = r * r.ln();
    let real_dim = match phi.kind() {
        ScalarKind::Real => phi.dim(),
        ScalarKind::Complex => 2 * phi.dim(),
    };
    let monte_carlo = if monte_carlo_samples > 0 && real_dim <= 4 {
        Some(monte_carlo_degree(phi, &pl, psi, &ql, monte_carlo_samples, opts.seed))
    } else {
        None
    };
    Ok(DegreeBand {
        band: Interval::new(lo - slack, hi + slack),
        certified: Interval::new(lo, hi),
        monte_carlo,
    })
}

/// Fraction of the enclosing ellipsoid occupied by the unit ball.
fn ball_fraction<R: Rng>(norm: &NormOracle, enclosing: &HermitianForm, samples: usize, rng: &mut R) -> f64 {
    let r = norm.dim();
    let kind = norm.kind();
    let real_dim = match kind {
        ScalarKind::Real => r,
        ScalarKind::Complex => 2 * r,
    } as f64;
    let l = linalg::cholesky_lower(enclosing.gram()).expect("validated form");
    let mut hits = 0usize;
    for _ in 0..samples {
        let y = random::vector(rng, r, kind);
        let radius: f64 = rng.gen::<f64>().powf(1.0 / real_dim);
        let y = y.map(|z| z * (radius / y.norm()));
        let ym = CMat::from_column_slice(r, 1, y.as_slice());
        let x = linalg::solve_lower_adjoint(&l, &ym).expect("triangular solve");
        let x = CVec::from_column_slice(x.as_slice());
        if norm.eval(&x) <= 1.0 {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

fn monte_carlo_degree(
    phi: &NormOracle,
    phi_l: &SandwichCertificate,
    psi: &NormOracle,
    psi_l: &SandwichCertificate,
    samples: usize,
    seed: u64,
) -> MonteCarloVolume {
    let mut rng = random::rng(seed);
    let fp = ball_fraction(phi, &phi_l.form, samples, &mut rng);
    let fq = ball_fraction(psi, &psi_l.form, samples, &mut rng);
    let half = match phi.kind() {
        ScalarKind::Real => 0.5,
        ScalarKind::Complex => 1.0,
    };
    let ldp = linalg::log_det_hpd(phi_l.form.gram()).expect("validated form");
    let ldq = linalg::log_det_hpd(psi_l.form.gram()).expect("validated form");
    // ln vol(B) = ln f + ln vol(E) and vol(E) is proportional to det(G)^{-half}.
    let log_ratio = fp.ln() - fq.ln() - half * (ldp - ldq);
    let var = (1.0 - fp) / (samples as f64 * fp) + (1.0 - fq) / (samples as f64 * fq);
    let per_dim = match phi.kind() {
        ScalarKind::Real => 1.0,
        ScalarKind::Complex => 0.5,
    };
    MonteCarloVolume { estimate: per_dim * log_ratio, std_error: per_dim * var.sqrt(), samples }
}

/// Polygon of the John surrogates with the permitted additive band per unit
/// of `t`.
pub fn polygon_band(phi: &NormOracle, psi: &NormOracle, opts: &EllipsoidOptions) -> Result<(Polygon, ErrorBudget)> {
    same_space(phi, psi)?;
    let pj = john_form(phi, opts)?;
    let qj = john_form(psi, opts)?;
    let pair = HermitianPair::new(pj.form.clone(), qj.form.clone())?;
    let budget = ErrorBudget {
        additive: pj.log_spread() + qj.log_spread(),
        source: "john-certificates".into(),
    };
    Ok((pair.polygon()?, budget))
}

/// Interval containing `sup_x |ln(n1(x) / n2(x))|`.
///
/// The lower end is attained on explicit probe directions; the upper end
/// combines the extreme generalized eigenvalues of the John surrogates with
/// their certified factors.
pub fn distance_estimate(n1: &NormOracle, n2: &NormOracle, opts: &EllipsoidOptions) -> Result<Interval> {
    same_space(n1, n2)?;
    let c1 = john_form(n1, opts)?;
    let c2 = john_form(n2, opts)?;
    let (nu, vecs) = linalg::pencil_eigen(c1.form.gram(), c2.form.gram())?;
    let top = 0.5 * nu[0].ln();
    let bottom = 0.5 * nu[nu.len() - 1].ln();
    // n1 <= J1, n2 >= lower2 J2 and symmetrically.
    let upper = (-bottom - c2.lower_factor.ln()).max(top - c1.lower_factor.ln()).max(0.0);
    // Rounding allowance on the certified end.
    let upper = upper + 1e-12 * (1.0 + upper);

    let mut dirs: Vec<CVec> = Vec::new();
    dirs.push(vecs.column(0).into_owned());
    dirs.push(vecs.column(vecs.ncols() - 1).into_owned());
    for (norm, cert) in [(n1, &c1), (n2, &c2)] {
        let ginv = linalg::inverse_hpd(cert.form.gram())?;
        let atoms = norm.atoms();
        for a in 0..atoms.functionals.nrows().min(2048) {
            let lstar: CVec = atoms.functionals.row(a).transpose().map(|z: C64| z.conj());
            dirs.push(&ginv * lstar);
        }
        for h in &atoms.forms {
            let (_, v) = linalg::pencil_eigen(cert.form.gram(), h)?;
            dirs.push(v.column(0).into_owned());
            dirs.push(v.column(v.ncols() - 1).into_owned());
        }
        if let Some(rows) = norm.real_functional_rows() {
            if let Some(vertices) = super::ellipsoid::polytope_vertices(&rows, opts.vertex_limit) {
                dirs.extend(vertices.iter().map(linalg::complexify_vec));
            }
        }
    }
    let mut rng = random::rng(opts.seed ^ 0xd157);
    for _ in 0..opts.audit_directions {
        dirs.push(random::vector(&mut rng, n1.dim(), n1.kind()));
    }
    let lower = dirs
        .iter()
        .filter_map(|x| {
            let (a, b) = (n1.eval(x), n2.eval(x));
            (a > 0.0 && b > 0.0).then(|| (a / b).ln().abs())
        })
        .fold(0.0, f64::max);
    Ok(Interval::new(lower, upper.max(lower)))
}

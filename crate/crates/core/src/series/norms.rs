use alloc::vec::Vec;

use rand::Rng;

#[allow(unused_imports)]
use num_traits::Float;

use super::backend::Backend;
use super::grid::{QuadratureMeasure, SampleGrid};
use super::weight::MetricWeight;
use crate::error::{Error, Result};
use crate::hermitian::{HermitianForm, ScalarKind};
use crate::linalg::{self, cabs, CMat, CVec, C64};
use crate::norms::NormOracle;
use crate::random;

/// Relative change of monomial sup norms allowed under grid refinement.
pub const SUP_REFINEMENT_TOL: f64 = 1e-3;
/// Relative change of Gram entries allowed under quadrature refinement.
pub const L2_REFINEMENT_TOL: f64 = 1e-6;

/// Sup norm `||s|| = max_x |s(x)| e^{-n u(x)}` over a finite set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNorm {
    pub oracle: NormOracle,
    /// Sup norms of the basis monomials.
    pub monomial_norms: Vec<f64>,
    /// Largest relative change of a monomial norm on the refined grid.
    pub refinement_defect: f64,
    pub nodes: usize,
}

fn monomial_value(alpha: &[i64], n: usize, x: &[C64]) -> C64 {
    let head = n as i64 - alpha.iter().sum::<i64>();
    let mut v = x[0].powi(head as i32);
    for (j, &e) in alpha.iter().enumerate() {
        v *= x[j + 1].powi(e as i32);
    }
    v
}

/// Grid nodes plus, for every weight and basis monomial, the polished
/// maximizer of its pointwise norm.
fn sup_nodes(backend: &Backend, weights: &[&MetricWeight], grid: &SampleGrid) -> Vec<Vec<C64>> {
    let n = backend.n;
    let mut nodes: Vec<Vec<C64>> = grid.points().to_vec();
    for weight in weights {
        for alpha in backend.basis() {
            let f = |x: &[C64]| cabs(monomial_value(alpha, n, x)).ln() - n as f64 * weight.weight(x);
            let start = (0..grid.len())
                .max_by(|&i, &j| f(&grid.points()[i]).total_cmp(&f(&grid.points()[j])))
                .expect("non-empty grid");
            nodes.push(grid.polish(start, f).0);
        }
    }
    nodes
}

/// Rows `e^{-n u(x)} (x^α)_α`, one per node.
fn weighted_rows(backend: &Backend, weight: &MetricWeight, nodes: &[Vec<C64>], scale: Option<&[f64]>) -> CMat {
    let r = backend.rank();
    let mut rows = CMat::zeros(nodes.len(), r);
    for (q, x) in nodes.iter().enumerate() {
        let mut f = weight.factor(x, backend.n);
        if let Some(s) = scale {
            f *= s[q];
        }
        for (k, v) in backend.eval_monomials(x).into_iter().enumerate() {
            rows[(q, k)] = v * f;
        }
    }
    rows
}

fn column_maxima(rows: &CMat) -> Vec<f64> {
    (0..rows.ncols()).map(|k| rows.column(k).iter().fold(0.0, |m, &z| m.max(cabs(z)))).collect()
}

/// Sup norm on `H^0(O(n))` for the metric `weight`, accepted only when
/// doubling the grid resolution changes every monomial norm by less than
/// [`SUP_REFINEMENT_TOL`] relative.
pub fn sup_norm_oracle(backend: &Backend, weight: &MetricWeight, grid: &SampleGrid) -> Result<SupNorm> {
    Ok(sup_norm_oracles(backend, &[weight], grid)?.remove(0))
}

/// Sup norms for several metrics over one shared node set: the grid plus the
/// monomial maximizers of every metric. Metrics differing by a constant then
/// give proportional oracles.
pub fn sup_norm_oracles(backend: &Backend, weights: &[&MetricWeight], grid: &SampleGrid) -> Result<Vec<SupNorm>> {
    if grid.variety != backend.variety {
        return Err(Error::Invalid("grid and backend live on different varieties".into()));
    }
    let nodes = sup_nodes(backend, weights, grid);
    let fine = grid.refined();
    let fine_nodes = sup_nodes(backend, weights, &fine);
    let mut out = Vec::with_capacity(weights.len());
    for weight in weights {
        let rows = weighted_rows(backend, weight, &nodes, None);
        let monomial_norms = column_maxima(&rows);
        let fine_norms = column_maxima(&weighted_rows(backend, weight, &fine_nodes, None));
        let refinement_defect = monomial_norms
            .iter()
            .zip(&fine_norms)
            .map(|(a, b)| (a - b).abs() / b)
            .fold(0.0, f64::max);
        if !(refinement_defect < SUP_REFINEMENT_TOL) {
            return Err(Error::GridTooCoarse(alloc::format!(
                "monomial sup norms move by {refinement_defect:.2e} under refinement at level {}; densify beyond {} x {} nodes per chart",
                backend.n, grid.radial, grid.angular
            )));
        }
        let count = rows.nrows();
        let oracle = NormOracle::functionals(ScalarKind::Complex, rows)?;
        out.push(SupNorm { oracle, monomial_norms, refinement_defect, nodes: count });
    }
    Ok(out)
}

fn gram(backend: &Backend, weight: &MetricWeight, measure: &QuadratureMeasure) -> CMat {
    let sq: Vec<f64> = measure.weights().iter().map(|w| w.sqrt()).collect();
    let e = weighted_rows(backend, weight, measure.points(), Some(&sq));
    linalg::hermitian_part(&(e.adjoint() * e))
}

/// Gram matrix of the monomials for `∫ |s|^2 e^{-2 n u} dμ`, accepted only
/// when doubling the quadrature resolution moves every entry by less than
/// [`L2_REFINEMENT_TOL`] relative to the diagonal.
pub fn l2_gram(backend: &Backend, weight: &MetricWeight, measure: &QuadratureMeasure) -> Result<HermitianForm> {
    if measure.variety != backend.variety {
        return Err(Error::Invalid("measure and backend live on different varieties".into()));
    }
    let g = gram(backend, weight, measure);
    let fine = gram(backend, weight, &measure.refined()?);
    let r = backend.rank();
    let mut worst: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let scale = (fine[(i, i)].re * fine[(j, j)].re).sqrt();
            worst = worst.max(cabs(g[(i, j)] - fine[(i, j)]) / scale);
        }
    }
    if !(worst < L2_REFINEMENT_TOL) {
        return Err(Error::Resolution(alloc::format!(
            "Gram entries move by {worst:.2e} under refinement at level {}",
            backend.n
        )));
    }
    HermitianForm::complex(g).map_err(|_| Error::Resolution("Gram matrix is not positive definite".into()))
}

/// Outcome of [`submultiplicativity_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubmultiplicativityAudit {
    pub checked: usize,
    /// Largest `ln ||s t|| - ln ||s|| - ln ||t||` seen.
    pub max_excess: f64,
    pub slack: f64,
}

impl SubmultiplicativityAudit {
    pub fn passed(&self) -> bool {
        self.max_excess <= self.slack
    }
}

/// Product of sections given by monomial coordinates at levels `n` and `m`.
pub fn multiply(a: &Backend, s: &CVec, b: &Backend, t: &CVec) -> (Backend, CVec) {
    let target = Backend::new(a.variety, a.n + b.n);
    let mut out = CVec::zeros(target.rank());
    for (i, ea) in a.basis().iter().enumerate() {
        for (j, eb) in b.basis().iter().enumerate() {
            let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            out[target.index_of(&e).expect("sum of exponents")] += s[i] * t[j];
        }
    }
    (target, out)
}

/// Checks `||s t||_{n+m} ≤ ||s||_n ||t||_m` for sup norms on random section
/// pairs, all three norms taken over the same grid.
pub fn submultiplicativity_audit(
    weight: &MetricWeight,
    grid: &SampleGrid,
    n: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> SubmultiplicativityAudit {
    let variety = grid.variety;
    let (bn, bm) = (Backend::new(variety, n), Backend::new(variety, m));
    let bnm = Backend::new(variety, n + m);
    let (rn, rm, rnm) = (
        weighted_rows(&bn, weight, grid.points(), None),
        weighted_rows(&bm, weight, grid.points(), None),
        weighted_rows(&bnm, weight, grid.points(), None),
    );
    let sup = |rows: &CMat, x: &CVec| (rows * x).iter().fold(0.0, |acc: f64, &z| acc.max(cabs(z)));
    let mut rng = random::rng(seed);
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..samples {
        let s = random::vector(&mut rng, bn.rank(), ScalarKind::Complex);
        // Occasional monomial factors probe the extreme pairs.
        let t = if rng.gen_bool(0.25) {
            let mut t = CVec::zeros(bm.rank());
            t[rng.gen_range(0..bm.rank())] = C64::new(1.0, 0.0);
            t
        } else {
            random::vector(&mut rng, bm.rank(), ScalarKind::Complex)
        };
        let (_, st) = multiply(&bn, &s, &bm, &t);
        let excess = sup(&rnm, &st).ln() - sup(&rn, &s).ln() - sup(&rm, &t).ln();
        max_excess = max_excess.max(excess);
    }
    SubmultiplicativityAudit { checked: samples, max_excess, slack: 1e-8 }
}

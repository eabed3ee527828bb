//! Convergence diagnostics for sequences of slope laws.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::spectral::SpectralMeasure;

/// `E[max(Z, a)]`.
pub fn truncated_mean(m: &SpectralMeasure, a: f64) -> f64 {
    m.truncated_mean(a)
}

/// `sup_t |F_1(t) - F_2(t)|` for the distribution functions of two discrete laws.
pub fn kolmogorov(m1: &SpectralMeasure, m2: &SpectralMeasure) -> f64 {
    // Both CDFs are right-continuous steps, so the supremum sits on an atom.
    m1.atoms()
        .iter()
        .chain(m2.atoms())
        .map(|&(x, _)| (m1.cdf(x) - m2.cdf(x)).abs())
        .fold(0.0, f64::max)
        .min(1.0)
}

/// Kolmogorov distance from a discrete law to a continuous distribution
/// function, exact because the supremum is approached at the atoms.
pub fn kolmogorov_to_cdf(m: &SpectralMeasure, cdf: &impl Fn(f64) -> f64, _grid: &[f64]) -> f64 {
    m.atoms()
        .iter()
        .map(|&(x, _)| {
            let c = cdf(x);
            (m.cdf(x) - c).abs().max((m.cdf_left(x) - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov distance from a law to a distribution function known on grid
/// points only.
pub fn kolmogorov_to_grid(m: &SpectralMeasure, t: &[f64], cdf: &[f64]) -> f64 {
    t.iter().zip(cdf).map(|(&x, &c)| (m.cdf(x) - c).abs()).fold(0.0, f64::max)
}

/// `A(r) = 2 ln r + ln(2) / 2`.
pub fn cauchy_budget(r: usize) -> f64 {
    2.0 * (r.max(1) as f64).ln() + 0.5 * 2f64.ln()
}

/// `points` equispaced values on `[-M, M]` with `M = bound + 1`.
pub fn a_grid(bound: f64, points: usize) -> Vec<f64> {
    let m = bound + 1.0;
    let k = points.max(2);
    (0..k).map(|i| -m + 2.0 * m * i as f64 / (k - 1) as f64).collect()
}

/// 64 points spanning `[-M, M]` with `M = bound + 1`.
pub fn default_a_grid(bound: f64) -> Vec<f64> {
    a_grid(bound, 64)
}

/// Uniform distance between the normalized polygons `t ↦ ∫_0^t Q(1-s) ds`.
pub fn polygon_distance(m1: &SpectralMeasure, m2: &SpectralMeasure) -> f64 {
    // Both polygons are piecewise linear with breaks at cumulative masses.
    let mut breaks: Vec<f64> = Vec::new();
    for m in [m1, m2] {
        let mut acc = 0.0;
        breaks.push(0.0);
        for &(_, w) in m.atoms().iter().rev() {
            acc += w;
            breaks.push(acc.min(1.0));
        }
    }
    breaks.push(1.0);
    breaks.iter().map(|&t| (m1.polygon_at(t) - m2.polygon_at(t)).abs()).fold(0.0, f64::max)
}

/// The law of normalized slopes at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLaw {
    pub n: usize,
    pub rank: usize,
    pub law: SpectralMeasure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceOptions {
    /// Relative tolerance on Cauchy increments.
    pub tolerance: f64,
    /// Number of trailing increments that must pass.
    pub window: usize,
    /// Laws must stay within `[-bound, bound]` when given.
    pub bound: Option<f64>,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self { tolerance: 5e-2, window: 3, bound: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<usize>,
    /// `μ̂(V_n) / n`, the mean of each law.
    pub mean_slopes: Vec<f64>,
    pub a_grid: Vec<f64>,
    /// `truncated_means[k][j] = E[max(Z_{n_k}, a_j)]`.
    pub truncated_means: Vec<Vec<f64>>,
    /// Kolmogorov distance between consecutive laws.
    pub kolmogorov_steps: Vec<f64>,
    /// Uniform distance between consecutive normalized polygons.
    pub polygon_steps: Vec<f64>,
    /// Largest truncated-mean change over the a-grid between consecutive levels.
    pub cauchy_increments: Vec<f64>,
    /// `A(r_n) / n` for each level.
    pub budgets: Vec<f64>,
    /// Richardson extrapolation in `1/n` of the truncated means.
    pub extrapolated_means: Vec<f64>,
    /// Distribution function at the midpoints of the a-grid, from differences
    /// of the extrapolated truncated means.
    pub extrapolated_cdf: Vec<(f64, f64)>,
    /// Richardson extrapolation of the mean slopes.
    pub energy_estimate: f64,
    pub converged: bool,
    pub note: String,
}

fn richardson(n1: usize, v1: f64, n2: usize, v2: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    (b * v2 - a * v1) / (b - a)
}

/// Cauchy diagnostic for a sequence of laws sorted by increasing `n`.
pub fn convergence_report(laws: &[LevelLaw], a_grid: &[f64], opts: &ConvergenceOptions) -> Result<ConvergenceReport> {
    if laws.is_empty() {
        return Err(Error::Invalid("no levels".into()));
    }
    if laws.windows(2).any(|w| w[0].n >= w[1].n) {
        return Err(Error::Invalid("levels must increase".into()));
    }
    if let Some(b) = opts.bound {
        for l in laws {
            let worst = l.law.min().abs().max(l.law.max().abs());
            if worst > b * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::Unbounded(alloc::format!(
                    "level {} has |Z_n| = {worst:.6} beyond sup_x d(φ(x), ψ(x)) = {b:.6}",
                    l.n
                )));
            }
        }
    }
    let levels: Vec<usize> = laws.iter().map(|l| l.n).collect();
    let mean_slopes: Vec<f64> = laws.iter().map(|l| l.law.mean()).collect();
    let truncated_means: Vec<Vec<f64>> =
        laws.iter().map(|l| a_grid.iter().map(|&a| l.law.truncated_mean(a)).collect()).collect();
    let kolmogorov_steps = laws.windows(2).map(|w| kolmogorov(&w[0].law, &w[1].law)).collect();
    let polygon_steps = laws.windows(2).map(|w| polygon_distance(&w[0].law, &w[1].law)).collect();
    let cauchy_increments: Vec<f64> = truncated_means
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    let budgets: Vec<f64> = laws.iter().map(|l| cauchy_budget(l.rank) / l.n as f64).collect();

    let k = laws.len();
    let (extrapolated_means, energy_estimate) = if k >= 2 {
        let (n1, n2) = (levels[k - 2], levels[k - 1]);
        let ext = truncated_means[k - 2]
            .iter()
            .zip(&truncated_means[k - 1])
            .map(|(&v1, &v2)| richardson(n1, v1, n2, v2))
            .collect();
        (ext, richardson(n1, mean_slopes[k - 2], n2, mean_slopes[k - 1]))
    } else {
        (truncated_means[0].clone(), mean_slopes[0])
    };
    let mut extrapolated_cdf = Vec::new();
    let mut running: f64 = 0.0;
    for j in 1..a_grid.len() {
        let slope = (extrapolated_means[j] - extrapolated_means[j - 1]) / (a_grid[j] - a_grid[j - 1]);
        running = running.max(slope.clamp(0.0, 1.0));
        extrapolated_cdf.push((0.5 * (a_grid[j] + a_grid[j - 1]), running));
    }

    let window = opts.window.min(cauchy_increments.len());
    let converged = window > 0
        && (k - 1 - window..k - 1).all(|i| {
            let scale = truncated_means[i + 1].iter().fold(1.0f64, |s, v| s.max(v.abs()));
            cauchy_increments[i] <= opts.tolerance * scale + budgets[i + 1]
        })
        || k == 1;
    let note = if k == 1 {
        "single level: nothing to compare".into()
    } else if window < opts.window {
        alloc::format!("only {window} increments available")
    } else {
        String::new()
    };
    Ok(ConvergenceReport {
        levels,
        mean_slopes,
        a_grid: a_grid.to_vec(),
        truncated_means,
        kolmogorov_steps,
        polygon_steps,
        cauchy_increments,
        budgets,
        extrapolated_means,
        extrapolated_cdf,
        energy_estimate,
        converged,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn truncated_means_of_small_laws() {
        let d0 = SpectralMeasure::dirac(0.0);
        assert_eq!(truncated_mean(&d0, -1.0), 0.0);
        assert_eq!(truncated_mean(&d0, 0.5), 0.5);
        assert_eq!(truncated_mean(&SpectralMeasure::uniform(&[1.0, 0.0]), 0.5), 0.75);
    }

    #[test]
    fn kolmogorov_distances() {
        let u = SpectralMeasure::uniform(&[0.0, 1.0, 2.0]);
        assert_eq!(kolmogorov(&u, &u), 0.0);
        assert_eq!(kolmogorov(&SpectralMeasure::dirac(0.0), &SpectralMeasure::dirac(1.0)), 1.0);
        // Uniform on {-i/40} against uniform[-1, 0]; brute force over a fine grid.
        let pts: Vec<f64> = (0..40).map(|i| -(i as f64) / 40.0).collect();
        let m = SpectralMeasure::uniform(&pts);
        let cdf = |x: f64| (x + 1.0).clamp(0.0, 1.0);
        let k = kolmogorov_to_cdf(&m, &cdf, &[]);
        let brute = (0..=400_000)
            .map(|i| {
                let x = -1.2 + 1.4 * i as f64 / 400_000.0;
                (m.cdf(x) - cdf(x)).abs()
            })
            .fold(0.0, f64::max);
        assert!((k - brute).abs() < 1e-5 && k >= brute);
        assert!((k - 1.0 / 40.0).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence_converges_immediately() {
        let laws: Vec<LevelLaw> =
            [5, 10, 20, 40].iter().map(|&n| LevelLaw { n, rank: n + 1, law: SpectralMeasure::dirac(0.3) }).collect();
        let grid = default_a_grid(1.0);
        let r = convergence_report(&laws, &grid, &ConvergenceOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.kolmogorov_steps.iter().all(|&k| k == 0.0));
        assert!((r.energy_estimate - 0.3).abs() < 1e-12);
        // The reconstructed law is the Dirac mass at 0.3 up to the grid step.
        for &(a, c) in &r.extrapolated_cdf {
            if a < 0.3 - 0.07 {
                assert!(c < 1e-12);
            } else if a > 0.3 + 0.07 {
                assert!((c - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unbounded_laws_are_rejected() {
        let laws = vec![LevelLaw { n: 1, rank: 2, law: SpectralMeasure::uniform(&[0.0, 3.0]) }];
        let opts = ConvergenceOptions { bound: Some(1.0), ..Default::default() };
        assert!(matches!(convergence_report(&laws, &[0.0], &opts), Err(Error::Unbounded(_))));
    }

    #[test]
    fn truncated_means_are_monotone_and_lipschitz() {
        let m = SpectralMeasure::uniform(&[-0.8, -0.1, 0.0, 0.4, 0.45]);
        let grid = default_a_grid(1.0);
        let v: Vec<f64> = grid.iter().map(|&a| truncated_mean(&m, a)).collect();
        for (w, g) in v.windows(2).zip(grid.windows(2)) {
            assert!(w[1] >= w[0] && w[1] - w[0] <= g[1] - g[0] + 1e-15);
        }
    }
}

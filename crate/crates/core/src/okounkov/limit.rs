use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::hull::{hull, ConvexBody, HPoint, Hull};
use super::semigroup::{Exp, SemigroupSample, ValueTable};
use crate::error::{Error, Result};
use crate::spectral::SpectralMeasure;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyOptions {
    /// Levels below `n_min` are ignored when forming hulls.
    pub n_min: usize,
    /// Number of nested super-level hulls used for `G` when `d ≥ 2`.
    pub quantile_levels: usize,
    /// Concavity slack for `vol^{1/d}` as a multiple of `1 / n_max`, relative to `vol(Δ)^{1/d}`.
    pub brunn_minkowski_factor: f64,
    pub seed: u64,
}

impl Default for BodyOptions {
    fn default() -> Self {
        Self { n_min: 1, quantile_levels: 512, brunn_minkowski_factor: 4.0, seed: 0x0b0d }
    }
}

#[derive(Debug, Clone)]
pub struct DeltaBody {
    pub body: ConvexBody,
    /// `(n, #Γ_n / n^d)` for every sampled level `n ≥ 1`.
    pub count_ratios: Vec<(usize, f64)>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn reduced(n: usize, a: &Exp) -> HPoint {
    let g = a.iter().fold(n as i64, |g, &x| gcd(g, x));
    HPoint::new(n as i64 / g, [a[0] / g, a[1] / g, a[2] / g])
}

/// Body spanned by `α / n` for `n_min ≤ n ≤ n_max`.
pub fn delta_body(sample: &SemigroupSample, opts: &BodyOptions) -> Result<DeltaBody> {
    let d = sample.dim();
    let mut pts = Vec::new();
    for n in opts.n_min.max(1)..=sample.n_max() {
        pts.extend(sample.level(n).iter().map(|a| reduced(n, a)));
    }
    pts.sort_unstable();
    pts.dedup();
    let body = ConvexBody::from_hull(&hull(&pts, d, opts.seed));
    let count_ratios = (1..=sample.n_max())
        .map(|n| (n, sample.level(n).len() as f64 / (n as f64).powi(d as i32)))
        .collect();
    Ok(DeltaBody { body, count_ratios })
}

/// Distinct points `α / n` with the best value of `Φ(n, α) / n` among their
/// representatives, sorted by decreasing value.
pub fn reduced_points(sample: &SemigroupSample, table: &ValueTable, n_min: usize) -> Vec<(HPoint, f64)> {
    let mut best: BTreeMap<HPoint, f64> = BTreeMap::new();
    for n in n_min.max(1)..=sample.n_max() {
        for (a, &v) in sample.level(n).iter().zip(table.level(n)) {
            let key = reduced(n, a);
            let x = v / n as f64;
            best.entry(key).and_modify(|b| *b = b.max(x)).or_insert(x);
        }
    }
    let mut out: Vec<(HPoint, f64)> = best.into_iter().collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// Estimate of `θ = lim sup_α Φ(n, α) / n` from the top quartile of levels.
pub fn theta(sample: &SemigroupSample, table: &ValueTable) -> f64 {
    let nm = sample.n_max();
    let start = (3 * nm).div_ceil(4).max(1);
    (start..=nm)
        .flat_map(|n| table.level(n).iter().map(move |&v| v / n as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Nested hulls of the super-level sets, grown along decreasing thresholds.
struct Sweep<'a> {
    points: &'a [(HPoint, f64)],
    dim: usize,
    seed: u64,
    taken: usize,
    hull: Hull,
}

impl<'a> Sweep<'a> {
    fn new(points: &'a [(HPoint, f64)], dim: usize, seed: u64) -> Self {
        Self { points, dim, seed, taken: 0, hull: hull(&[], dim, seed) }
    }

    /// Hull of the points with value `≥ t`; thresholds must not increase.
    fn advance(&mut self, t: f64) -> &Hull {
        let end = self.taken + self.points[self.taken..].iter().take_while(|p| p.1 >= t).count();
        if end > self.taken {
            let mut pts = self.hull.vertices.clone();
            pts.extend(self.points[self.taken..end].iter().map(|p| p.0));
            self.hull = hull(&pts, self.dim, self.seed);
            self.taken = end;
        }
        &self.hull
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrunnMinkowskiAudit {
    /// Largest violation of discrete concavity of `vol^{1/d}` below `θ`.
    pub max_defect: f64,
    pub tolerance: f64,
}

impl BrunnMinkowskiAudit {
    pub fn passed(&self) -> bool {
        self.max_defect <= self.tolerance
    }
}

/// `F(t) = vol(Δ(Γ_Φ^t)) / vol(Δ(Γ))` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredCdf {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub theta: f64,
    pub total_volume: f64,
    pub brunn_minkowski: BrunnMinkowskiAudit,
}

impl FilteredCdf {
    /// `P(Z ≤ t)` of the limit law, by inverting the survival grid
    /// (`1 - F` at grid points, left limits ignored).
    pub fn cdf(&self, t: f64) -> f64 {
        // F(t) = P(Z >= t); P(Z <= t) is approximated by 1 - F(next grid point above t).
        match self.t.iter().position(|&s| s > t) {
            Some(i) => 1.0 - self.f[i],
            None => 1.0,
        }
    }
}

/// Survival function of the limit law on `t_grid`. Membership uses the
/// inclusive rule `Φ(n, α) ≥ n t`; on a finite sample this equals the left
/// limit at every threshold.
pub fn filtered_cdf(
    sample: &SemigroupSample,
    table: &ValueTable,
    t_grid: &[f64],
    opts: &BodyOptions,
) -> Result<FilteredCdf> {
    let d = sample.dim();
    let points = reduced_points(sample, table, opts.n_min);
    if points.is_empty() {
        return Err(Error::Invalid("sample has no points above level zero".into()));
    }
    let all: Vec<HPoint> = points.iter().map(|p| p.0).collect();
    let total = hull(&all, d, opts.seed);
    if total.degenerate {
        return Err(Error::Degenerate("Δ(Γ) has empty interior on the sample".into()));
    }
    let total_volume = ConvexBody::from_hull(&total).volume;
    let mut order: Vec<usize> = (0..t_grid.len()).collect();
    order.sort_by(|&i, &j| t_grid[j].total_cmp(&t_grid[i]));
    let mut sweep = Sweep::new(&points, d, opts.seed);
    let mut f = vec![0.0; t_grid.len()];
    for &i in &order {
        let h = sweep.advance(t_grid[i]);
        f[i] = if h.degenerate { 0.0 } else { ConvexBody::from_hull(h).volume / total_volume };
    }
    let th = theta(sample, table);
    let brunn_minkowski = brunn_minkowski_audit(t_grid, &f, th, d, total_volume, sample.n_max(), opts);
    Ok(FilteredCdf { t: t_grid.to_vec(), f, theta: th, total_volume, brunn_minkowski })
}

fn brunn_minkowski_audit(
    t: &[f64],
    f: &[f64],
    theta: f64,
    d: usize,
    total: f64,
    n_max: usize,
    opts: &BodyOptions,
) -> BrunnMinkowskiAudit {
    let scale = total.powf(1.0 / d as f64);
    let mut pts: Vec<(f64, f64)> = t
        .iter()
        .zip(f)
        .filter(|(&s, &v)| s < theta && v > 0.0)
        .map(|(&s, &v)| (s, (v * total).powf(1.0 / d as f64)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let mut max_defect: f64 = 0.0;
    for w in pts.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let lam = (b.0 - a.0) / (c.0 - a.0);
        let chord = a.1 + lam * (c.1 - a.1);
        max_defect = max_defect.max(chord - b.1);
    }
    BrunnMinkowskiAudit { max_defect, tolerance: opts.brunn_minkowski_factor * scale / n_max as f64 }
}

/// Cell-centred regular grid on a box.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularGrid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub steps: usize,
}

impl RegularGrid {
    pub fn points(&self) -> Vec<Vec<f64>> {
        let d = self.lo.len();
        let total = self.steps.pow(d as u32);
        (0..total)
            .map(|mut idx| {
                (0..d)
                    .map(|k| {
                        let i = idx % self.steps;
                        idx /= self.steps;
                        self.lo[k] + (i as f64 + 0.5) * (self.hi[k] - self.lo[k]) / self.steps as f64
                    })
                    .collect()
            })
            .collect()
    }
}

/// `G_Φ(x) = sup{t : x ∈ Δ(Γ_Φ^t)}` on grid points; `None` outside `Δ(Γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    pub grid: RegularGrid,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<Option<f64>>,
    /// Largest midpoint concavity defect along grid axes, over interior triples.
    pub concavity_defect: f64,
}

impl GFunction {
    /// Fraction of defined grid points with `G ≥ t`.
    pub fn survival(&self, t: f64) -> f64 {
        let defined: Vec<f64> = self.values.iter().flatten().copied().collect();
        if defined.is_empty() {
            return 0.0;
        }
        defined.iter().filter(|&&g| g >= t).count() as f64 / defined.len() as f64
    }
}

/// Exact in `d = 1`; for `d ≥ 2` the value is the largest of
/// `opts.quantile_levels` thresholds whose hull contains the point, a lower
/// bound within one quantile step.
pub fn g_function(
    sample: &SemigroupSample,
    table: &ValueTable,
    grid: &RegularGrid,
    opts: &BodyOptions,
) -> Result<GFunction> {
    let d = sample.dim();
    if grid.lo.len() != d || grid.hi.len() != d {
        return Err(Error::Dimension { expected: d, found: grid.lo.len() });
    }
    let points = reduced_points(sample, table, opts.n_min);
    if points.is_empty() {
        return Err(Error::Invalid("sample has no points above level zero".into()));
    }
    let xs = grid.points();
    let tol = 1e-12;
    let values: Vec<Option<f64>> = if d == 1 {
        // Prefix hulls are intervals [lo_k, hi_k].
        let mut lo = Vec::with_capacity(points.len());
        let mut hi = Vec::with_capacity(points.len());
        let (mut l, mut h) = (f64::INFINITY, f64::NEG_INFINITY);
        for (p, _) in &points {
            let x = p.a[0] as f64 / p.n as f64;
            l = l.min(x);
            h = h.max(x);
            lo.push(l);
            hi.push(h);
        }
        xs.iter()
            .map(|x| {
                let x = x[0];
                // lo is non-increasing and hi non-decreasing, so membership is monotone in k.
                let k = lo.partition_point(|&l| l > x + tol).max(hi.partition_point(|&h| h < x - tol));
                (k < points.len()).then(|| points[k].1)
            })
            .collect()
    } else {
        let levels = opts.quantile_levels.max(1).min(points.len());
        let thresholds: Vec<f64> =
            (1..=levels).map(|j| points[(j * points.len()).div_ceil(levels) - 1].1).collect();
        let mut sweep = Sweep::new(&points, d, opts.seed);
        let bodies: Vec<ConvexBody> = thresholds.iter().map(|&t| ConvexBody::from_hull(sweep.advance(t))).collect();
        xs.iter()
            .map(|x| {
                let k = bodies.partition_point(|b| !b.contains(x, tol));
                (k < bodies.len()).then(|| thresholds[k])
            })
            .collect()
    };
    let concavity_defect = axis_concavity_defect(&values, grid.steps, d);
    Ok(GFunction { grid: grid.clone(), points: xs, values, concavity_defect })
}

fn axis_concavity_defect(values: &[Option<f64>], steps: usize, d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let stride = |k: usize| steps.pow(k as u32);
    for idx in 0..values.len() {
        for k in 0..d {
            let i = (idx / stride(k)) % steps;
            if i == 0 || i + 1 >= steps {
                continue;
            }
            let (a, b, c) = (values[idx - stride(k)], values[idx], values[idx + stride(k)]);
            if let (Some(a), Some(b), Some(c)) = (a, b, c) {
                worst = worst.max(0.5 * (a + c) - b);
            }
        }
    }
    worst
}

/// Uniform law of `Φ(n, α) / n` over `Γ_n`.
pub fn empirical_level_law(sample: &SemigroupSample, table: &ValueTable, n: usize) -> Result<SpectralMeasure> {
    if n == 0 || sample.level(n).is_empty() {
        return Err(Error::Invalid(alloc::format!("level {n} is empty")));
    }
    let values: Vec<f64> = table.level(n).iter().map(|&v| v / n as f64).collect();
    Ok(SpectralMeasure::uniform(&values))
}

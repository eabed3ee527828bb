use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use super::order::MonomialOrder;
use crate::error::{Error, Result};
use crate::random;

/// Largest supported dimension `d` of the exponents.
pub const MAX_DIM: usize = 3;

/// An exponent in `N^d`, zero-padded to [`MAX_DIM`] entries.
pub type Exp = [i64; MAX_DIM];

pub(crate) fn pack(a: &[i64]) -> Exp {
    let mut e = [0; MAX_DIM];
    e[..a.len()].copy_from_slice(a);
    e
}

fn add(a: &Exp, b: &Exp) -> Exp {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Finite part `Γ_0, ..., Γ_{n_max}` of a sub-semigroup of `N^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupSample {
    d: usize,
    levels: Vec<Vec<Exp>>,
}

impl SemigroupSample {
    /// `levels[n]` lists `Γ_n`; duplicates are removed.
    pub fn new(d: usize, levels: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::Invalid(alloc::format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if levels.is_empty() {
            return Err(Error::Invalid("empty sample".into()));
        }
        let mut packed = Vec::with_capacity(levels.len());
        for level in levels {
            let mut l = Vec::with_capacity(level.len());
            for a in level {
                if a.len() != d {
                    return Err(Error::Dimension { expected: d, found: a.len() });
                }
                if a.iter().any(|&x| x < 0) {
                    return Err(Error::Invalid("exponents must be non-negative".into()));
                }
                l.push(pack(&a));
            }
            l.sort_unstable();
            l.dedup();
            packed.push(l);
        }
        Ok(Self { d, levels: packed })
    }

    /// `Γ_n = {α : |α| ≤ n}`, the semigroup of the complete linear series of `O(1)` on `P^d`.
    pub fn full(d: usize, n_max: usize) -> Result<Self> {
        let levels = (0..=n_max).map(|n| simplex_points(d, n as i64)).collect();
        Self::new(d, levels)
    }

    /// Semigroup generated by `(n_i, α_i)` with `n_i ≥ 1`, truncated at `n_max`.
    pub fn generated(d: usize, generators: &[(usize, Vec<i64>)], n_max: usize) -> Result<Self> {
        if generators.iter().any(|(n, a)| *n == 0 || a.len() != d) {
            return Err(Error::Invalid("generators need level at least 1 and length d".into()));
        }
        let mut levels: Vec<Vec<Exp>> = vec![Vec::new(); n_max + 1];
        levels[0].push([0; MAX_DIM]);
        for n in 1..=n_max {
            let mut l = Vec::new();
            for (m, g) in generators {
                if *m <= n {
                    let g = pack(g);
                    l.extend(levels[n - m].iter().map(|a| add(a, &g)));
                }
            }
            l.sort_unstable();
            l.dedup();
            levels[n] = l;
        }
        Ok(Self { d, levels })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.levels.len() - 1
    }

    /// `Γ_n` as zero-padded exponents, sorted.
    pub fn level(&self, n: usize) -> &[Exp] {
        self.levels.get(n).map_or(&[], |l| l.as_slice())
    }

    pub fn contains(&self, n: usize, a: &Exp) -> bool {
        self.level(n).binary_search(a).is_ok()
    }

    pub(crate) fn index_of(&self, n: usize, a: &Exp) -> Option<usize> {
        self.level(n).binary_search(a).ok()
    }
}

pub(crate) fn simplex_points(d: usize, n: i64) -> Vec<Vec<i64>> {
    fn rec(d: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(d, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, n, &mut Vec::new(), &mut out);
    out
}

/// Values `Φ(n, α)` aligned with the levels of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    values: Vec<Vec<f64>>,
}

impl ValueTable {
    pub fn from_fn(sample: &SemigroupSample, mut f: impl FnMut(usize, &[i64]) -> f64) -> Self {
        let d = sample.dim();
        let values = (0..=sample.n_max())
            .map(|n| sample.level(n).iter().map(|a| f(n, &a[..d])).collect())
            .collect();
        Self { values }
    }

    /// `values[n][i]` belongs to the `i`-th element of `sample.level(n)`.
    pub fn new(sample: &SemigroupSample, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != sample.n_max() + 1 {
            return Err(Error::Dimension { expected: sample.n_max() + 1, found: values.len() });
        }
        for (n, v) in values.iter().enumerate() {
            if v.len() != sample.level(n).len() {
                return Err(Error::Dimension { expected: sample.level(n).len(), found: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid("table values must be finite".into()));
            }
        }
        Ok(Self { values })
    }

    pub fn level(&self, n: usize) -> &[f64] {
        self.values.get(n).map_or(&[], |l| l.as_slice())
    }

    pub fn get(&self, sample: &SemigroupSample, n: usize, a: &[i64]) -> Option<f64> {
        sample.index_of(n, &pack(a)).map(|i| self.values[n][i])
    }
}

/// A pair of elements `(n, α)`, `(m, β)` violating an audited property.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub n: usize,
    pub alpha: Vec<i64>,
    pub m: usize,
    pub beta: Vec<i64>,
    /// Amount by which superadditivity fails; zero for closure failures.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub checked: usize,
    pub exhaustive: bool,
    pub violation: Option<Violation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Limits for pair audits: every pair is checked when there are at most
/// `exhaustive_limit` of them, otherwise `samples` seeded pairs are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub exhaustive_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { exhaustive_limit: 2_000_000, samples: 200_000, seed: 0x5e31 }
    }
}

/// Visits in-range pairs `(n, i), (m, j)` with `1 ≤ n ≤ m`, `n + m ≤ n_max`
/// until `visit` returns a violation.
fn for_pairs(
    sample: &SemigroupSample,
    opts: &AuditOptions,
    mut visit: impl FnMut(usize, usize, usize, usize) -> Option<Violation>,
) -> AuditReport {
    let nm = sample.n_max();
    let mut total = 0usize;
    let mut ranges = Vec::new();
    for n in 1..=nm / 2 {
        for m in n..=nm - n {
            let c = sample.level(n).len() * sample.level(m).len();
            if c > 0 {
                ranges.push((n, m));
                total = total.saturating_add(c);
            }
        }
    }
    if total <= opts.exhaustive_limit {
        for &(n, m) in &ranges {
            for i in 0..sample.level(n).len() {
                for j in 0..sample.level(m).len() {
                    if let Some(v) = visit(n, i, m, j) {
                        return AuditReport { checked: total, exhaustive: true, violation: Some(v) };
                    }
                }
            }
        }
        return AuditReport { checked: total, exhaustive: true, violation: None };
    }
    let mut rng = random::rng(opts.seed);
    for _ in 0..opts.samples {
        let (n, m) = ranges[rng.gen_range(0..ranges.len())];
        let i = rng.gen_range(0..sample.level(n).len());
        let j = rng.gen_range(0..sample.level(m).len());
        if let Some(v) = visit(n, i, m, j) {
            return AuditReport { checked: opts.samples, exhaustive: false, violation: Some(v) };
        }
    }
    AuditReport { checked: opts.samples, exhaustive: false, violation: None }
}

/// Checks `α ∈ Γ_n, β ∈ Γ_m ⇒ α + β ∈ Γ_{n+m}` within the sampled range.
pub fn closure_audit(sample: &SemigroupSample, opts: &AuditOptions) -> AuditReport {
    let d = sample.dim();
    for_pairs(sample, opts, |n, i, m, j| {
        let (a, b) = (sample.level(n)[i], sample.level(m)[j]);
        (!sample.contains(n + m, &add(&a, &b))).then(|| Violation {
            n,
            alpha: a[..d].to_vec(),
            m,
            beta: b[..d].to_vec(),
            excess: 0.0,
        })
    })
}

/// Checks `Φ(n+m, α+β) ≥ Φ(n, α) + Φ(m, β) - tol` within the sampled range.
pub fn superadditivity_audit(
    sample: &SemigroupSample,
    table: &ValueTable,
    tol: f64,
    opts: &AuditOptions,
) -> AuditReport {
    let d = sample.dim();
    for_pairs(sample, opts, |n, i, m, j| {
        let (a, b) = (sample.level(n)[i], sample.level(m)[j]);
        let k = sample.index_of(n + m, &add(&a, &b))?;
        let excess = table.level(n)[i] + table.level(m)[j] - table.level(n + m)[k];
        (excess > tol).then(|| Violation { n, alpha: a[..d].to_vec(), m, beta: b[..d].to_vec(), excess })
    })
}

/// Observed status of the three standing conditions on a semigroup.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionsReport {
    /// Elements of `Γ_0`; condition (a) asks for exactly `{0}`.
    pub zero_level: Vec<Vec<i64>>,
    /// Smallest `K` with `Γ_n ⊂ n [0, K]^d` on the sample, so that the
    /// sample lies in the monoid generated by `{1} × {0..K}^d`.
    pub box_bound: i64,
    /// Invariant factors of the lattice generated by the sample in `Z^{d+1}`.
    pub invariant_factors: Vec<i64>,
    pub closure: AuditReport,
}

impl ConditionsReport {
    pub fn a(&self) -> bool {
        self.zero_level.len() == 1 && self.zero_level[0].iter().all(|&x| x == 0)
    }

    /// Consistency of condition (b): a finite sample is always bounded, so
    /// this fails only when level zero carries extra elements.
    pub fn b(&self) -> bool {
        self.zero_level.iter().all(|a| a.iter().all(|&x| x == 0))
    }

    pub fn c(&self, d: usize) -> bool {
        self.invariant_factors.len() == d + 1 && self.invariant_factors.iter().all(|&f| f == 1)
    }
}

pub fn conditions_check(sample: &SemigroupSample, opts: &AuditOptions) -> ConditionsReport {
    let d = sample.dim();
    let zero_level = sample.level(0).iter().map(|a| a[..d].to_vec()).collect();
    let mut box_bound = 0i64;
    for n in 1..=sample.n_max() {
        for a in sample.level(n) {
            let m = a[..d].iter().copied().max().unwrap_or(0);
            box_bound = box_bound.max((m + n as i64 - 1) / n as i64);
        }
    }
    let mut lattice = Lattice::new(d + 1);
    'outer: for n in 0..=sample.n_max() {
        for a in sample.level(n) {
            let mut v = [0i128; MAX_DIM + 1];
            v[0] = n as i128;
            for k in 0..d {
                v[k + 1] = a[k] as i128;
            }
            lattice.insert(v);
            if lattice.is_unimodular() {
                break 'outer;
            }
        }
    }
    ConditionsReport {
        zero_level,
        box_bound,
        invariant_factors: lattice.invariant_factors(),
        closure: closure_audit(sample, opts),
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    egcd(a, b).0
}

/// Hermite basis of a sublattice of `Z^k`, maintained under insertion.
struct Lattice {
    k: usize,
    rows: [Option<[i128; MAX_DIM + 1]>; MAX_DIM + 1],
}

impl Lattice {
    fn new(k: usize) -> Self {
        Self { k, rows: [None; MAX_DIM + 1] }
    }

    fn insert(&mut self, mut v: [i128; MAX_DIM + 1]) {
        for j in 0..self.k {
            if v[j] == 0 {
                continue;
            }
            match self.rows[j] {
                None => {
                    if v[j] < 0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    self.rows[j] = Some(v);
                    self.reduce();
                    return;
                }
                Some(b) => {
                    let (g, x, y) = egcd(b[j], v[j]);
                    let (bj, vj) = (b[j] / g, v[j] / g);
                    let mut nb = [0i128; MAX_DIM + 1];
                    let mut nv = [0i128; MAX_DIM + 1];
                    for c in 0..self.k {
                        nb[c] = x * b[c] + y * v[c];
                        nv[c] = bj * v[c] - vj * b[c];
                    }
                    if nb[j] < 0 {
                        nb.iter_mut().for_each(|x| *x = -*x);
                    }
                    self.rows[j] = Some(nb);
                    v = nv;
                }
            }
        }
        self.reduce();
    }

    /// Reduces entries above each pivot modulo the pivot.
    fn reduce(&mut self) {
        for j in (0..self.k).rev() {
            let Some(p) = self.rows[j] else { continue };
            for i in 0..j {
                if let Some(mut r) = self.rows[i] {
                    let q = r[j].div_euclid(p[j]);
                    if q != 0 {
                        for c in 0..self.k {
                            r[c] -= q * p[c];
                        }
                        self.rows[i] = Some(r);
                    }
                }
            }
        }
    }

    fn is_unimodular(&self) -> bool {
        (0..self.k).all(|j| self.rows[j].is_some_and(|r| r[j] == 1))
    }

    /// Invariant factors through gcds of minors.
    fn invariant_factors(&self) -> Vec<i64> {
        let rows: Vec<[i128; MAX_DIM + 1]> = self.rows[..self.k].iter().flatten().copied().collect();
        let r = rows.len();
        let mut divisors = vec![1i128];
        for size in 1..=r {
            let mut g = 0i128;
            for ri in subsets(r, size) {
                for ci in subsets(self.k, size) {
                    let m: Vec<Vec<i128>> = ri.iter().map(|&i| ci.iter().map(|&c| rows[i][c]).collect()).collect();
                    g = gcd(g, det(&m));
                }
            }
            if g == 0 {
                break;
            }
            divisors.push(g);
        }
        divisors.windows(2).map(|w| (w[1] / w[0]) as i64).collect()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Leading exponents of a space of sections.
///
/// Row `i` of `rows` holds the coefficients of a section on the monomials
/// `exponents`. The order-minimal exponent with a nonzero coefficient is taken
/// over all sections of the span; the distinct values are the pivot columns of
/// an echelon form that scans columns in increasing order. Returned ascending.
pub fn leading_exponents(rows: &[Vec<BigRational>], exponents: &[Vec<i64>], order: &MonomialOrder) -> Vec<Vec<i64>> {
    echelon_by_order(rows, exponents, order).into_iter().map(|(e, _)| e).collect()
}

/// Echelon form for [`leading_exponents`]: for every leading exponent, the
/// combination coefficients (over the input rows) of a section attaining it.
pub fn echelon_by_order(
    rows: &[Vec<BigRational>],
    exponents: &[Vec<i64>],
    order: &MonomialOrder,
) -> Vec<(Vec<i64>, Vec<BigRational>)> {
    let mut cols: Vec<usize> = (0..exponents.len()).collect();
    cols.sort_by(|&a, &b| order.compare(&exponents[a], &exponents[b]));
    let k = rows.len();
    let mut work: Vec<Vec<BigRational>> = rows.to_vec();
    let mut combos: Vec<Vec<BigRational>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { BigRational::from_integer(1.into()) } else { BigRational::zero() }).collect())
        .collect();
    let mut used = vec![false; k];
    let mut out = Vec::new();
    for &c in &cols {
        let Some(p) = (0..k).find(|&i| !used[i] && !work[i][c].is_zero()) else { continue };
        used[p] = true;
        let inv = BigRational::from_integer(1.into()) / &work[p][c];
        for i in 0..k {
            if used[i] || work[i][c].is_zero() {
                continue;
            }
            let f = &work[i][c] * &inv;
            let (wp, cp) = (work[p].clone(), combos[p].clone());
            for (x, y) in work[i].iter_mut().zip(&wp) {
                *x -= &f * y;
            }
            for (x, y) in combos[i].iter_mut().zip(&cp) {
                *x -= &f * y;
            }
        }
        out.push((exponents[c].clone(), combos[p].clone()));
    }
    out
}

//! Slope profiles, polygons and discrete laws.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Slopes `mu_1 >= ... >= mu_r` in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeProfile {
    slopes: Vec<f64>,
}

impl SlopeProfile {
    /// Sorts the given values in descending order.
    pub fn new(mut slopes: Vec<f64>) -> Result<Self> {
        if slopes.is_empty() {
            return Err(Error::Invalid("empty slope profile".into()));
        }
        if slopes.iter().any(|s| !s.is_finite()) {
            return Err(Error::Invalid("non-finite slope".into()));
        }
        slopes.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { slopes })
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    /// Sum of slopes.
    pub fn degree(&self) -> f64 {
        self.slopes.iter().sum()
    }

    /// Mean slope.
    pub fn mean(&self) -> f64 {
        self.degree() / self.len() as f64
    }

    pub fn polygon(&self) -> Polygon {
        Polygon::from_slopes(&self.slopes)
    }

    /// Uniform law on the slopes, each divided by `scale`.
    pub fn law(&self, scale: f64) -> SpectralMeasure {
        let values: Vec<f64> = self.slopes.iter().map(|s| s / scale).collect();
        SpectralMeasure::uniform(&values)
    }

    /// `sum_i max(mu_i, a)`.
    pub fn truncated_sum(&self, a: f64) -> f64 {
        self.slopes.iter().map(|&s| s.max(a)).sum()
    }
}

/// Concave piecewise-linear polygon with integer breakpoints `0..=r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    breakpoints: Vec<f64>,
}

impl Polygon {
    /// Polygon whose successive slopes are the given (descending) values.
    pub fn from_slopes(slopes: &[f64]) -> Self {
        let mut breakpoints = Vec::with_capacity(slopes.len() + 1);
        let mut acc = 0.0;
        breakpoints.push(0.0);
        for s in slopes {
            acc += s;
            breakpoints.push(acc);
        }
        Self { breakpoints }
    }

    pub fn rank(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Values `P~(0), ..., P~(r)`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn degree(&self) -> f64 {
        self.breakpoints[self.rank()]
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `P~(t)` for `t` in `[0, r]`, linear between breakpoints.
    pub fn eval(&self, t: f64) -> f64 {
        let r = self.rank();
        let t = t.clamp(0.0, r as f64);
        let i = (t as usize).min(r.saturating_sub(1));
        let frac = t - i as f64;
        if r == 0 {
            return 0.0;
        }
        self.breakpoints[i] + frac * (self.breakpoints[i + 1] - self.breakpoints[i])
    }

    /// Normalized polygon `P(t) = P~(t r) / r` for `t` in `[0, 1]`.
    pub fn normalized(&self, t: f64) -> f64 {
        let r = self.rank() as f64;
        self.eval(t * r) / r
    }

    /// Normalized values at `t = i / r`.
    pub fn normalized_values(&self) -> Vec<f64> {
        let r = self.rank() as f64;
        self.breakpoints.iter().map(|b| b / r).collect()
    }

    /// Largest second difference; concave polygons give a value `<= 0`.
    pub fn concavity_defect(&self) -> f64 {
        self.breakpoints
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Uniform distance between the normalized polygons on `[0, 1]`.
    pub fn normalized_distance(&self, other: &Polygon) -> f64 {
        let mut ts: Vec<f64> = (0..=self.rank())
            .map(|i| i as f64 / self.rank() as f64)
            .chain((0..=other.rank()).map(|i| i as f64 / other.rank() as f64))
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.iter()
            .map(|&t| (self.normalized(t) - other.normalized(t)).abs())
            .fold(0.0, f64::max)
    }

    /// Polygon shifted by `c * t`, i.e. every slope increased by `c`.
    pub fn tilted(&self, c: f64) -> Polygon {
        let breakpoints = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, b)| b + c * i as f64)
            .collect();
        Polygon { breakpoints }
    }
}

/// Finite probability law on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    /// Builds a law from `(value, mass)` pairs. Masses must be positive and
    /// sum to one within `1e-12`; equal values are merged.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("law without atoms".into()));
        }
        if atoms
            .iter()
            .any(|&(v, m)| !v.is_finite() || !m.is_finite() || m <= 0.0)
        {
            return Err(Error::Invalid("atoms need finite values and positive masses".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(alloc::format!("masses sum to {total}")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        Ok(Self { atoms: merged })
    }

    /// Uniform law on the given values (with multiplicity).
    pub fn uniform(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "uniform law needs at least one value");
        let m = 1.0 / values.len() as f64;
        let mut atoms: Vec<(f64, f64)> = values.iter().map(|&v| (v, m)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        Self { atoms: merged }
    }

    pub fn dirac(c: f64) -> Self {
        Self { atoms: alloc::vec![(c, 1.0)] }
    }

    /// Atoms sorted by ascending value.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, m)| v * m).sum()
    }

    pub fn min(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    /// `P(Z <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        let k = self.atoms.partition_point(|a| a.0 <= t);
        self.atoms[..k].iter().map(|a| a.1).sum::<f64>().min(1.0)
    }

    /// `P(Z < t)`.
    pub fn cdf_left(&self, t: f64) -> f64 {
        let k = self.atoms.partition_point(|a| a.0 < t);
        self.atoms[..k].iter().map(|a| a.1).sum::<f64>().min(1.0)
    }

    /// `E[max(Z, a)]`.
    pub fn truncated_mean(&self, a: f64) -> f64 {
        self.atoms.iter().map(|&(v, m)| m * v.max(a)).sum()
    }

    /// Law of `Z * factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let atoms = self.atoms.iter().map(|&(v, m)| (v * factor, m)).collect();
        Self::new(atoms).expect("scaling preserves validity")
    }

    /// Normalized polygon of the law: `P(t) = int_0^t Q(1 - s) ds`, where `Q`
    /// is the quantile function. Agrees with [`Polygon::normalized`] for the
    /// uniform law on slopes.
    pub fn polygon_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let mut acc = 0.0;
        let mut used = 0.0;
        for &(v, m) in self.atoms.iter().rev() {
            if used + m >= t {
                return acc + (t - used) * v;
            }
            acc += m * v;
            used += m;
        }
        acc
    }
}

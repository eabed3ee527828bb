use alloc::boxed::Box;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{cabs, C64};

/// A continuous metric on `O(1)`, given by its weight `u`: a function on
/// nonzero homogeneous coordinates with `u(λx) = ln|λ| + u(x)`, so that a
/// section `s` of `O(n)` has pointwise norm `|s(x)| e^{-n u(x)}`.
///
/// Adding a function to the metric multiplies pointwise norms by its
/// exponential, which lowers the weight by the same amount.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricWeight {
    /// `u = ln(|x|^2) / 2`.
    FubiniStudy,
    /// `u = ln max_i |x_i|`.
    MaxLog,
    /// The metric multiplied by `e^c`.
    Dilated(Box<MetricWeight>, f64),
    /// The metric multiplied by `e^{h b}` with
    /// `b(x) = max(0, 1 - d(x, center)^2 / radius^2)` and `d` the chordal distance.
    Bump { base: Box<MetricWeight>, center: Vec<C64>, height: f64, radius: f64 },
    /// Pointwise maximum of two metrics.
    Max(Box<MetricWeight>, Box<MetricWeight>),
}

fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Chordal distance `sqrt(1 - |<x, y>|^2 / (|x|^2 |y|^2))` in `[0, 1]`.
pub fn chordal_distance(x: &[C64], y: &[C64]) -> f64 {
    let dot: C64 = x.iter().zip(y).map(|(a, b)| a * b.conj()).sum();
    let c = dot.norm_sqr() / (norm2(x) * norm2(y));
    (1.0 - c).max(0.0).sqrt()
}

impl MetricWeight {
    pub fn dilated(self, c: f64) -> Self {
        MetricWeight::Dilated(Box::new(self), c)
    }

    pub fn bump(self, center: Vec<C64>, height: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !height.is_finite() || center.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            return Err(Error::Invalid("bump needs a nonzero center, finite height and positive radius".into()));
        }
        Ok(MetricWeight::Bump { base: Box::new(self), center, height, radius })
    }

    pub fn max(self, other: MetricWeight) -> Self {
        MetricWeight::Max(Box::new(self), Box::new(other))
    }

    /// `u(x)`.
    pub fn weight(&self, x: &[C64]) -> f64 {
        match self {
            MetricWeight::FubiniStudy => 0.5 * norm2(x).ln(),
            MetricWeight::MaxLog => x.iter().map(|&z| cabs(z)).fold(0.0, f64::max).ln(),
            MetricWeight::Dilated(base, c) => base.weight(x) - c,
            MetricWeight::Bump { base, center, height, radius } => {
                let d = chordal_distance(x, center);
                base.weight(x) - height * (1.0 - d * d / (radius * radius)).max(0.0)
            }
            MetricWeight::Max(a, b) => a.weight(x).min(b.weight(x)),
        }
    }

    /// `e^{-n u(x)}`.
    pub fn factor(&self, x: &[C64], n: usize) -> f64 {
        (-(n as f64) * self.weight(x)).exp()
    }

    /// Largest violation of `u(λx) = ln|λ| + u(x)` over the given points and
    /// a few scalings, which measures chart-transition consistency.
    pub fn homogeneity_defect(&self, points: &[Vec<C64>]) -> f64 {
        let scalars = [C64::new(2.0, 0.0), C64::new(0.0, -0.5), C64::new(-1.5, 1.5)];
        let mut worst: f64 = 0.0;
        for x in points {
            let base = self.weight(x);
            for &l in &scalars {
                let y: Vec<C64> = x.iter().map(|&z| z * l).collect();
                worst = worst.max((self.weight(&y) - cabs(l).ln() - base).abs());
            }
        }
        worst
    }
}

/// `n · max_x |u(x) - v(x)|` over the points, an upper bound for the
/// distance between the corresponding sup norms on `H^0(O(n))` when the
/// points cover the maximizers.
pub fn distortion_bound(u: &MetricWeight, v: &MetricWeight, points: &[Vec<C64>], n: usize) -> f64 {
    n as f64 * points.iter().map(|x| (u.weight(x) - v.weight(x)).abs()).fold(0.0, f64::max)
}

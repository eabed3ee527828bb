use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::backend::Variety;
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Polar coordinates `(r_j, θ_j)` of the affine coordinates in one chart.
pub type ChartCoords = (usize, Vec<(f64, f64)>);

/// Homogeneous point with coordinate `chart` equal to one.
pub fn chart_point(variety: Variety, chart: usize, polar: &[(f64, f64)]) -> Vec<C64> {
    let mut x = Vec::with_capacity(variety.coords());
    let mut it = polar.iter();
    for i in 0..variety.coords() {
        if i == chart {
            x.push(C64::new(1.0, 0.0));
        } else {
            let &(r, t) = it.next().expect("one polar pair per affine coordinate");
            x.push(C64::new(r * t.cos(), r * t.sin()));
        }
    }
    x
}

/// Product of polar grids `|z_j| ≤ radius` in every standard affine chart.
/// Neighbouring charts overlap on `1/radius ≤ |z| ≤ radius`, so the grid
/// covers the whole variety including the chart at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub variety: Variety,
    pub radial: usize,
    pub angular: usize,
    pub radius: f64,
    coords: Vec<ChartCoords>,
    points: Vec<Vec<C64>>,
}

fn polar_disc(radial: usize, angular: usize, radius: f64) -> Vec<(f64, f64)> {
    let mut out = alloc::vec![(0.0, 0.0)];
    for j in 1..radial {
        let r = radius * j as f64 / (radial - 1) as f64;
        for k in 0..angular {
            out.push((r, 2.0 * PI * k as f64 / angular as f64));
        }
    }
    out
}

impl SampleGrid {
    pub fn polar(variety: Variety, radial: usize, angular: usize, radius: f64) -> Result<Self> {
        if radial < 2 || angular < 3 || !(radius > 1.0) {
            return Err(Error::Invalid("grid needs radial ≥ 2, angular ≥ 3 and radius > 1".into()));
        }
        let disc = polar_disc(radial, angular, radius);
        let mut coords = Vec::new();
        for chart in 0..variety.coords() {
            match variety {
                Variety::P1 => coords.extend(disc.iter().map(|&p| (chart, alloc::vec![p]))),
                Variety::P2 => {
                    for &p in &disc {
                        coords.extend(disc.iter().map(|&q| (chart, alloc::vec![p, q])));
                    }
                }
            }
        }
        let points = coords.iter().map(|(c, p)| chart_point(variety, *c, p)).collect();
        Ok(Self { variety, radial, angular, radius, coords, points })
    }

    /// Default resolution: 2 × (1 + 32 · 32) nodes on the projective line and
    /// 3 × (1 + 5 · 8)^2 on the plane.
    pub fn default_for(variety: Variety) -> Self {
        match variety {
            Variety::P1 => Self::polar(variety, 33, 32, 1.2),
            Variety::P2 => Self::polar(variety, 6, 8, 1.2),
        }
        .expect("valid default grid")
    }

    /// Twice the radial and angular resolution.
    pub fn refined(&self) -> Self {
        Self::polar(self.variety, 2 * self.radial - 1, 2 * self.angular, self.radius).expect("refinement of a valid grid")
    }

    pub fn points(&self) -> &[Vec<C64>] {
        &self.points
    }

    pub fn coords(&self) -> &[ChartCoords] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Radial and angular spacing.
    pub fn steps(&self) -> (f64, f64) {
        (self.radius / (self.radial - 1) as f64, 2.0 * PI / self.angular as f64)
    }

    /// Compass search for a local maximum of `f` started at grid node `start`,
    /// with initial steps half the grid spacing. Returns the best point.
    pub fn polish(&self, start: usize, f: impl Fn(&[C64]) -> f64) -> (Vec<C64>, f64) {
        let (chart, mut cur) = self.coords[start].clone();
        let (hr, ht) = self.steps();
        let (mut sr, mut st) = (0.5 * hr, 0.5 * ht);
        let mut best = f(&self.points[start]);
        let mut best_point = self.points[start].clone();
        while sr > 1e-13 {
            let mut moved = false;
            for j in 0..cur.len() {
                for (dr, dt) in [(sr, 0.0), (-sr, 0.0), (0.0, st), (0.0, -st)] {
                    let mut cand = cur.clone();
                    cand[j].0 = (cand[j].0 + dr).clamp(0.0, self.radius);
                    cand[j].1 += dt;
                    let x = chart_point(self.variety, chart, &cand);
                    let v = f(&x);
                    if v > best {
                        best = v;
                        best_point = x;
                        cur = cand;
                        moved = true;
                    }
                }
            }
            if !moved {
                sr *= 0.5;
                st *= 0.5;
            }
        }
        (best_point, best)
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=k {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.reverse();
    out
}

/// Discrete approximation of the Fubini–Study probability measure: in chart
/// `i` the region `|z_j| ≤ 1` (where `|x_i|` is the largest coordinate), with
/// Gauss–Legendre nodes in each radius and the trapezoid rule in each angle.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMeasure {
    pub variety: Variety,
    pub radial: usize,
    pub angular: usize,
    points: Vec<Vec<C64>>,
    weights: Vec<f64>,
}

impl QuadratureMeasure {
    pub fn fubini_study(variety: Variety, radial: usize, angular: usize) -> Result<Self> {
        if radial == 0 || angular == 0 {
            return Err(Error::Invalid("quadrature needs nodes".into()));
        }
        let gl = gauss_legendre(radial);
        let mut disc = Vec::with_capacity(radial * angular);
        for &(r, w) in &gl {
            for k in 0..angular {
                disc.push(((r, 2.0 * PI * k as f64 / angular as f64), r * w * 2.0 * PI / angular as f64));
            }
        }
        let d = variety.dim();
        // Density c_d / (1 + |z|^2)^{d+1} with respect to Lebesgue measure.
        let c = match variety {
            Variety::P1 => 1.0 / PI,
            Variety::P2 => 2.0 / (PI * PI),
        };
        let (mut points, mut weights) = (Vec::new(), Vec::new());
        for chart in 0..variety.coords() {
            let mut push = |polar: &[(f64, f64)], w: f64| {
                let r2: f64 = polar.iter().map(|p| p.0 * p.0).sum();
                points.push(chart_point(variety, chart, polar));
                weights.push(c * w / (1.0 + r2).powi(d as i32 + 1));
            };
            match variety {
                Variety::P1 => disc.iter().for_each(|&(p, w)| push(&[p], w)),
                Variety::P2 => {
                    for &(p, wp) in &disc {
                        for &(q, wq) in &disc {
                            push(&[p, q], wp * wq);
                        }
                    }
                }
            }
        }
        let q = Self { variety, radial, angular, points, weights };
        let mass = q.total_mass();
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::Resolution(alloc::format!("quadrature mass {mass} differs from 1")));
        }
        Ok(q)
    }

    /// Resolution adequate for `H^0(O(n))`: the angular rule is exact on the
    /// trigonometric polynomials that appear in Gram entries.
    pub fn default_for(variety: Variety, n: usize) -> Self {
        match variety {
            Variety::P1 => Self::fubini_study(variety, n + 32, 2 * n + 16),
            Variety::P2 => Self::fubini_study(variety, n / 2 + 12, n + 8),
        }
        .expect("valid default quadrature")
    }

    pub fn refined(&self) -> Result<Self> {
        Self::fubini_study(self.variety, 2 * self.radial, 2 * self.angular)
    }

    pub fn points(&self) -> &[Vec<C64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

//! Exact convex hulls of rational points `α / n` in dimension at most three.
//!
//! Points are kept in homogeneous integer form `(n, α)` with `n ≥ 1`, so all
//! orientation tests are integer determinants.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;

use super::semigroup::{Exp, MAX_DIM};
use crate::random;

/// The rational point `a / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct HPoint {
    pub n: i64,
    pub a: Exp,
}

impl HPoint {
    pub fn new(n: i64, a: Exp) -> Self {
        debug_assert!(n > 0);
        Self { n, a }
    }

    pub fn coords(&self, d: usize) -> Vec<f64> {
        self.a[..d].iter().map(|&x| x as f64 / self.n as f64).collect()
    }

    fn row(&self) -> [i128; MAX_DIM + 1] {
        [self.n as i128, self.a[0] as i128, self.a[1] as i128, self.a[2] as i128]
    }
}

fn det3(m: [[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn det4(m: [[i128; 4]; 4]) -> i128 {
    let mut acc = 0;
    for c in 0..4 {
        let mut minor = [[0i128; 3]; 3];
        for r in 1..4 {
            let mut k = 0;
            for j in 0..4 {
                if j != c {
                    minor[r - 1][k] = m[r][j];
                    k += 1;
                }
            }
        }
        let s = if c % 2 == 0 { 1 } else { -1 };
        acc += s * m[0][c] * det3(minor);
    }
    acc
}

/// Positive when `p, q, r` turn counterclockwise (scaled by `n_p n_q n_r`).
fn orient2(p: &HPoint, q: &HPoint, r: &HPoint) -> i128 {
    let row = |x: &HPoint| [x.n as i128, x.a[0] as i128, x.a[1] as i128];
    det3([row(p), row(q), row(r)])
}

/// Positive when `s` lies on the side of `(q - p) × (r - p)`.
fn orient3(p: &HPoint, q: &HPoint, r: &HPoint, s: &HPoint) -> i128 {
    det4([p.row(), q.row(), r.row(), s.row()])
}

fn cmp_coord(p: &HPoint, q: &HPoint, k: usize) -> core::cmp::Ordering {
    (p.a[k] as i128 * q.n as i128).cmp(&(q.a[k] as i128 * p.n as i128))
}

fn same_point(p: &HPoint, q: &HPoint, d: usize) -> bool {
    (0..d).all(|k| cmp_coord(p, q, k).is_eq())
}

fn ratio(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact hull: the extreme points, facets for `d = 3`, and the volume.
#[derive(Debug, Clone)]
pub struct Hull {
    pub dim: usize,
    /// Extreme points; counterclockwise for `d = 2`, ascending for `d = 1`.
    pub vertices: Vec<HPoint>,
    /// Outward oriented triangles over `vertices` (`d = 3` only).
    pub faces: Vec<[usize; 3]>,
    pub volume: BigRational,
    /// True when the points do not span a full-dimensional body.
    pub degenerate: bool,
}

impl Hull {
    fn empty(dim: usize) -> Self {
        Self { dim, vertices: Vec::new(), faces: Vec::new(), volume: BigRational::zero(), degenerate: true }
    }
}

pub fn hull(points: &[HPoint], dim: usize, seed: u64) -> Hull {
    match dim {
        1 => hull1(points),
        2 => hull2(points),
        3 => hull3(points, seed),
        _ => panic!("hull dimension {dim} unsupported"),
    }
}

fn hull1(points: &[HPoint]) -> Hull {
    let Some(lo) = points.iter().min_by(|p, q| cmp_coord(p, q, 0)) else { return Hull::empty(1) };
    let hi = points.iter().max_by(|p, q| cmp_coord(p, q, 0)).expect("nonempty");
    let length = ratio(hi.a[0] as i128, hi.n as i128) - ratio(lo.a[0] as i128, lo.n as i128);
    let degenerate = length.is_zero();
    let vertices = if degenerate { vec![*lo] } else { vec![*lo, *hi] };
    Hull { dim: 1, vertices, faces: Vec::new(), volume: length, degenerate }
}

/// Andrew's monotone chain with exact orientation.
fn hull2(points: &[HPoint]) -> Hull {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| cmp_coord(p, q, 0).then(cmp_coord(p, q, 1)));
    pts.dedup_by(|p, q| same_point(p, q, 2));
    if pts.len() < 3 {
        let mut h = Hull::empty(2);
        h.vertices = pts;
        return h;
    }
    let mut lower: Vec<HPoint> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orient2(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<HPoint> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orient2(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let v = lower;
    if v.len() < 3 {
        let mut h = Hull::empty(2);
        h.vertices = v;
        return h;
    }
    let o = v[0];
    let mut area = BigRational::zero();
    for i in 1..v.len() - 1 {
        let (p, q) = (&v[i], &v[i + 1]);
        let num = orient2(&o, p, q);
        area += ratio(num, 2 * o.n as i128 * p.n as i128 * q.n as i128);
    }
    Hull { dim: 2, vertices: v, faces: Vec::new(), volume: area, degenerate: false }
}

/// Randomized incremental hull. Points strictly beyond some facet are
/// inserted; coplanar facets are kept as separate triangles.
fn hull3(points: &[HPoint], seed: u64) -> Hull {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| cmp_coord(p, q, 0).then(cmp_coord(p, q, 1)).then(cmp_coord(p, q, 2)));
    pts.dedup_by(|p, q| same_point(p, q, 3));
    let mut rng = random::rng(seed);
    pts.shuffle(&mut rng);
    let Some(simplex) = initial_simplex(&pts) else {
        let mut h = Hull::empty(3);
        h.vertices = pts.into_iter().take(3).collect();
        return h;
    };
    // Put the simplex first so that indices are stable.
    let mut order: Vec<usize> = simplex.to_vec();
    order.extend((0..pts.len()).filter(|i| !simplex.contains(i)));
    let pts: Vec<HPoint> = order.iter().map(|&i| pts[i]).collect();

    let mut faces: Vec<Option<[usize; 3]>> = Vec::new();
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let add_face = |faces: &mut Vec<Option<[usize; 3]>>, edges: &mut BTreeMap<(usize, usize), usize>, f: [usize; 3]| {
        let id = faces.len();
        faces.push(Some(f));
        for k in 0..3 {
            edges.insert((f[k], f[(k + 1) % 3]), id);
        }
    };
    for (tri, other) in [([0, 1, 2], 3), ([0, 1, 3], 2), ([0, 2, 3], 1), ([1, 2, 3], 0)] {
        let [a, b, c] = tri;
        let f = if orient3(&pts[a], &pts[b], &pts[c], &pts[other]) < 0 { [a, b, c] } else { [a, c, b] };
        add_face(&mut faces, &mut edges, f);
    }
    for p in 4..pts.len() {
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter_map(|(id, f)| {
                let f = (*f)?;
                (orient3(&pts[f[0]], &pts[f[1]], &pts[f[2]], &pts[p]) > 0).then_some(id)
            })
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon = Vec::new();
        for &id in &visible {
            let f = faces[id].expect("alive");
            for k in 0..3 {
                let (u, w) = (f[k], f[(k + 1) % 3]);
                let across = edges.get(&(w, u)).copied();
                if across.is_some_and(|o| !visible.contains(&o)) {
                    horizon.push((u, w));
                }
            }
        }
        for &id in &visible {
            let f = faces[id].take().expect("alive");
            for k in 0..3 {
                edges.remove(&(f[k], f[(k + 1) % 3]));
            }
        }
        for (u, w) in horizon {
            add_face(&mut faces, &mut edges, [u, w, p]);
        }
    }
    // Compact to the vertices that appear on the surface.
    let alive: Vec<[usize; 3]> = faces.into_iter().flatten().collect();
    let mut used: Vec<usize> = alive.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let remap = |i: usize| used.binary_search(&i).expect("used vertex");
    let vertices: Vec<HPoint> = used.iter().map(|&i| pts[i]).collect();
    let faces: Vec<[usize; 3]> = alive.iter().map(|f| [remap(f[0]), remap(f[1]), remap(f[2])]).collect();
    // Points on facets or edges survive strict visibility; rebuild without them.
    let extreme = extreme_vertices(&vertices, &faces);
    if extreme.len() < vertices.len() {
        return hull3(&extreme, seed);
    }
    let o = vertices[0];
    let mut vol = BigRational::zero();
    for f in &faces {
        let (a, b, c) = (&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
        let num = orient3(a, b, c, &o);
        if num != 0 {
            // o lies inside, so every facet contributes with the same sign.
            let den = 6 * o.n as i128 * a.n as i128 * b.n as i128 * c.n as i128;
            vol += ratio(-num, den);
        }
    }
    Hull { dim: 3, vertices, faces, volume: vol, degenerate: false }
}

/// Vertices whose incident facets span at least three distinct planes.
fn extreme_vertices(vertices: &[HPoint], faces: &[[usize; 3]]) -> Vec<HPoint> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (id, f) in faces.iter().enumerate() {
        for &v in f {
            incident[v].push(id);
        }
    }
    let coplanar = |f: &[usize; 3], g: &[usize; 3]| {
        g.iter().all(|&v| orient3(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]], &vertices[v]) == 0)
    };
    (0..vertices.len())
        .filter(|&v| {
            let mut planes: Vec<usize> = Vec::new();
            for &id in &incident[v] {
                if !planes.iter().any(|&q| coplanar(&faces[q], &faces[id])) {
                    planes.push(id);
                    if planes.len() >= 3 {
                        return true;
                    }
                }
            }
            false
        })
        .map(|v| vertices[v])
        .collect()
}

fn initial_simplex(pts: &[HPoint]) -> Option<[usize; 4]> {
    let i0 = 0;
    let i1 = (1..pts.len()).find(|&i| !same_point(&pts[i0], &pts[i], 3))?;
    let collinear = |i: usize| {
        let m = [pts[i0].row(), pts[i1].row(), pts[i].row()];
        // Rank 2 iff every 3x3 minor vanishes.
        (0..4).all(|skip| {
            let mut sub = [[0i128; 3]; 3];
            for r in 0..3 {
                let mut k = 0;
                for c in 0..4 {
                    if c != skip {
                        sub[r][k] = m[r][c];
                        k += 1;
                    }
                }
            }
            det3(sub) == 0
        })
    };
    let i2 = (1..pts.len()).find(|&i| i != i1 && !collinear(i))?;
    let i3 = (1..pts.len()).find(|&i| orient3(&pts[i0], &pts[i1], &pts[i2], &pts[i]) != 0)?;
    Some([i0, i1, i2, i3])
}

/// Closed body with floating-point facet inequalities for membership tests.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub volume: f64,
    pub exact_volume: BigRational,
    pub degenerate: bool,
    /// `(normal, offset)` with unit normals: `normal · x ≤ offset` inside.
    pub halfspaces: Vec<(Vec<f64>, f64)>,
}

impl ConvexBody {
    pub fn from_hull(h: &Hull) -> Self {
        let d = h.dim;
        let vertices: Vec<Vec<f64>> = h.vertices.iter().map(|p| p.coords(d)).collect();
        let mut halfspaces = Vec::new();
        if !h.degenerate {
            match d {
                1 => {
                    halfspaces.push((vec![-1.0], -vertices[0][0]));
                    halfspaces.push((vec![1.0], vertices[1][0]));
                }
                2 => {
                    for i in 0..vertices.len() {
                        let (p, q) = (&vertices[i], &vertices[(i + 1) % vertices.len()]);
                        let n = [q[1] - p[1], p[0] - q[0]];
                        let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
                        let n = vec![n[0] / len, n[1] / len];
                        let off = n[0] * p[0] + n[1] * p[1];
                        halfspaces.push((n, off));
                    }
                }
                _ => {
                    for f in &h.faces {
                        let (a, b, c) = (&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
                        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                        let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                        if len == 0.0 {
                            continue;
                        }
                        let n = vec![n[0] / len, n[1] / len, n[2] / len];
                        let off = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
                        halfspaces.push((n, off));
                    }
                }
            }
        }
        Self {
            dim: d,
            vertices,
            volume: h.volume.to_f64().unwrap_or(f64::NAN),
            exact_volume: h.volume.clone(),
            degenerate: h.degenerate,
            halfspaces,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        !self.degenerate
            && self.halfspaces.iter().all(|(n, off)| n.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= off + tol)
    }
}

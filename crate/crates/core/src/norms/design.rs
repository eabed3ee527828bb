//! D-optimal design over rank-one and Hermitian atoms.
//!
//! Maximizes `ln det S(u)` with `S(u) = sum_a u_a M_a` over the simplex, where
//! `M_a = l_a^* l_a` for a functional `l_a` and `M_a = H_a` for a form. The
//! optimality gap is measured by the leverages `g_a = tr(S^{-1} M_a)`, which
//! satisfy `sum_a u_a g_a = r` and `max_a g_a = r` at the optimum.
//!
//! Frank-Wolfe steps with exact line search and Todd-Yildirim away steps
//! drive `max_a g_a / r - 1` below the tolerance. Large functional families
//! are handled by column generation on a working set.

use alloc::vec::Vec;

use nalgebra::DVector;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

const WORKSET_MAX: usize = 3000;
const WORKSET_INIT: usize = 1200;
const REFRESH_EVERY: usize = 256;
const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptions {
    /// Relative tolerance on `max_a g_a / r - 1`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 100_000 }
    }
}

/// Atoms of a norm written as `max_a ||x||_a`.
#[derive(Debug, Clone)]
pub(crate) struct Atoms {
    pub r: usize,
    /// One covector per row.
    pub functionals: CMat,
    pub forms: Vec<CMat>,
}

#[derive(Debug, Clone)]
pub(crate) struct Design {
    pub s: CMat,
    pub iterations: usize,
    pub converged: bool,
    pub gap: f64,
}

impl Atoms {
    pub fn n_functionals(&self) -> usize {
        self.functionals.nrows()
    }

    /// `sum_a M_a`.
    pub fn total(&self) -> CMat {
        let mut s = self.functionals.adjoint() * &self.functionals;
        for h in &self.forms {
            s += h;
        }
        linalg::hermitian_part(&s)
    }

    /// Leverages `l S^{-1} l^*` of every functional.
    pub fn functional_leverages(&self, sinv: &CMat) -> Vec<f64> {
        leverages(&self.functionals, sinv)
    }
}

fn leverages(l: &CMat, sinv: &CMat) -> Vec<f64> {
    let m = l * sinv;
    (0..l.nrows())
        .map(|a| {
            let mut acc = 0.0;
            for j in 0..l.ncols() {
                acc += (m[(a, j)] * l[(a, j)].conj()).re;
            }
            acc
        })
        .collect()
}

fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn select_rows(l: &CMat, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), l.ncols(), |i, j| l[(rows[i], j)])
}

/// Maximizes the concave function `lam -> sum_i ln(1 - lam + lam nu_i)` on
/// `[lo, hi]` by bisection on its derivative.
fn line_search(nu: &[f64], lo: f64, hi: f64) -> f64 {
    let deriv = |lam: f64| nu.iter().map(|&v| (v - 1.0) / (1.0 - lam + lam * v)).sum::<f64>();
    if deriv(hi) >= 0.0 {
        return hi;
    }
    if deriv(lo) <= 0.0 {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if deriv(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

struct Inner<'a> {
    r: usize,
    l: CMat,
    forms: &'a [CMat],
    /// Weights: functionals first, then forms.
    u: Vec<f64>,
    s: CMat,
    sinv: CMat,
    g: Vec<f64>,
}

impl<'a> Inner<'a> {
    fn k(&self) -> usize {
        self.l.nrows()
    }

    fn refresh(&mut self) -> Result<()> {
        let k = self.k();
        let mut lu = self.l.clone();
        for a in 0..k {
            let w = self.u[a].sqrt();
            lu.row_mut(a).iter_mut().for_each(|z| *z *= w);
        }
        let mut s = lu.adjoint() * lu;
        for (h, form) in self.forms.iter().enumerate() {
            let w = self.u[k + h];
            if w > 0.0 {
                s += form.map(|z| z * w);
            }
        }
        self.s = linalg::hermitian_part(&s);
        self.sinv = linalg::inverse_hpd(&self.s).map_err(|_| {
            Error::Degenerate("design matrix lost positive definiteness".into())
        })?;
        self.g = leverages(&self.l, &self.sinv);
        for form in self.forms {
            self.g.push(trace_product(&self.sinv, form));
        }
        Ok(())
    }

    /// Runs Frank-Wolfe with away steps; returns iterations used and whether
    /// the tolerance was reached.
    fn run(&mut self, tol: f64, budget: usize) -> Result<(usize, bool)> {
        let r = self.r as f64;
        let mut since_refresh = 0;
        for it in 0..budget {
            let (mut gj, mut gk) = (f64::NEG_INFINITY, f64::INFINITY);
            for (a, &ga) in self.g.iter().enumerate() {
                gj = gj.max(ga);
                if self.u[a] > 0.0 {
                    gk = gk.min(ga);
                }
            }
            // Near-ties go to the lowest index, so rounding-level changes in
            // the atoms (a rescaled norm, say) leave the path unchanged.
            let slack = TIE_TOL * r;
            let j = self.g.iter().position(|&ga| ga >= gj - slack).unwrap_or(0);
            let kk = (0..self.g.len())
                .find(|&a| self.u[a] > 0.0 && self.g[a] <= gk + slack)
                .unwrap_or(usize::MAX);
            let (gj, gk) = (self.g[j], if kk == usize::MAX { f64::INFINITY } else { self.g[kk] });
            let eps_plus = gj / r - 1.0;
            let eps_minus = 1.0 - gk / r;
            if eps_plus <= tol {
                if since_refresh == 0 {
                    return Ok((it, true));
                }
                // Confirm on freshly recomputed leverages.
                self.refresh()?;
                since_refresh = 0;
                continue;
            }
            let (atom, lam) = if eps_plus >= eps_minus || kk == usize::MAX {
                (j, self.step_length(j, 0.0, 1.0 - 1e-12)?)
            } else {
                let uk = self.u[kk];
                let lo = if uk >= 1.0 { -1e12 } else { -uk / (1.0 - uk) };
                (kk, self.step_length(kk, lo, 0.0)?)
            };
            if lam == 0.0 {
                self.refresh()?;
                since_refresh = 0;
                continue;
            }
            self.apply(atom, lam)?;
            since_refresh += 1;
            if since_refresh >= REFRESH_EVERY {
                self.refresh()?;
                since_refresh = 0;
            }
        }
        self.refresh()?;
        let gmax = self.g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((budget, gmax / r - 1.0 <= tol))
    }

    fn step_length(&self, atom: usize, lo: f64, hi: f64) -> Result<f64> {
        let k = self.k();
        let r = self.r;
        if atom < k {
            let gj = self.g[atom];
            // S^{-1/2} M S^{-1/2} has the single nonzero eigenvalue g_j.
            let mut nu = alloc::vec![0.0; r];
            nu[0] = gj;
            Ok(line_search(&nu, lo, hi))
        } else {
            let (nu, _) = linalg::pencil_eigen(&self.s, &self.forms[atom - k])?;
            Ok(line_search(&nu, lo, hi))
        }
    }

    fn apply(&mut self, atom: usize, lam: f64) -> Result<()> {
        let k = self.k();
        let keep = 1.0 - lam;
        for w in self.u.iter_mut() {
            *w *= keep;
        }
        self.u[atom] += lam;
        if self.u[atom] < 1e-15 {
            self.u[atom] = 0.0;
        }
        if atom >= k {
            return self.refresh();
        }
        let tau = lam / keep;
        let row = self.l.row(atom).transpose();
        let lstar: DVector<C64> = row.map(|z| z.conj());
        let v = &self.sinv * &lstar;
        let denom = 1.0 + tau * self.g[atom];
        if !(denom > 0.0) {
            return self.refresh();
        }
        let w = &self.l * &v;
        for a in 0..k {
            self.g[a] = (self.g[a] - tau * w[a].norm_sqr() / denom) / keep;
        }
        for (h, form) in self.forms.iter().enumerate() {
            let q = v.dotc(&(form * &v)).re;
            self.g[k + h] = (self.g[k + h] - tau * q / denom) / keep;
        }
        let coef = C64::new(tau / denom, 0.0);
        self.sinv = (&self.sinv - (&v * v.adjoint()) * coef).map(|z| z / keep);
        self.s = self.s.map(|z| z * keep) + (&lstar * lstar.adjoint()).map(|z| z * lam);
        Ok(())
    }
}

/// Diagonal equilibration `D` with `D S_0 D` having unit diagonal.
fn equilibrate(atoms: &Atoms) -> Result<(Vec<f64>, Atoms)> {
    let total = atoms.total();
    let d: Vec<f64> = (0..atoms.r).map(|i| 1.0 / total[(i, i)].re.sqrt()).collect();
    let scaled = CMat::from_fn(atoms.r, atoms.r, |i, j| total[(i, j)] * (d[i] * d[j]));
    let (lo, hi) = linalg::eig_range(&scaled);
    if !d.iter().all(|x| x.is_finite()) || !(lo > 1e-12 * hi) || !(hi > 0.0) {
        return Err(Error::Degenerate("atoms do not span the dual space".into()));
    }
    let mut functionals = atoms.functionals.clone();
    for j in 0..atoms.r {
        functionals.column_mut(j).iter_mut().for_each(|z| *z *= d[j]);
    }
    let forms = atoms
        .forms
        .iter()
        .map(|h| CMat::from_fn(atoms.r, atoms.r, |i, j| h[(i, j)] * (d[i] * d[j])))
        .collect();
    Ok((d, Atoms { r: atoms.r, functionals, forms }))
}

/// Approximately D-optimal design. The returned `S` is always a convex
/// combination of atoms, so certificates built from it are rigorous even when
/// `converged` is false.
pub(crate) fn d_optimal(atoms: &Atoms, opts: &DesignOptions) -> Result<Design> {
    let (d, eq) = equilibrate(atoms)?;
    let m = eq.n_functionals();
    let q = eq.forms.len();
    let r = eq.r as f64;

    let mut work: Vec<usize> = if m <= WORKSET_MAX {
        (0..m).collect()
    } else {
        initial_workset(&eq)?
    };
    let mut weights: Vec<f64> = alloc::vec![1.0 / (work.len() + q) as f64; work.len() + q];
    let mut used = 0;
    let mut converged = false;
    let mut s: CMat;
    let mut gap: f64;

    loop {
        let mut inner = Inner {
            r: eq.r,
            l: select_rows(&eq.functionals, &work),
            forms: &eq.forms,
            u: weights.clone(),
            s: CMat::zeros(eq.r, eq.r),
            sinv: CMat::zeros(eq.r, eq.r),
            g: Vec::new(),
        };
        inner.refresh()?;
        let (its, ok) = inner.run(opts.tol, opts.max_iter.saturating_sub(used).max(1))?;
        used += its;
        s = inner.s.clone();
        let mut gmax = inner.g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut violators: Vec<(usize, f64)> = Vec::new();
        if work.len() < m {
            let all = leverages(&eq.functionals, &inner.sinv);
            let mut in_work = alloc::vec![false; m];
            for &a in &work {
                in_work[a] = true;
            }
            for (a, &g) in all.iter().enumerate() {
                gmax = gmax.max(g);
                if !in_work[a] && g / r - 1.0 > opts.tol {
                    violators.push((a, g));
                }
            }
        }
        gap = gmax / r - 1.0;
        if violators.is_empty() {
            converged = ok;
            break;
        }
        if used >= opts.max_iter {
            break;
        }
        violators.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        violators.truncate(WORKSET_INIT);
        let (fw, fh) = inner.u.split_at(work.len());
        let mut next_weights: Vec<f64> = fw.to_vec();
        work.extend(violators.iter().map(|v| v.0));
        next_weights.resize(work.len(), 0.0);
        next_weights.extend_from_slice(fh);
        weights = next_weights;
    }

    // Undo the equilibration: S = D^{-1} S' D^{-1}.
    let s = CMat::from_fn(atoms.r, atoms.r, |i, j| s[(i, j)] / (d[i] * d[j]));
    Ok(Design { s: linalg::hermitian_part(&s), iterations: used, converged, gap })
}

fn initial_workset(eq: &Atoms) -> Result<Vec<usize>> {
    let m = eq.n_functionals();
    let total = eq.total();
    let sinv = linalg::inverse_hpd(&total)?;
    let g = leverages(&eq.functionals, &sinv);
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| g[b].total_cmp(&g[a]).then(a.cmp(&b)));
    let mut chosen = alloc::vec![false; m];
    for &a in idx.iter().take(WORKSET_INIT / 2) {
        chosen[a] = true;
    }
    let stride = (m / (WORKSET_INIT / 2)).max(1);
    for a in (0..m).step_by(stride) {
        chosen[a] = true;
    }
    let work: Vec<usize> = (0..m).filter(|&a| chosen[a]).collect();
    let sub = select_rows(&eq.functionals, &work);
    let mut s = sub.adjoint() * &sub;
    for h in &eq.forms {
        s += h;
    }
    let (lo, hi) = linalg::eig_range(&s);
    if lo > 1e-12 * hi {
        Ok(work)
    } else {
        Ok((0..m).collect())
    }
}

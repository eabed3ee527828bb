//! Seeded random generation used by audits and test fixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[allow(unused_imports)]
use num_traits::Float;

use crate::hermitian::ScalarKind;
use crate::linalg::{CMat, CVec, C64};

/// The generator used everywhere a seed is threaded through.
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample (Box-Muller).
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            let v: f64 = rng.gen();
            return (-2.0 * u.ln()).sqrt() * (core::f64::consts::TAU * v).cos();
        }
    }
}

/// Gaussian scalar of the given kind; complex samples have `E|z|^2 = 1`.
pub fn scalar<R: Rng + ?Sized>(rng: &mut R, kind: ScalarKind) -> C64 {
    match kind {
        ScalarKind::Real => C64::new(normal(rng), 0.0),
        ScalarKind::Complex => {
            let s = core::f64::consts::FRAC_1_SQRT_2;
            C64::new(s * normal(rng), s * normal(rng))
        }
    }
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, r: usize, kind: ScalarKind) -> CVec {
    CVec::from_fn(r, |_, _| scalar(rng, kind))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, kind: ScalarKind) -> CMat {
    CMat::from_fn(rows, cols, |_, _| scalar(rng, kind))
}

/// Random positive definite Gram matrix `A A^* / r + I / 10`.
pub fn hpd<R: Rng + ?Sized>(rng: &mut R, r: usize, kind: ScalarKind) -> CMat {
    let a = matrix(rng, r, r, kind);
    let mut g = (&a * a.adjoint()).map(|z| z / r as f64);
    for i in 0..r {
        g[(i, i)] += C64::new(0.1, 0.0);
    }
    crate::linalg::hermitian_part(&g)
}

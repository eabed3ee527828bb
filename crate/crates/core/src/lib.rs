//! Slope theory for finite-dimensional spaces carrying two norms.
//!
//! The crate covers Hermitian pairs ([`hermitian`]), general norms given as a
//! maximum of linear functionals ([`norms`]), exact ultrametric norms over
//! discretely valued fields ([`ultra`]), Okounkov semigroups and their limit
//! laws ([`okounkov`]), concrete linear series on the projective line and
//! plane ([`series`]), and convergence diagnostics ([`laws`]).
//!
//! All logarithms are natural. The crate is `no_std` with `alloc` when the
//! default `std` feature is disabled.
#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` and friends reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod hermitian;
pub mod laws;
pub mod linalg;
pub mod norms;
pub mod okounkov;
pub mod random;
pub mod series;
pub mod spectral;
pub mod ultra;

/// Crate version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use hermitian::{Flag, HermitianForm, HermitianPair, ScalarKind, Truncation};
pub use spectral::{Polygon, SlopeProfile, SpectralMeasure};

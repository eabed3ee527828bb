use alloc::vec::Vec;

use super::backend::{Backend, GradedPiece, Variety};
use super::grid::{QuadratureMeasure, SampleGrid};
use super::norms::{l2_gram, sup_norm_oracles};
use super::values::{gr_quotient_values, PieceNorm};
use super::weight::{distortion_bound, MetricWeight};
use crate::error::Result;
use crate::hermitian::HermitianPair;
use crate::norms::EllipsoidOptions;
use crate::okounkov::MonomialOrder;
use crate::spectral::{SlopeProfile, SpectralMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    Sup,
    L2,
}

/// Discretization used to build the norms of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    /// Sup-norm grid; the variety default when `None`.
    pub grid: Option<SampleGrid>,
    /// L² quadrature; the level default when `None`.
    pub quadrature: Option<QuadratureMeasure>,
    pub ellipsoid: EllipsoidOptions,
}

/// Design tolerance for sup-norm surrogates. Grid nodes cluster along the
/// contact set of the optimal ellipsoid, which slows the design down near the
/// optimum; the spread only moves by `O(tol)` in exchange.
pub const SURROGATE_DESIGN_TOL: f64 = 1e-4;

impl Default for Discretization {
    fn default() -> Self {
        let mut ellipsoid = EllipsoidOptions::default();
        ellipsoid.design.tol = SURROGATE_DESIGN_TOL;
        Self { grid: None, quadrature: None, ellipsoid }
    }
}

/// The two norms of the complete series at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelNorms {
    pub n: usize,
    pub kind: NormKind,
    pub piece: GradedPiece,
    pub phi: PieceNorm,
    pub psi: PieceNorm,
    /// Grid or quadrature refinement defect, the larger of the two metrics.
    pub refinement_defect: f64,
    /// `n · max |u_φ - u_ψ|` on the sup grid.
    pub distortion: f64,
}

pub fn level_norms(
    variety: Variety,
    n: usize,
    phi: &MetricWeight,
    psi: &MetricWeight,
    kind: NormKind,
    order: &MonomialOrder,
    disc: &Discretization,
) -> Result<LevelNorms> {
    let backend = Backend::new(variety, n);
    let piece = backend.full_piece(order);
    let grid = disc.grid.clone().unwrap_or_else(|| SampleGrid::default_for(variety));
    let distortion = distortion_bound(phi, psi, grid.points(), n);
    let (pn, qn, refinement_defect) = match kind {
        NormKind::Sup => {
            let mut pair = sup_norm_oracles(&backend, &[phi, psi], &grid)?;
            let b = pair.pop().expect("two norms");
            let a = pair.pop().expect("two norms");
            let defect = a.refinement_defect.max(b.refinement_defect);
            (PieceNorm::from_oracle(&piece, &a.oracle)?, PieceNorm::from_oracle(&piece, &b.oracle)?, defect)
        }
        NormKind::L2 => {
            let q = disc.quadrature.clone().unwrap_or_else(|| QuadratureMeasure::default_for(variety, n));
            let a = l2_gram(&backend, phi, &q)?;
            let b = l2_gram(&backend, psi, &q)?;
            (PieceNorm::from_gram(&piece, &a)?, PieceNorm::from_gram(&piece, &b)?, 0.0)
        }
    };
    Ok(LevelNorms { n, kind, piece, phi: pn, psi: qn, refinement_defect, distortion })
}

/// Slopes and Okounkov values of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub n: usize,
    pub kind: NormKind,
    /// `μ_i = ln(||x||_ψ / ||x||_φ)` along the simultaneous diagonalization
    /// of the (surrogate) Hermitian forms.
    pub slopes: SlopeProfile,
    /// Leading exponents in increasing order.
    pub exponents: Vec<Vec<i64>>,
    /// `Φ(n, α)` for φ and ψ, aligned with `exponents`.
    pub phi_values: Vec<f64>,
    pub psi_values: Vec<f64>,
    /// Sum of the certified spreads of the two surrogates; zero for L².
    pub budget: f64,
    pub refinement_defect: f64,
    pub distortion: f64,
}

impl LevelResult {
    pub fn rank(&self) -> usize {
        self.slopes.len()
    }

    /// Uniform law on `μ_i / n`.
    pub fn law(&self) -> SpectralMeasure {
        self.slopes.law(self.n.max(1) as f64)
    }

    /// `μ̂ / n`.
    pub fn mean_slope(&self) -> f64 {
        self.slopes.mean() / self.n.max(1) as f64
    }
}

pub fn analyze_level(norms: &LevelNorms, opts: &EllipsoidOptions) -> Result<LevelResult> {
    let (pf, ps) = norms.phi.hermitian(opts)?;
    let (qf, qs) = norms.psi.hermitian(opts)?;
    let phi_values = gr_quotient_values(&norms.piece, &pf)?;
    let psi_values = gr_quotient_values(&norms.piece, &qf)?;
    let slopes = HermitianPair::new(pf, qf)?.relative_spectrum()?;
    Ok(LevelResult {
        n: norms.n,
        kind: norms.kind,
        slopes,
        exponents: norms.piece.exponents.clone(),
        phi_values,
        psi_values,
        budget: ps + qs,
        refinement_defect: norms.refinement_defect,
        distortion: norms.distortion,
    })
}

use alloc::vec::Vec;

use super::pipeline::LevelResult;
use crate::error::{Error, Result};
use crate::okounkov::{g_function, BodyOptions, RegularGrid, SemigroupSample, ValueTable};

/// Okounkov-side estimate of `E[Z_Φ - Z_Ψ]`, the mean of `G_Φ - G_Ψ` over
/// the body.
#[derive(Debug, Clone, PartialEq)]
pub struct OkounkovEnergy {
    pub estimate: f64,
    pub phi_mean: f64,
    pub psi_mean: f64,
    /// Levels that entered the hulls.
    pub levels: Vec<usize>,
    /// `G_Φ - G_Ψ` at the grid points where both are defined.
    pub differences: Vec<f64>,
}

/// Sample and value tables holding the given levels; all others are empty.
pub fn value_tables(results: &[&LevelResult], d: usize) -> Result<(SemigroupSample, ValueTable, ValueTable)> {
    let n_max = results.iter().map(|r| r.n).max().ok_or_else(|| Error::Invalid("no levels".into()))?;
    let mut levels = alloc::vec![Vec::new(); n_max + 1];
    let mut phi = alloc::vec![Vec::new(); n_max + 1];
    let mut psi = alloc::vec![Vec::new(); n_max + 1];
    for r in results {
        if !levels[r.n].is_empty() {
            return Err(Error::Invalid(alloc::format!("level {} given twice", r.n)));
        }
        // Sample levels are sorted, so align the values with that order.
        let mut idx: Vec<usize> = (0..r.exponents.len()).collect();
        idx.sort_by(|&i, &j| r.exponents[i].cmp(&r.exponents[j]));
        levels[r.n] = idx.iter().map(|&i| r.exponents[i].clone()).collect();
        phi[r.n] = idx.iter().map(|&i| r.phi_values[i]).collect();
        psi[r.n] = idx.iter().map(|&i| r.psi_values[i]).collect();
    }
    let sample = SemigroupSample::new(d, levels)?;
    let (tp, tq) = (ValueTable::new(&sample, phi)?, ValueTable::new(&sample, psi)?);
    Ok((sample, tp, tq))
}

/// Uses the levels `n ≥ n_max / 2` and a cell-centred grid with `steps`
/// cells per axis on the unit cube.
pub fn okounkov_energy(results: &[LevelResult], d: usize, steps: usize, seed: u64) -> Result<OkounkovEnergy> {
    let n_max = results.iter().map(|r| r.n).max().ok_or_else(|| Error::Invalid("no levels".into()))?;
    let n_min = n_max.div_ceil(2);
    let high: Vec<&LevelResult> = results.iter().filter(|r| r.n >= n_min).collect();
    let (sample, tp, tq) = value_tables(&high, d)?;
    let opts = BodyOptions { n_min, seed, ..BodyOptions::default() };
    let grid = RegularGrid { lo: alloc::vec![0.0; d], hi: alloc::vec![1.0; d], steps };
    let gp = g_function(&sample, &tp, &grid, &opts)?;
    let gq = g_function(&sample, &tq, &grid, &opts)?;
    let pairs: Vec<(f64, f64)> =
        gp.values.iter().zip(&gq.values).filter_map(|(a, b)| Some(((*a)?, (*b)?))).collect();
    if pairs.is_empty() {
        return Err(Error::Degenerate("G-functions have no common support on the grid".into()));
    }
    let k = pairs.len() as f64;
    let phi_mean = pairs.iter().map(|p| p.0).sum::<f64>() / k;
    let psi_mean = pairs.iter().map(|p| p.1).sum::<f64>() / k;
    Ok(OkounkovEnergy {
        estimate: phi_mean - psi_mean,
        phi_mean,
        psi_mean,
        levels: high.iter().map(|r| r.n).collect(),
        differences: pairs.iter().map(|p| p.0 - p.1).collect(),
    })
}

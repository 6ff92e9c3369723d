//! Reconstruction error, coefficient sparsity and the MSE-versus-measurements sweep.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bases::{BasisKind, BasisPair};
use crate::error::{Error, Result};
use crate::recon::{reconstruct, ReconConfig};
use crate::sensing::{measure, select_indices};
use crate::signal::Signal;

/// Mean squared magnitude of the sample-wise difference.
pub fn mse(a: &Signal, b: &Signal) -> Result<f64> {
    mse_samples(a.samples(), b.samples())
}

pub fn mse_samples(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    Error::check_len(a.len(), b.len())?;
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        / a.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityReport {
    /// Coefficients larger than `threshold_rel` times the largest magnitude.
    pub significant_count: usize,
    pub threshold_rel: f64,
    /// `l1 / l2`, between 1 (one nonzero) and `sqrt(n)` (flat).
    pub l1_over_l2: f64,
}

pub fn sparsity_report(coefficients: &[Complex64], threshold_rel: f64) -> Result<SparsityReport> {
    if coefficients.is_empty() {
        return Err(Error::InvalidArgument("sparsity of an empty vector".into()));
    }
    if !(threshold_rel > 0.0 && threshold_rel < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold_rel}"
        )));
    }
    let mags: Vec<f64> = coefficients.iter().map(|c| c.norm()).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    let l1: f64 = mags.iter().sum();
    let l2 = mags.iter().map(|m| m * m).sum::<f64>().sqrt();
    if max == 0.0 {
        return Ok(SparsityReport {
            significant_count: 0,
            threshold_rel,
            l1_over_l2: 1.0,
        });
    }
    Ok(SparsityReport {
        significant_count: mags.iter().filter(|&&m| m > threshold_rel * max).count(),
        threshold_rel,
        l1_over_l2: l1 / l2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub basis: BasisKind,
    pub fraction: f64,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub mse: f64,
    /// `mse` divided by the mean power of the original signal.
    pub mse_normalized: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Mean MSE over the trials of one `(basis, fraction)` cell.
    pub fn mean_mse(&self, basis: BasisKind, fraction: f64) -> Option<f64> {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.basis == basis && r.fraction == fraction)
            .map(|r| r.mse)
            .collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    /// Distinct fractions in first-seen order.
    pub fn fractions(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.fraction) {
                out.push(r.fraction);
            }
        }
        out
    }

    pub fn bases(&self) -> Vec<BasisKind> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.basis) {
                out.push(r.basis);
            }
        }
        out
    }
}

/// One `(basis, fraction, trial)` cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub basis_index: usize,
    pub fraction: f64,
    pub trial: usize,
}

/// Number of measurements for a fraction of `n` samples.
pub fn measurement_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).round() as usize
}

fn run_cell(
    signal: &Signal,
    basis: &BasisPair,
    cell: SweepCell,
    base_seed: u64,
    config: &ReconConfig,
) -> Result<SweepRow> {
    let n = signal.len();
    let m = measurement_count(cell.fraction, n);
    let seed = base_seed.wrapping_add(cell.trial as u64);
    let indices = select_indices(n, m, seed)?;
    let meas = measure(signal, &indices, seed)?;
    let result = reconstruct(&meas, basis, config)?;
    let err = mse(&result.recovered, signal)?;
    let power = signal.power();
    Ok(SweepRow {
        basis: basis.kind(),
        fraction: cell.fraction,
        m,
        trial: cell.trial,
        seed,
        mse: err,
        mse_normalized: if power > 0.0 { err / power } else { err },
        converged: result.converged,
        iterations: result.iterations,
    })
}

/// Runs every cell and returns the successful rows in `(basis, fraction,
/// trial)` order together with the cells that failed.
pub fn mse_sweep_lenient(
    signal: &Signal,
    bases: &[BasisPair],
    fractions: &[f64],
    trials: usize,
    base_seed: u64,
    config: &ReconConfig,
) -> Result<(SweepTable, Vec<(SweepCell, Error)>)> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "measurement fraction {f} outside (0, 1]"
        )));
    }
    config.validate()?;
    for b in bases {
        Error::check_len(signal.len(), b.n())?;
    }

    let cells: Vec<SweepCell> = (0..bases.len())
        .flat_map(|basis_index| {
            fractions.iter().flat_map(move |&fraction| {
                (0..trials).map(move |trial| SweepCell {
                    basis_index,
                    fraction,
                    trial,
                })
            })
        })
        .collect();
    let outcomes: Vec<Result<SweepRow>> = cells
        .par_iter()
        .map(|&cell| run_cell(signal, &bases[cell.basis_index], cell, base_seed, config))
        .collect();

    let mut table = SweepTable::default();
    let mut failures = Vec::new();
    for (cell, outcome) in cells.into_iter().zip(outcomes) {
        match outcome {
            Ok(row) => table.rows.push(row),
            Err(e) => failures.push((cell, e)),
        }
    }
    Ok((table, failures))
}

/// For every basis, fraction and trial: draw `round(fraction * n)` samples
/// with seed `base_seed + trial`, reconstruct, and record the MSE against
/// `signal`. Fails on the first failing cell.
pub fn mse_sweep(
    signal: &Signal,
    bases: &[BasisPair],
    fractions: &[f64],
    trials: usize,
    base_seed: u64,
    config: &ReconConfig,
) -> Result<SweepTable> {
    let (table, failures) = mse_sweep_lenient(signal, bases, fractions, trials, base_seed, config)?;
    match failures.into_iter().next() {
        Some((_, e)) => Err(e),
        None => Ok(table),
    }
}

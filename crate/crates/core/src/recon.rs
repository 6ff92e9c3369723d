//! Missing-sample recovery by adaptive variable-step gradient descent on the
//! l1 norm of the transform coefficients.
//!
//! Missing samples start at zero. Each iteration perturbs every missing
//! sample by `+/- step` (and `+/- j*step`), measures the change of the l1
//! norm of the coefficients, and moves the sample against that slope. The
//! step is divided by `step_divisor` whenever successive gradients point in
//! nearly opposite directions or the objective stops decreasing, and the run
//! ends once the step has shrunk by `target_digits` orders of magnitude.
//!
//! Slopes are normalized per sample by the l1 norm of the corresponding
//! analysis-matrix column, which bounds each component to `[-1, 1]`
//! regardless of the basis scaling, so a single update moves a sample by at
//! most `update_scale * step` per real or imaginary component.

use ndarray::ArrayView1;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bases::BasisPair;
use crate::error::{Error, Result};
use crate::sensing::MeasurementSet;
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialStep {
    /// Largest magnitude among the available samples.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconConfig {
    pub initial_step: InitialStep,
    pub step_divisor: f64,
    pub update_scale: f64,
    pub target_digits: u32,
    pub max_iters: usize,
    /// Step is reduced when successive gradients are further apart than this.
    pub oscillation_angle_deg: f64,
    /// Step is reduced when an iteration lowers the l1 measure by less than
    /// this fraction.
    pub min_relative_decrease: f64,
}

impl Default for ReconConfig {
    fn default() -> Self {
        ReconConfig {
            initial_step: InitialStep::Auto,
            step_divisor: 3.0,
            update_scale: 1.0,
            target_digits: 6,
            max_iters: 10_000,
            oscillation_angle_deg: 170.0,
            min_relative_decrease: 1e-6,
        }
    }
}

impl ReconConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::InvalidArgument(format!(
                "reconstruction config: {what}"
            )))
        };
        if let InitialStep::Fixed(s) = self.initial_step {
            if !(s.is_finite() && s > 0.0) {
                return bad("initial step must be positive");
            }
        }
        if !(self.step_divisor.is_finite() && self.step_divisor > 1.0) {
            return bad("step divisor must exceed 1");
        }
        if !(self.update_scale.is_finite() && self.update_scale > 0.0) {
            return bad("update scale must be positive");
        }
        if self.target_digits == 0 {
            return bad("target digits must be positive");
        }
        if self.max_iters == 0 {
            return bad("max iterations must be positive");
        }
        if !(self.oscillation_angle_deg > 90.0 && self.oscillation_angle_deg <= 180.0) {
            return bad("oscillation angle must lie in (90, 180]");
        }
        if !(self.min_relative_decrease.is_finite() && self.min_relative_decrease >= 0.0) {
            return bad("minimum relative decrease must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ReconResult {
    pub recovered: Signal,
    pub iterations: usize,
    /// `(iteration, step)` at the start of the run and after every reduction.
    pub step_history: Vec<(usize, f64)>,
    /// l1 measure of the initial estimate followed by one value per iteration.
    pub measure_history: Vec<f64>,
    pub converged: bool,
}

impl ReconResult {
    /// Step in force during `iteration` (0 = initial estimate).
    pub fn step_at(&self, iteration: usize) -> f64 {
        self.step_history
            .iter()
            .take_while(|(i, _)| *i <= iteration)
            .last()
            .map_or(0.0, |(_, s)| *s)
    }
}

/// Sum of coefficient magnitudes.
pub fn sparsity_measure(coefficients: &[Complex64]) -> f64 {
    coefficients.iter().map(|c| c.norm_sqr().sqrt()).sum()
}

/// `(l1(X + delta*col) - l1(X - delta*col)) / 2` with `delta = step` (real
/// part) and `delta = j*step` (imaginary part), evaluated term by term as
/// `2 Re(x conj(delta c)) / (|x + delta c| + |x - delta c|)` to avoid
/// cancellation between two large sums.
fn half_difference(coeffs: &[Complex64], col: ArrayView1<'_, Complex64>, step: f64) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, c) in coeffs.iter().zip(col.iter()) {
        let d = c * step;
        let cross = x * d.conj();
        let real_den = (x + d).norm_sqr().sqrt() + (x - d).norm_sqr().sqrt();
        if real_den > 0.0 {
            re += 2.0 * cross.re / real_den;
        }
        let jd = Complex64::new(-d.im, d.re);
        let imag_den = (x + jd).norm_sqr().sqrt() + (x - jd).norm_sqr().sqrt();
        if imag_den > 0.0 {
            // Re(x conj(j d)) = Im(x conj(d))
            im += 2.0 * cross.im / imag_den;
        }
    }
    Complex64::new(re, im)
}

fn gradient_from_coefficients(
    coeffs: &[Complex64],
    missing: &[usize],
    basis: &BasisPair,
    step: f64,
) -> Vec<Complex64> {
    missing
        .par_iter()
        .with_min_len(16)
        .map(|&i| half_difference(coeffs, basis.forward_column(i), step) / step)
        .collect()
}

/// Central-difference slope of `l1(analyze(current))` with respect to the
/// real and imaginary part of every sample in `missing`.
pub fn gradient(
    current: &[Complex64],
    missing: &[usize],
    basis: &BasisPair,
    step: f64,
) -> Result<Vec<Complex64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gradient step must be positive, got {step}"
        )));
    }
    if let Some(&bad) = missing.iter().find(|&&i| i >= basis.n()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: basis.n(),
        });
    }
    let coeffs = basis.analyze(current)?;
    Ok(gradient_from_coefficients(&coeffs, missing, basis, step))
}

fn angle_deg(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    let dot: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum();
    let na = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na * nb)).clamp(-1.0, 1.0).acos().to_degrees())
}

/// Recovers the samples missing from `meas`.
///
/// Available samples are copied verbatim and never touched. A run that hits
/// `max_iters` before the step criterion is returned with `converged = false`.
pub fn reconstruct(
    meas: &MeasurementSet,
    basis: &BasisPair,
    config: &ReconConfig,
) -> Result<ReconResult> {
    config.validate()?;
    Error::check_len(basis.n(), meas.n())?;

    let mut current = meas.zero_filled();
    let missing = meas.missing();
    let mut coeffs = basis.analyze(&current)?;
    let mut measure = sparsity_measure(&coeffs);

    let initial_step = match config.initial_step {
        InitialStep::Fixed(s) => s,
        InitialStep::Auto => meas.values().iter().map(|v| v.norm()).fold(0.0, f64::max),
    };
    let finished =
        |iterations, step_history, measure_history, current: Vec<Complex64>, converged| {
            Ok(ReconResult {
                recovered: Signal::new(current, meas.dt())?,
                iterations,
                step_history,
                measure_history,
                converged,
            })
        };
    if missing.is_empty() || initial_step == 0.0 {
        return finished(0, vec![(0, initial_step)], vec![measure], current, true);
    }

    let lipschitz: Vec<f64> = missing
        .iter()
        .map(|&i| {
            basis
                .forward_column(i)
                .iter()
                .map(|c| c.norm())
                .sum::<f64>()
        })
        .collect();
    let stop_below = initial_step * 10f64.powi(-(config.target_digits as i32));

    let mut step = initial_step;
    let mut step_history = vec![(0, step)];
    let mut measure_history = vec![measure];
    let mut previous_direction: Option<Vec<Complex64>> = None;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iters {
        iterations += 1;

        let mut direction = gradient_from_coefficients(&coeffs, &missing, basis, step);
        for (g, l) in direction.iter_mut().zip(&lipschitz) {
            if *l > 0.0 {
                *g /= *l;
            }
        }

        let oscillating = match &previous_direction {
            Some(prev) => {
                angle_deg(prev, &direction).is_none_or(|a| a > config.oscillation_angle_deg)
            }
            None => direction.iter().all(|g| g.norm() == 0.0),
        };

        let mut reduce = oscillating;
        if !oscillating {
            let before: Vec<Complex64> = missing.iter().map(|&i| current[i]).collect();
            for (&i, g) in missing.iter().zip(&direction) {
                current[i] -= g * (config.update_scale * step);
            }
            let trial = basis.analyze(&current)?;
            let trial_measure = sparsity_measure(&trial);
            if trial_measure > measure {
                for (&i, v) in missing.iter().zip(before) {
                    current[i] = v;
                }
                reduce = true;
            } else {
                reduce = (measure - trial_measure) < config.min_relative_decrease * measure;
                coeffs = trial;
                measure = trial_measure;
            }
        }
        measure_history.push(measure);

        if reduce {
            step /= config.step_divisor;
            step_history.push((iterations, step));
            previous_direction = None;
            if step < stop_below {
                converged = true;
                break;
            }
        } else {
            previous_direction = Some(direction);
        }
    }

    finished(
        iterations,
        step_history,
        measure_history,
        current,
        converged,
    )
}

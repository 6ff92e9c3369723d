//! Seeded random sample selection and the partial synthesis matrix.

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bases::BasisPair;
use crate::error::{Error, Result};
use crate::signal::Signal;

/// The available samples of a length-`n` signal.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    n: usize,
    indices: Vec<usize>,
    values: Vec<Complex64>,
    seed: u64,
    dt: f64,
}

impl MeasurementSet {
    /// Builds a measurement set from explicit parts, e.g. when loading from disk.
    pub fn from_parts(
        n: usize,
        indices: Vec<usize>,
        values: Vec<Complex64>,
        seed: u64,
        dt: f64,
    ) -> Result<Self> {
        validate_indices(n, &indices)?;
        if indices.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one measurement is required".into(),
            ));
        }
        Error::check_len(indices.len(), values.len())?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        Ok(MeasurementSet {
            n,
            indices,
            values,
            seed,
            dt,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of available samples.
    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Sample positions not covered by the measurement, ascending.
    pub fn missing(&self) -> Vec<usize> {
        let mut available = vec![false; self.n];
        for &i in &self.indices {
            available[i] = true;
        }
        (0..self.n).filter(|&i| !available[i]).collect()
    }

    /// Full-length vector with measured values in place and zeros elsewhere.
    pub fn zero_filled(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.n];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }
}

fn validate_indices(n: usize, indices: &[usize]) -> Result<()> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "indices must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `m` distinct indices drawn uniformly from `0..n`, sorted ascending.
///
/// A partial Fisher-Yates shuffle driven by ChaCha8 seeded with `seed`, so
/// the result is a pure function of `(n, m, seed)`.
pub fn select_indices(n: usize, m: usize, seed: u64) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "cannot select {m} of {n} samples"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    let (chosen, _) = pool.partial_shuffle(&mut rng, m);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Samples `signal` at `indices` (the row selection `y = theta * x`).
pub fn measure(signal: &Signal, indices: &[usize], seed: u64) -> Result<MeasurementSet> {
    validate_indices(signal.len(), indices)?;
    let values = indices.iter().map(|&i| signal.samples()[i]).collect();
    MeasurementSet::from_parts(signal.len(), indices.to_vec(), values, seed, signal.dt())
}

/// Rows of the synthesis matrix at `indices`, so that `y = A * X` for the
/// coefficient vector `X`.
pub fn partial_matrix(basis: &BasisPair, indices: &[usize]) -> Result<Array2<Complex64>> {
    validate_indices(basis.n(), indices)?;
    Ok(basis.inverse().select(Axis(0), indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{build_basis, mat_vec, BasisKind};
    use crate::signal::{generate_fhss, FhssConfig};
    use proptest::prelude::*;

    #[test]
    fn full_selection() {
        for seed in [0, 7, u64::MAX] {
            assert_eq!(select_indices(5, 5, seed).unwrap(), vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn full_size_selection_is_reproducible() {
        let a = select_indices(600, 180, 42).unwrap();
        let b = select_indices(600, 180, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 180);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(*a.last().unwrap() < 600);
    }

    #[test]
    fn seeds_change_selection() {
        let differing = (0..20u64)
            .filter(|&s| {
                select_indices(10, 3, 2 * s).unwrap() != select_indices(10, 3, 2 * s + 1).unwrap()
            })
            .count();
        assert!(differing >= 1);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(select_indices(5, 0, 1).is_err());
        assert!(select_indices(5, 6, 1).is_err());
    }

    #[test]
    fn selection_is_uniform() {
        let (n, m, draws) = (20, 5, 10_000u64);
        let mut counts = vec![0usize; n];
        for seed in 0..draws {
            for i in select_indices(n, m, seed).unwrap() {
                counts[i] += 1;
            }
        }
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.25).abs() < 0.02, "frequency {freq}");
        }
    }

    #[test]
    fn measuring_the_preset_signal() {
        let s = generate_fhss(&FhssConfig::paper_preset()).unwrap();
        let idx = select_indices(600, 480, 3).unwrap();
        let meas = measure(&s, &idx, 3).unwrap();
        assert_eq!(meas.m(), 480);
        assert_eq!(meas.missing().len(), 120);
        for (&i, v) in meas.indices().iter().zip(meas.values()) {
            assert_eq!(*v, s.samples()[i]);
        }

        let all: Vec<usize> = (0..600).collect();
        assert_eq!(measure(&s, &all, 0).unwrap().values(), s.samples());
    }

    #[test]
    fn measure_rejects_bad_indices() {
        let s = Signal::new(vec![Complex64::new(1.0, 0.0); 4], 1.0).unwrap();
        assert!(matches!(
            measure(&s, &[1, 4], 0),
            Err(Error::IndexOutOfRange { index: 4, len: 4 })
        ));
        assert!(measure(&s, &[2, 1], 0).is_err());
        let m = measure(&s, &[0, 3], 0).unwrap();
        assert!(m.values().iter().all(|&v| v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn partial_matrix_rows() {
        let b = build_basis(BasisKind::Fourier, 4).unwrap();
        let all = partial_matrix(&b, &[0, 1, 2, 3]).unwrap();
        assert_eq!(&all, b.inverse());
        let first = partial_matrix(&b, &[0]).unwrap();
        assert_eq!(first.shape(), &[1, 4]);
        assert!(first
            .iter()
            .all(|z| (z - Complex64::new(0.25, 0.0)).norm() < 1e-15));
        assert!(partial_matrix(&b, &[4]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn partial_matrix_consistent_with_measure(
            n in 2usize..=128,
            frac in 0.05f64..1.0,
            seed in any::<u64>(),
            hermite in any::<bool>(),
        ) {
            let kind = if hermite { BasisKind::Hermite } else { BasisKind::Fourier };
            let b = build_basis(kind, n).unwrap();
            let m = ((frac * n as f64).round() as usize).clamp(1, n);
            let idx = select_indices(n, m, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rand::Rng::gen_range(&mut rng, -1.0..1.0), rand::Rng::gen_range(&mut rng, -1.0..1.0)))
                .collect();
            let s = Signal::new(samples, 1.0).unwrap();
            let a = partial_matrix(&b, &idx).unwrap();
            let y = mat_vec(&a, &b.analyze_signal(&s).unwrap());
            let meas = measure(&s, &idx, seed).unwrap();
            for (u, v) in y.iter().zip(meas.values()) {
                prop_assert!((u - v).norm() < 1e-8);
            }
        }
    }
}

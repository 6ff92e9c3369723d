//! Dense analysis/synthesis matrix pairs for the discrete Hermite transform
//! and the DFT.
//!
//! The Hermite pair uses the `n` roots of `H_n` as quadrature nodes. The
//! synthesis matrix holds the Hermite functions evaluated at the nodes,
//! `inverse[m][p] = psi_p(x_m)`, and the analysis matrix is the Gauss-Hermite
//! quadrature rule
//!
//! ```text
//! forward[p][m] = psi_p(x_m) / (n * psi_{n-1}(x_m)^2)
//! ```
//!
//! which inverts the synthesis matrix exactly in exact arithmetic. The
//! Fourier pair puts the `1/n` factor on the synthesis side.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Deviation from identity above which a basis is reported as poorly conditioned.
pub const CONDITIONING_WARN: f64 = 1e-6;
/// Deviation from identity above which a basis is rejected outright.
pub const CONDITIONING_FAIL: f64 = 1.0;

// Keeps the scaled recurrence away from overflow; the true value is
// `stored * exp(log_scale)`.
const RESCALE_ABOVE: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    Hermite,
    Fourier,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Hermite => "hermite",
            BasisKind::Fourier => "fourier",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hermite" | "ht" => Ok(BasisKind::Hermite),
            "fourier" | "dft" => Ok(BasisKind::Fourier),
            other => Err(Error::InvalidArgument(format!("unknown basis '{other}'"))),
        }
    }
}

/// Runs the normalized recurrence up to order `p` at `x`, calling `visit(q, psi_q(x))`
/// for every order `q <= p`. Returns `(psi_{p-1}, psi_p)` in a common, unspecified
/// scale together with the log of that scale.
fn hermite_recurrence(p: usize, x: f64, mut visit: impl FnMut(usize, f64)) -> (f64, f64, f64) {
    let mut log_scale = -0.5 * x * x;
    let emit = |q: usize, stored: f64, log_scale: f64, visit: &mut dyn FnMut(usize, f64)| {
        visit(
            q,
            if stored == 0.0 {
                0.0
            } else {
                stored * log_scale.exp()
            },
        )
    };

    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    emit(0, cur, log_scale, &mut visit);
    for q in 1..=p {
        let qf = q as f64;
        let next = x * (2.0 / qf).sqrt() * cur - ((qf - 1.0) / qf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
        emit(q, cur, log_scale, &mut visit);
    }
    (prev, cur, log_scale)
}

/// Hermite function of order `p` at `x`, normalized so that
/// `integral psi_p(x)^2 dx = 1`.
pub fn hermite_function(p: usize, x: f64) -> f64 {
    let mut value = 0.0;
    hermite_recurrence(p, x, |q, v| {
        if q == p {
            value = v;
        }
    });
    value
}

/// `psi_0(x), ..., psi_{count-1}(x)`.
pub fn hermite_functions(count: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if count > 0 {
        hermite_recurrence(count - 1, x, |q, v| out[q] = v);
    }
    out
}

/// Zeros of the physicists' Hermite polynomial `H_order`, ascending.
///
/// Eigenvalues of the Jacobi matrix (zero diagonal, off-diagonal
/// `sqrt(k/2)`), each refined by Newton steps on `psi_order`.
pub fn hermite_roots(order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "Hermite root order must be positive".into(),
        ));
    }
    let diag = vec![0.0; order];
    let off: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut roots = symmetric_tridiagonal_eigenvalues(diag, off)?;

    let sqrt_2n = (2.0 * order as f64).sqrt();
    for x in roots.iter_mut() {
        for _ in 0..3 {
            let (prev, cur, _) = hermite_recurrence(order, *x, |_, _| {});
            // psi_n'(x) = sqrt(2n) psi_{n-1}(x) - x psi_n(x); the common scale cancels.
            let deriv = sqrt_2n * prev - *x * cur;
            if deriv == 0.0 {
                break;
            }
            let delta = cur / deriv;
            *x -= delta;
            if delta.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));

    // Parity: the roots come in +/- pairs, with 0 in the middle for odd orders.
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let r = 0.5 * (roots[j] - roots[i]);
        roots[i] = -r;
        roots[j] = r;
    }
    if order % 2 == 1 {
        roots[order / 2] = 0.0;
    }
    Ok(roots)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub-diagonal `off` (length `n - 1`), by implicit QL with Wilkinson shifts.
fn symmetric_tridiagonal_eigenvalues(mut d: Vec<f64>, off: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    let mut e = off;
    e.push(0.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::InvalidArgument(
                    "tridiagonal eigenvalue iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Forward (analysis) and inverse (synthesis) matrices of one transform domain.
#[derive(Debug, Clone)]
pub struct BasisPair {
    kind: BasisKind,
    forward: Array2<Complex64>,
    inverse: Array2<Complex64>,
    // forward transposed into row-major order for contiguous column access
    forward_columns: Array2<Complex64>,
    identity_deviation: f64,
}

/// Builds the `n`-point Hermite or Fourier basis pair.
///
/// Fails only if `forward * inverse` is unusable (deviation from identity
/// non-finite or at least [`CONDITIONING_FAIL`]); deviations above
/// [`CONDITIONING_WARN`] are logged and available via
/// [`BasisPair::identity_deviation`].
pub fn build_basis(kind: BasisKind, n: usize) -> Result<BasisPair> {
    if n == 0 {
        return Err(Error::InvalidArgument("basis size must be positive".into()));
    }
    let (forward, inverse) = match kind {
        BasisKind::Hermite => hermite_matrices(n)?,
        BasisKind::Fourier => fourier_matrices(n),
    };
    let identity_deviation = max_identity_deviation(&forward, &inverse);
    if !identity_deviation.is_finite() || identity_deviation >= CONDITIONING_FAIL {
        return Err(Error::Conditioning {
            deviation: identity_deviation,
        });
    }
    if identity_deviation > CONDITIONING_WARN {
        log::warn!("{kind} basis with n = {n} is poorly conditioned: max |forward*inverse - I| = {identity_deviation:e}");
    }
    let forward_columns = forward.t().as_standard_layout().into_owned();
    Ok(BasisPair {
        kind,
        forward,
        inverse,
        forward_columns,
        identity_deviation,
    })
}

fn hermite_matrices(n: usize) -> Result<(Array2<Complex64>, Array2<Complex64>)> {
    let nodes = hermite_roots(n)?;
    // table[m][p] = psi_p(x_m)
    let table: Vec<Vec<f64>> = nodes.iter().map(|&x| hermite_functions(n, x)).collect();
    let inverse = Array2::from_shape_fn((n, n), |(m, p)| Complex64::new(table[m][p], 0.0));
    let weights: Vec<f64> = table
        .iter()
        .map(|row| {
            let last = row[n - 1];
            1.0 / (n as f64 * last * last)
        })
        .collect();
    let forward = Array2::from_shape_fn((n, n), |(p, m)| {
        Complex64::new(table[m][p] * weights[m], 0.0)
    });
    Ok((forward, inverse))
}

fn fourier_matrices(n: usize) -> (Array2<Complex64>, Array2<Complex64>) {
    // Reduce k*m mod n before scaling so large products keep full phase accuracy.
    let phase = |k: usize, m: usize| 2.0 * PI * ((k * m) % n) as f64 / n as f64;
    let scale = 1.0 / n as f64;
    let inverse = Array2::from_shape_fn((n, n), |(m, k)| Complex64::from_polar(scale, phase(k, m)));
    let forward = Array2::from_shape_fn((n, n), |(k, m)| Complex64::cis(-phase(k, m)));
    (forward, inverse)
}

fn max_identity_deviation(forward: &Array2<Complex64>, inverse: &Array2<Complex64>) -> f64 {
    let product = forward.dot(inverse);
    product
        .indexed_iter()
        .map(|((r, c), z)| {
            let target = if r == c { 1.0 } else { 0.0 };
            (z - target).norm()
        })
        .fold(0.0, |acc, v| {
            if v.is_nan() || acc.is_nan() {
                f64::NAN
            } else {
                acc.max(v)
            }
        })
}

impl BasisPair {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.forward.nrows()
    }

    pub fn forward(&self) -> &Array2<Complex64> {
        &self.forward
    }

    pub fn inverse(&self) -> &Array2<Complex64> {
        &self.inverse
    }

    /// Column `i` of the analysis matrix: the coefficient response to a unit
    /// impulse at sample `i`.
    pub fn forward_column(&self, i: usize) -> ArrayView1<'_, Complex64> {
        self.forward_columns.row(i)
    }

    /// `max |forward * inverse - I|`, measured at construction.
    pub fn identity_deviation(&self) -> f64 {
        self.identity_deviation
    }

    pub fn is_well_conditioned(&self) -> bool {
        self.identity_deviation <= CONDITIONING_WARN
    }

    /// Transform coefficients `forward * samples`.
    pub fn analyze(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        Error::check_len(self.n(), samples.len())?;
        Ok(mat_vec(&self.forward, samples))
    }

    /// Time-domain samples `inverse * coefficients`.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
        Error::check_len(self.n(), coefficients.len())?;
        Ok(mat_vec(&self.inverse, coefficients))
    }

    pub fn analyze_signal(&self, signal: &Signal) -> Result<Vec<Complex64>> {
        self.analyze(signal.samples())
    }

    pub fn synthesize_signal(&self, coefficients: &[Complex64], dt: f64) -> Result<Signal> {
        Signal::new(self.synthesize(coefficients)?, dt)
    }
}

pub(crate) fn mat_vec(matrix: &Array2<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    matrix
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

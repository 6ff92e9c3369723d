//! Multi-hop complex sinusoid generation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};

/// A fraction of the signal length, e.g. `1/3`.
pub type Frac = Ratio<u64>;

/// One constant-frequency segment of an FHSS signal.
///
/// The hop covers the half-open sample range `[floor(start*N), floor(end*N))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    /// Angular frequency in radians per time unit.
    pub omega: f64,
    pub start: Frac,
    pub end: Frac,
}

impl Hop {
    pub fn new(omega: f64, start: Frac, end: Frac) -> Self {
        Hop { omega, start, end }
    }

    /// Sample range of this hop for a signal of length `n`.
    pub fn range(&self, n: usize) -> std::ops::Range<usize> {
        frac_floor(self.start, n)..frac_floor(self.end, n)
    }
}

fn frac_floor(f: Frac, n: usize) -> usize {
    ((*f.numer() as u128 * n as u128) / *f.denom() as u128) as usize
}

/// Parses `omega:start:end`, where omega may carry a `pi` suffix
/// (`-20pi:0:1/3`) and the bounds are fractions (`1/3`) or integers.
impl FromStr for Hop {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidArgument(format!("cannot parse hop '{s}', expected omega:start:end"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let omega = parse_omega(parts[0]).ok_or_else(bad)?;
        let start = parts[1].trim().parse::<Frac>().map_err(|_| bad())?;
        let end = parts[2].trim().parse::<Frac>().map_err(|_| bad())?;
        Ok(Hop { omega, start, end })
    }
}

impl fmt::Display for Hop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.omega, self.start, self.end)
    }
}

fn parse_omega(s: &str) -> Option<f64> {
    let s = s.trim();
    let (body, scale) = if let Some(b) = s.strip_suffix("pi") {
        (b, PI)
    } else if let Some(b) = s.strip_suffix('π') {
        (b, PI)
    } else {
        (s, 1.0)
    };
    let body = body.trim().trim_end_matches('*');
    let value = match body {
        "" | "+" => 1.0,
        "-" => -1.0,
        b => b.parse::<f64>().ok()?,
    };
    let omega = value * scale;
    omega.is_finite().then_some(omega)
}

/// Parameters of a multi-hop signal on the grid `t_k = k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FhssConfig {
    pub n: usize,
    pub dt: f64,
    pub hops: Vec<Hop>,
}

impl FhssConfig {
    /// Three equal-length hops at -20π, +14π and -4π rad per time unit,
    /// 600 samples at dt = 1/100.
    pub fn paper_preset() -> Self {
        let third = |k| Frac::new(k, 3);
        FhssConfig {
            n: 600,
            dt: 0.01,
            hops: vec![
                Hop::new(-20.0 * PI, third(0), third(1)),
                Hop::new(14.0 * PI, third(1), third(2)),
                Hop::new(-4.0 * PI, third(2), third(3)),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument(
                "signal length must be positive".into(),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        let (first, last) = match (self.hops.first(), self.hops.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::InvalidHops("no hops given".into())),
        };
        if *first.start.numer() != 0 {
            return Err(Error::InvalidHops(format!(
                "first hop starts at {}, not 0",
                first.start
            )));
        }
        if last.end != Frac::from_integer(1) {
            return Err(Error::InvalidHops(format!(
                "last hop ends at {}, not 1",
                last.end
            )));
        }
        for hop in &self.hops {
            if hop.start >= hop.end {
                return Err(Error::InvalidHops(format!("empty or reversed hop {hop}")));
            }
            if !hop.omega.is_finite() {
                return Err(Error::InvalidHops(format!(
                    "non-finite frequency in hop {hop}"
                )));
            }
        }
        for pair in self.hops.windows(2) {
            if pair[0].end != pair[1].start {
                return Err(Error::InvalidHops(format!(
                    "hop ending at {} is followed by hop starting at {}",
                    pair[0].end, pair[1].start
                )));
            }
        }
        Ok(())
    }
}

/// A complex time-domain signal sampled every `dt` time units.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    dt: f64,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if let Some(k) = samples
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidArgument(format!("sample {k} is not finite")));
        }
        Ok(Signal { samples, dt })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `|x_k|^2`.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Generates `exp(j * omega_h * k * dt)` for every sample `k` of hop `h`.
pub fn generate_fhss(config: &FhssConfig) -> Result<Signal> {
    config.validate()?;
    let mut samples = Vec::with_capacity(config.n);
    for hop in &config.hops {
        samples.extend(
            hop.range(config.n)
                .map(|k| Complex64::cis(hop.omega * k as f64 * config.dt)),
        );
    }
    debug_assert_eq!(samples.len(), config.n);
    Signal::new(samples, config.dt)
}

/// A single complex exponential `exp(j * omega * k * dt)`, `k = 0..n`.
pub fn generate_sinusoid(omega: f64, n: usize, dt: f64) -> Result<Signal> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "signal length must be positive".into(),
        ));
    }
    if !omega.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "omega must be finite, got {omega}"
        )));
    }
    let samples = (0..n)
        .map(|k| Complex64::cis(omega * k as f64 * dt))
        .collect();
    Signal::new(samples, dt)
}

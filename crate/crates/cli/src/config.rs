//! JSON experiment configuration. Every field is optional; command-line flags
//! take precedence over values read from the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fhss_cs::{BasisKind, FhssConfig, Hop, InitialStep, ReconConfig};
use serde::{Deserialize, Serialize};

pub const PAPER_PRESET: &str = "fhss-paper";

/// Fractions swept when none are given: 0.1, 0.2, ..., 0.9.
pub fn default_fractions() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

pub const DEFAULT_TRIALS: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub signal: Option<SignalSpec>,
    /// `hermite`, `fourier` or `both`.
    pub basis: Option<String>,
    pub fractions: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub base_seed: Option<u64>,
    #[serde(default)]
    pub recon: ReconOverrides,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub n: Option<usize>,
    pub dt: Option<f64>,
    /// `omega:start:end` strings, e.g. `-20pi:0:1/3`.
    pub hops: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ReconOverrides {
    /// Initial step; `auto` uses the largest available sample magnitude.
    #[arg(long, value_name = "STEP|auto")]
    pub initial_step: Option<StepSetting>,
    /// Divisor applied to the step on every reduction (> 1).
    #[arg(long)]
    pub step_divisor: Option<f64>,
    /// Multiplier on the per-iteration update.
    #[arg(long)]
    pub update_scale: Option<f64>,
    /// Stop once the step has shrunk by this many decimal digits.
    #[arg(long)]
    pub target_digits: Option<u32>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Gradient angle (degrees) above which the step is reduced.
    #[arg(long)]
    pub oscillation_angle: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSetting {
    Fixed(f64),
    Named(AutoStep),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoStep {
    Auto,
}

impl std::str::FromStr for StepSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(StepSetting::Named(AutoStep::Auto));
        }
        s.parse::<f64>()
            .map(StepSetting::Fixed)
            .map_err(|_| format!("expected a number or 'auto', got '{s}'"))
    }
}

impl ReconOverrides {
    /// `self` with unset fields filled from `fallback`.
    pub fn or(&self, fallback: &ReconOverrides) -> ReconOverrides {
        ReconOverrides {
            initial_step: self.initial_step.or(fallback.initial_step),
            step_divisor: self.step_divisor.or(fallback.step_divisor),
            update_scale: self.update_scale.or(fallback.update_scale),
            target_digits: self.target_digits.or(fallback.target_digits),
            max_iters: self.max_iters.or(fallback.max_iters),
            oscillation_angle: self.oscillation_angle.or(fallback.oscillation_angle),
        }
    }

    pub fn resolve(&self) -> Result<ReconConfig> {
        let mut cfg = ReconConfig::default();
        match self.initial_step {
            Some(StepSetting::Fixed(s)) => cfg.initial_step = InitialStep::Fixed(s),
            Some(StepSetting::Named(AutoStep::Auto)) | None => {}
        }
        if let Some(v) = self.step_divisor {
            cfg.step_divisor = v;
        }
        if let Some(v) = self.update_scale {
            cfg.update_scale = v;
        }
        if let Some(v) = self.target_digits {
            cfg.target_digits = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.oscillation_angle {
            cfg.oscillation_angle_deg = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Parses comma-separated hop specs.
pub fn parse_hops(spec: &str) -> Result<Vec<Hop>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Hop>().map_err(Into::into))
        .collect()
}

/// Resolves the signal definition from a preset or explicit hops, with `n`
/// and `dt` overriding either.
pub fn resolve_signal(
    preset: Option<&str>,
    hops: Option<Vec<Hop>>,
    n: Option<usize>,
    dt: Option<f64>,
) -> Result<FhssConfig> {
    let mut cfg = match (preset, hops) {
        (Some(_), Some(_)) => bail!("give either a preset or explicit hops, not both"),
        (Some(PAPER_PRESET), None) => FhssConfig::paper_preset(),
        (Some(other), None) => bail!("unknown preset '{other}' (available: {PAPER_PRESET})"),
        (None, Some(hops)) => FhssConfig {
            hops,
            ..FhssConfig::paper_preset()
        },
        (None, None) => bail!("no signal given: use --preset {PAPER_PRESET} or --hops"),
    };
    if let Some(n) = n {
        cfg.n = n;
    }
    if let Some(dt) = dt {
        cfg.dt = dt;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_bases(selection: &str) -> Result<Vec<BasisKind>> {
    match selection.trim().to_ascii_lowercase().as_str() {
        "both" => Ok(vec![BasisKind::Fourier, BasisKind::Hermite]),
        one => Ok(vec![one.parse()?]),
    }
}

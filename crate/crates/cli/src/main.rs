use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod plots;
mod svg;

use config::ReconOverrides;

/// Sparsify FHSS signals in the Hermite and Fourier domains and recover
/// them from random sample subsets.
#[derive(Debug, Parser)]
#[command(name = "fhss-cs", version, about)]
pub struct Cli {
    /// JSON experiment configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Omit the generation-timestamp comment from SVG output.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a multi-hop signal and write it as CSV.
    Gen(GenArgs),
    /// Transform a signal CSV into Hermite or Fourier coefficients.
    Transform(TransformArgs),
    /// Draw a random subset of samples from a signal CSV.
    Sense(SenseArgs),
    /// Recover the missing samples of a measurement CSV.
    Reconstruct(ReconstructArgs),
    /// Run the full domain-comparison experiment.
    Run(RunArgs),
    /// Render any CSV written by this tool as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SignalArgs {
    /// Named signal preset (`fhss-paper`).
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated hops `omega:start:end`, e.g. `-20pi:0:1/3,14pi:1/3:1`.
    #[arg(long, allow_hyphen_values = true)]
    pub hops: Option<String>,
    /// Number of samples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Time step between samples.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Signal CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "fourier")]
    pub basis: String,
    /// Relative threshold for the reported significant-coefficient count.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SenseArgs {
    /// Signal CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Fraction of samples to keep.
    #[arg(long, conflicts_with = "m", required_unless_present = "m")]
    pub fraction: Option<f64>,
    /// Number of samples to keep.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Measurement CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "fourier")]
    pub basis: String,
    /// Recovered signal CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Convergence log CSV (`iteration,step,l1_measure`).
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Original signal CSV; when given, the MSE against it is reported.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub recon: ReconOverrides,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    /// `hermite`, `fourier` or `both`.
    #[arg(long)]
    pub basis: Option<String>,
    /// Comma-separated measurement fractions.
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed; trial t uses seed + t.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub recon: ReconOverrides,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Any CSV written by this tool.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

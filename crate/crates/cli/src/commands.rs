use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use fhss_cs::io::{self, FileKind};
use fhss_cs::metrics::{measurement_count, mse_sweep_lenient};
use fhss_cs::{
    build_basis, generate_fhss, measure, mse, reconstruct, select_indices, sparsity_report,
    BasisPair, FhssConfig, ReconConfig, Signal,
};

use crate::config::{self, default_fractions, ExperimentConfig, DEFAULT_TRIALS};
use crate::plots;
use crate::svg::{self, Panel};
use crate::{
    Cli, Command, GenArgs, PlotArgs, ReconstructArgs, RunArgs, SenseArgs, SignalArgs, TransformArgs,
};

/// Measurement fractions of the two headline reconstructions.
const HEADLINE_FRACTIONS: [f64; 2] = [0.3, 0.8];

pub fn dispatch(cli: &Cli) -> Result<()> {
    let file_config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let ctx = Session {
        file_config,
        timestamp: !cli.no_timestamp,
    };
    match &cli.command {
        Command::Gen(args) => gen(&ctx, args),
        Command::Transform(args) => transform(args),
        Command::Sense(args) => sense(args),
        Command::Reconstruct(args) => reconstruct_cmd(&ctx, args),
        Command::Run(args) => run(&ctx, args),
        Command::Plot(args) => plot(&ctx, args),
    }
}

struct Session {
    file_config: ExperimentConfig,
    timestamp: bool,
}

impl Session {
    fn svg_comment(&self) -> Option<String> {
        self.timestamp.then(|| {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            format!("generated by fhss-cs at unix time {secs}")
        })
    }

    fn write_svg(&self, path: &Path, panels: &[Panel]) -> Result<()> {
        std::fs::write(path, svg::render(panels, self.svg_comment().as_deref()))
            .with_context(|| format!("writing {}", path.display()))
    }

    fn signal_config(&self, args: &SignalArgs) -> Result<FhssConfig> {
        let file = &self.file_config;
        let flag_hops = args.hops.as_deref().map(config::parse_hops).transpose()?;
        let flag_signal = args.preset.is_some() || flag_hops.is_some();
        let (preset, hops) = if flag_signal {
            (args.preset.clone(), flag_hops)
        } else if let Some(spec) = &file.signal {
            let hops = spec
                .hops
                .iter()
                .map(|h| h.parse())
                .collect::<fhss_cs::Result<Vec<_>>>()?;
            (None, Some(hops))
        } else {
            (file.preset.clone(), None)
        };
        let spec = file.signal.as_ref().filter(|_| !flag_signal);
        config::resolve_signal(
            preset.as_deref(),
            hops,
            args.n.or(spec.and_then(|s| s.n)),
            args.dt.or(spec.and_then(|s| s.dt)),
        )
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

/// Writes through `write` to `path`, or to stdout when no path is given.
fn emit(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> fhss_cs::Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            write(&mut w).with_context(|| format!("writing {}", p.display()))?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn gen(ctx: &Session, args: &GenArgs) -> Result<()> {
    let cfg = ctx.signal_config(&args.signal)?;
    let signal = generate_fhss(&cfg)?;
    emit(args.out.as_deref(), |w| io::write_signal(w, &signal))
}

fn transform(args: &TransformArgs) -> Result<()> {
    let signal = io::read_signal(open(&args.input)?)?;
    let basis = build_basis(args.basis.parse()?, signal.len())?;
    let coefficients = basis.analyze_signal(&signal)?;
    let report = sparsity_report(&coefficients, args.threshold)?;
    eprintln!(
        "{}: {} of {} coefficients above {} of max, l1/l2 = {:.4}",
        basis.kind(),
        report.significant_count,
        coefficients.len(),
        args.threshold,
        report.l1_over_l2
    );
    emit(args.out.as_deref(), |w| {
        io::write_coefficients(w, basis.kind(), &coefficients)
    })
}

fn sense(args: &SenseArgs) -> Result<()> {
    let signal = io::read_signal(open(&args.input)?)?;
    let m = match (args.m, args.fraction) {
        (Some(m), _) => m,
        (None, Some(f)) if f > 0.0 && f <= 1.0 => measurement_count(f, signal.len()),
        (None, Some(f)) => bail!("fraction {f} outside (0, 1]"),
        (None, None) => bail!("give --fraction or --m"),
    };
    let indices = select_indices(signal.len(), m, args.seed)?;
    let meas = measure(&signal, &indices, args.seed)?;
    emit(args.out.as_deref(), |w| io::write_measurements(w, &meas))
}

fn reconstruct_cmd(ctx: &Session, args: &ReconstructArgs) -> Result<()> {
    let meas = io::read_measurements(open(&args.input)?)?;
    let recon = args.recon.or(&ctx.file_config.recon).resolve()?;
    let basis = build_basis(args.basis.parse()?, meas.n())?;
    let result = reconstruct(&meas, &basis, &recon)?;
    let mut summary = format!(
        "{}: {} iterations, converged = {}",
        basis.kind(),
        result.iterations,
        result.converged
    );
    if let Some(path) = &args.reference {
        let original = io::read_signal(open(path)?)?;
        summary += &format!(", mse = {:.6e}", mse(&result.recovered, &original)?);
    }
    eprintln!("{summary}");
    if let Some(path) = &args.log {
        emit(Some(path), |w| io::write_run_log(w, &result))?;
    }
    emit(args.out.as_deref(), |w| {
        io::write_signal(w, &result.recovered)
    })
}

/// Fully resolved `run` settings.
struct RunPlan {
    signal: FhssConfig,
    bases: Vec<fhss_cs::BasisKind>,
    fractions: Vec<f64>,
    trials: usize,
    seed: u64,
    recon: ReconConfig,
    out: PathBuf,
}

fn plan(ctx: &Session, args: &RunArgs) -> Result<RunPlan> {
    let file = &ctx.file_config;
    let fractions = args
        .fractions
        .clone()
        .or(file.fractions.clone())
        .unwrap_or_else(default_fractions);
    if fractions.is_empty() {
        bail!("no measurement fractions given");
    }
    Ok(RunPlan {
        signal: ctx.signal_config(&args.signal)?,
        bases: config::parse_bases(
            args.basis
                .as_deref()
                .or(file.basis.as_deref())
                .unwrap_or("both"),
        )?,
        fractions,
        trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        seed: args.seed.or(file.base_seed).unwrap_or(0),
        recon: args.recon.or(&file.recon).resolve()?,
        out: args
            .out
            .clone()
            .or(file.out.clone())
            .unwrap_or_else(|| PathBuf::from("results")),
    })
}

fn run(ctx: &Session, args: &RunArgs) -> Result<()> {
    let plan = plan(ctx, args)?;
    std::fs::create_dir_all(&plan.out)
        .with_context(|| format!("creating {}", plan.out.display()))?;
    let out = |name: &str| plan.out.join(name);

    let signal = generate_fhss(&plan.signal)?;
    emit(Some(&out("signal.csv")), |w| io::write_signal(w, &signal))?;

    let bases: Vec<BasisPair> = plan
        .bases
        .iter()
        .map(|&kind| build_basis(kind, signal.len()))
        .collect::<fhss_cs::Result<_>>()?;

    let mut sparsity_panels = vec![plots::signal_panel("time domain", &signal)];
    for basis in &bases {
        let coefficients = basis.analyze_signal(&signal)?;
        let report = sparsity_report(&coefficients, 0.1)?;
        println!(
            "{}: {} significant coefficients (threshold 0.1), l1/l2 = {:.4}",
            basis.kind(),
            report.significant_count,
            report.l1_over_l2
        );
        emit(
            Some(&out(&format!("coefficients_{}.csv", basis.kind()))),
            |w| io::write_coefficients(w, basis.kind(), &coefficients),
        )?;
        sparsity_panels.push(plots::coefficient_panel(basis.kind(), &coefficients));
    }
    ctx.write_svg(&out("sparsity.svg"), &sparsity_panels)?;

    for basis in &bases {
        let mut panels = Vec::new();
        for fraction in HEADLINE_FRACTIONS {
            let m = measurement_count(fraction, signal.len()).max(1);
            let meas = measure(
                &signal,
                &select_indices(signal.len(), m, plan.seed)?,
                plan.seed,
            )?;
            let result = reconstruct(&meas, basis, &plan.recon)?;
            let err = mse(&result.recovered, &signal)?;
            let pct = (fraction * 100.0).round() as u32;
            println!(
                "{} {pct}% ({m} samples): mse = {err:.6e}, {} iterations, converged = {}",
                basis.kind(),
                result.iterations,
                result.converged
            );
            let stem = format!("{}_{pct}", basis.kind());
            emit(Some(&out(&format!("recovered_{stem}.csv"))), |w| {
                io::write_signal(w, &result.recovered)
            })?;
            emit(Some(&out(&format!("runlog_{stem}.csv"))), |w| {
                io::write_run_log(w, &result)
            })?;
            panels.push(plots::reconstruction_panel(
                basis.kind(),
                &format!("{m} samples ({pct}%)"),
                &signal,
                &result.recovered,
                err,
            ));
        }
        ctx.write_svg(
            &out(&format!("reconstruction_{}.svg", basis.kind())),
            &panels,
        )?;
    }

    let (table, failures) = mse_sweep_lenient(
        &signal,
        &bases,
        &plan.fractions,
        plan.trials,
        plan.seed,
        &plan.recon,
    )?;
    emit(Some(&out("sweep.csv")), |w| io::write_sweep(w, &table))?;
    ctx.write_svg(&out("mse.svg"), &[plots::mse_panel(&table)])?;
    for kind in table.bases() {
        for f in table.fractions() {
            if let Some(m) = table.mean_mse(kind, f) {
                println!("sweep {kind} fraction {f}: mean mse = {m:.6e}");
            }
        }
    }

    if !failures.is_empty() {
        for (cell, e) in &failures {
            eprintln!(
                "sweep cell {} fraction {} trial {} failed: {e}",
                bases[cell.basis_index].kind(),
                cell.fraction,
                cell.trial
            );
        }
        bail!(
            "{} of {} sweep cells failed",
            failures.len(),
            failures.len() + table.rows.len()
        );
    }
    Ok(())
}

fn plot(ctx: &Session, args: &PlotArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let panels = match io::detect_kind(&text)? {
        FileKind::Signal => {
            let signal: Signal = io::read_signal(text.as_bytes())?;
            vec![plots::signal_panel("signal", &signal)]
        }
        FileKind::Coefficients => {
            let (kind, coefficients) = io::read_coefficients(text.as_bytes())?;
            vec![plots::coefficient_panel(kind, &coefficients)]
        }
        FileKind::Measurements => vec![plots::measurement_panel(&io::read_measurements(
            text.as_bytes(),
        )?)],
        FileKind::RunLog => plots::run_log_panels(&io::read_run_log(text.as_bytes())?),
        FileKind::Sweep => vec![plots::mse_panel(&io::read_sweep(text.as_bytes())?)],
    };
    ctx.write_svg(&args.out, &panels)
}

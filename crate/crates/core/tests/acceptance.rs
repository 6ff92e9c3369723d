//! End-to-end acceptance checks. Run with
//! `cargo test -p fhss-cs --test acceptance -- --nocapture` to see the
//! per-criterion report.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use fhss_cs::io::write_sweep;
use fhss_cs::recon::{gradient, sparsity_measure};
use fhss_cs::{
    build_basis, generate_fhss, generate_sinusoid, hermite_function, measure, mse, mse_sweep,
    reconstruct, select_indices, sparsity_report, BasisKind, BasisPair, Complex64, FhssConfig,
    ReconConfig, Signal, SweepTable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, id: u32, name: &str, passed: bool, detail: String) {
        let line = format!(
            "[{}] criterion {id} ({name}): {detail}",
            if passed { "PASS" } else { "FAIL" }
        );
        // Straight to the handle: libtest only captures the print macros, so
        // the report shows up in a plain `cargo test` run.
        let _ = writeln!(std::io::stderr(), "{line}");
        self.lines.push((passed, line));
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn closed_form_hermite(p: usize, x: f64) -> f64 {
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let h: f64 = (0..=p / 2)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * fact(p) / (fact(m) * fact(p - 2 * m)) * (2.0 * x).powi((p - 2 * m) as i32)
        })
        .sum();
    (-x * x / 2.0).exp() * h / (2f64.powi(p as i32) * fact(p) * PI.sqrt()).sqrt()
}

fn max_identity_error(b: &BasisPair) -> f64 {
    let product = b.forward().dot(b.inverse());
    product
        .indexed_iter()
        .map(|((r, c), z)| (z - if r == c { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max)
}

fn criterion_1(report: &mut Report) {
    let start = Instant::now();
    let mut worst_h: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for n in [8, 32, 64] {
        worst_h = worst_h.max(max_identity_error(
            &build_basis(BasisKind::Hermite, n).unwrap(),
        ));
        worst_f = worst_f.max(max_identity_error(
            &build_basis(BasisKind::Fourier, n).unwrap(),
        ));
    }
    let mut worst_rec: f64 = 0.0;
    for p in 0..=20 {
        for x in [-3.0, -1.0, 0.0, 0.5, 2.7, 1.3, -4.2] {
            worst_rec = worst_rec.max((hermite_function(p, x) - closed_form_hermite(p, x)).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst_h < 1e-8 && worst_f < 1e-12 && worst_rec < 1e-10 && within(elapsed, 5);
    report.record(
        1,
        "basis correctness",
        ok,
        format!("hermite dev {worst_h:.2e} (<1e-8), fourier dev {worst_f:.2e} (<1e-12), recurrence vs closed form {worst_rec:.2e} (<1e-10), {elapsed:.2?} (<5s)"),
    );
}

fn criterion_2(report: &mut Report) {
    let start = Instant::now();
    let s = generate_fhss(&FhssConfig::paper_preset()).unwrap();
    let count = |kind| {
        let b = build_basis(kind, s.len()).unwrap();
        sparsity_report(&b.analyze_signal(&s).unwrap(), 0.1)
            .unwrap()
            .significant_count
    };
    let (dft, ht) = (count(BasisKind::Fourier), count(BasisKind::Hermite));
    let elapsed = start.elapsed();
    report.record(
        2,
        "DFT sparser than HT",
        dft < ht && within(elapsed, 10),
        format!("significant coefficients at 0.1: DFT {dft}, HT {ht}, {elapsed:.2?} (<10s)"),
    );
}

/// Sum of three unit-amplitude complex tones at distinct random DFT bins with random phases.
fn three_tone_signal(n: usize, rng: &mut ChaCha8Rng) -> Signal {
    let bins = rand::seq::index::sample(rng, n, 3);
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for bin in bins.iter() {
        let phase = Complex64::cis(rng.gen_range(0.0..2.0 * PI));
        let tone = generate_sinusoid(2.0 * PI * bin as f64, n, 1.0 / n as f64).unwrap();
        for (s, t) in samples.iter_mut().zip(tone.samples()) {
            *s += phase * t;
        }
    }
    Signal::new(samples, 1.0 / n as f64).unwrap()
}

fn criterion_3(report: &mut Report) {
    let start = Instant::now();
    let n = 128;
    let basis = build_basis(BasisKind::Fourier, n).unwrap();
    let mut successes = 0;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let s = three_tone_signal(n, &mut rng);
        let meas = measure(&s, &select_indices(n, 64, seed).unwrap(), seed).unwrap();
        let r = reconstruct(&meas, &basis, &ReconConfig::default()).unwrap();
        let err = mse(&r.recovered, &s).unwrap();
        worst = worst.max(err);
        if err < 1e-4 {
            successes += 1;
        }
    }
    let elapsed = start.elapsed();
    report.record(
        3,
        "exact sparse recovery",
        successes >= 18 && within(elapsed, 120),
        format!("{successes}/20 seeds with MSE < 1e-4 (need 18), worst {worst:.2e}, {elapsed:.2?} (<2min)"),
    );
}

const SWEEP_FRACTIONS: [f64; 3] = [0.3, 0.5, 0.8];
const SWEEP_TRIALS: usize = 5;
const SWEEP_SEED: u64 = 1;

fn preset_sweep(signal: &Signal, bases: &[BasisPair]) -> SweepTable {
    mse_sweep(
        signal,
        bases,
        &SWEEP_FRACTIONS,
        SWEEP_TRIALS,
        SWEEP_SEED,
        &ReconConfig::default(),
    )
    .unwrap()
}

fn sweep_csv(table: &SweepTable) -> Vec<u8> {
    let mut buf = Vec::new();
    write_sweep(&mut buf, table).unwrap();
    buf
}

fn criteria_4_to_7(report: &mut Report) {
    let signal = generate_fhss(&FhssConfig::paper_preset()).unwrap();
    let bases = vec![
        build_basis(BasisKind::Fourier, signal.len()).unwrap(),
        build_basis(BasisKind::Hermite, signal.len()).unwrap(),
    ];

    let start = Instant::now();
    let table = preset_sweep(&signal, &bases);
    let elapsed = start.elapsed();

    let mean = |kind, f| table.mean_mse(kind, f).unwrap();
    let ordered = SWEEP_FRACTIONS
        .iter()
        .all(|&f| mean(BasisKind::Fourier, f) < mean(BasisKind::Hermite, f));
    let detail: Vec<String> = SWEEP_FRACTIONS
        .iter()
        .map(|&f| {
            format!(
                "f={f}: DFT {:.3e} vs HT {:.3e}",
                mean(BasisKind::Fourier, f),
                mean(BasisKind::Hermite, f)
            )
        })
        .collect();
    report.record(
        4,
        "DFT reconstructs better than HT",
        ordered && within(elapsed, 15 * 60),
        format!(
            "{}, {SWEEP_TRIALS} trials, {elapsed:.2?} (<15min)",
            detail.join("; ")
        ),
    );

    let ratio = mean(BasisKind::Hermite, 0.8) / mean(BasisKind::Fourier, 0.3);
    report.record(
        5,
        "HT at 80% comparable to DFT at 30%",
        (0.1..=10.0).contains(&ratio),
        format!("MSE(HT, 0.8) / MSE(DFT, 0.3) = {ratio:.3} (in [0.1, 10])"),
    );

    let worst_normalized = table
        .rows
        .iter()
        .filter(|r| r.basis == BasisKind::Fourier && r.fraction == 0.8)
        .map(|r| r.mse_normalized)
        .fold(0.0, f64::max);
    report.record(
        6,
        "negligible DFT error at 80%",
        worst_normalized < 1e-2,
        format!("worst normalized MSE over trials {worst_normalized:.3e} (<1e-2)"),
    );

    let first = sweep_csv(&table);
    let second = sweep_csv(&preset_sweep(&signal, &bases));
    report.record(
        7,
        "determinism",
        first == second,
        format!(
            "repeated sweep CSV byte-identical: {} ({} bytes)",
            first == second,
            first.len()
        ),
    );
}

/// Slope of `l1(analyze(v))` along `direction` at sample `i`, by brute-force
/// full transforms.
fn brute_slope(basis: &BasisPair, v: &[Complex64], i: usize, direction: Complex64, h: f64) -> f64 {
    let eval = |sign: f64| {
        let mut w = v.to_vec();
        w[i] += direction * (sign * h);
        let coeffs: Vec<Complex64> = basis
            .forward()
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(&w).map(|(a, b)| a * b).sum())
            .collect();
        sparsity_measure(&coeffs)
    };
    (eval(1.0) - eval(-1.0)) / (2.0 * h)
}

fn criterion_8(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut passed = 0;
    let mut worst_rel = 0.0f64;
    for trial in 0..50 {
        let n = rng.gen_range(8..=64);
        let kind = if trial % 2 == 0 {
            BasisKind::Fourier
        } else {
            BasisKind::Hermite
        };
        let basis = build_basis(kind, n).unwrap();
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let i = rng.gen_range(0..n);
        // Keep every perturbed coefficient far from the origin so l1 is smooth
        // over the probed interval.
        let coeffs = basis.analyze(&v).unwrap();
        let nearest = coeffs
            .iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min);
        let reach = basis
            .forward_column(i)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let step = nearest / (100.0 * reach) * rng.gen_range(0.1..1.0);

        let g = gradient(&v, &[i], &basis, step).unwrap()[0];
        let oracle = Complex64::new(
            brute_slope(&basis, &v, i, Complex64::new(1.0, 0.0), step / 10.0),
            brute_slope(&basis, &v, i, Complex64::new(0.0, 1.0), step / 10.0),
        );
        let rel = (g.re - oracle.re).abs().max((g.im - oracle.im).abs()) / oracle.norm();
        worst_rel = worst_rel.max(rel);
        if rel <= 0.05 {
            passed += 1;
        }
    }
    report.record(
        8,
        "gradient finite-difference oracle",
        passed == 50,
        format!("{passed}/50 triples within 5%, worst relative deviation {worst_rel:.2e}"),
    );
}

#[test]
fn acceptance_criteria() {
    let mut report = Report { lines: Vec::new() };
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criteria_4_to_7(&mut report);
    criterion_8(&mut report);

    let failed: Vec<&String> = report
        .lines
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, l)| l)
        .collect();
    println!(
        "acceptance: {}/{} criteria passed",
        report.lines.len() - failed.len(),
        report.lines.len()
    );
    assert!(
        failed.is_empty(),
        "failed criteria:\n{}",
        failed
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join("\n")
    );
}

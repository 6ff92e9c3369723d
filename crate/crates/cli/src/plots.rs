//! Figure builders for signals, coefficients, reconstructions and sweeps.

use fhss_cs::{BasisKind, Complex64, MeasurementSet, Signal, SweepTable};

use crate::svg::{Panel, Series, Style, FOURIER_COLOR, HERMITE_COLOR};

pub fn basis_color(kind: BasisKind) -> &'static str {
    match kind {
        BasisKind::Fourier => FOURIER_COLOR,
        BasisKind::Hermite => HERMITE_COLOR,
    }
}

pub fn basis_title(kind: BasisKind) -> &'static str {
    match kind {
        BasisKind::Fourier => "DFT",
        BasisKind::Hermite => "HT",
    }
}

fn indexed(values: impl Iterator<Item = f64>) -> Vec<(f64, f64)> {
    values.enumerate().map(|(k, v)| (k as f64, v)).collect()
}

pub fn signal_panel(title: &str, signal: &Signal) -> Panel {
    Panel::new(title, "sample index", "amplitude")
        .with(Series::new(
            "Re",
            "black",
            Style::Line,
            indexed(signal.samples().iter().map(|z| z.re)),
        ))
        .with(Series::new(
            "Im",
            "gray",
            Style::Line,
            indexed(signal.samples().iter().map(|z| z.im)),
        ))
}

pub fn coefficient_panel(kind: BasisKind, coefficients: &[Complex64]) -> Panel {
    Panel::new(
        format!("{} coefficients", basis_title(kind)),
        "coefficient index",
        "magnitude",
    )
    .with(Series::new(
        format!("|{}|", basis_title(kind)),
        basis_color(kind),
        Style::Stem,
        indexed(coefficients.iter().map(|c| c.norm())),
    ))
}

pub fn measurement_panel(meas: &MeasurementSet) -> Panel {
    let points = meas
        .indices()
        .iter()
        .zip(meas.values())
        .map(|(&i, v)| (i as f64, v.re))
        .collect();
    Panel::new(
        format!(
            "{} of {} samples (seed {})",
            meas.m(),
            meas.n(),
            meas.seed()
        ),
        "sample index",
        "Re",
    )
    .with(Series::new("available", "black", Style::Stem, points))
}

/// Real parts of the original and the recovered signal overlaid.
pub fn reconstruction_panel(
    kind: BasisKind,
    label: &str,
    original: &Signal,
    recovered: &Signal,
    mse: f64,
) -> Panel {
    Panel::new(
        format!(
            "{} reconstruction, {label} (MSE {mse:.3e})",
            basis_title(kind)
        ),
        "sample index",
        "Re",
    )
    .with(Series::new(
        "original",
        "black",
        Style::Line,
        indexed(original.samples().iter().map(|z| z.re)),
    ))
    .with(Series::new(
        "recovered",
        basis_color(kind),
        Style::Line,
        indexed(recovered.samples().iter().map(|z| z.re)),
    ))
}

/// Mean MSE over trials against measurement fraction, one line per basis.
pub fn mse_panel(table: &SweepTable) -> Panel {
    let mut panel = Panel::new(
        "MSE versus number of measurements",
        "fraction of samples available",
        "mean MSE",
    )
    .log_y();
    for kind in table.bases() {
        let points = table
            .fractions()
            .into_iter()
            .filter_map(|f| table.mean_mse(kind, f).map(|m| (f, m)))
            .collect();
        panel = panel.with(Series::new(
            kind.name(),
            basis_color(kind),
            Style::Line,
            points,
        ));
    }
    panel
}

pub fn run_log_panels(rows: &[(usize, f64, f64)]) -> Vec<Panel> {
    vec![
        Panel::new("l1 measure", "iteration", "l1")
            .log_y()
            .with(Series::new(
                "l1",
                "black",
                Style::Line,
                rows.iter().map(|r| (r.0 as f64, r.2)).collect(),
            )),
        Panel::new("step", "iteration", "step")
            .log_y()
            .with(Series::new(
                "step",
                "black",
                Style::Line,
                rows.iter().map(|r| (r.0 as f64, r.1)).collect(),
            )),
    ]
}

//! CSV file formats.
//!
//! Sample-like files (signals, coefficients, measurements) share one layout:
//! a `# key=value ...` metadata line, the header `index,re,im`, then one row
//! per sample. Floats are written with 17 significant digits so every file
//! reads back bit-identically.
//!
//! | file         | metadata                              |
//! |--------------|---------------------------------------|
//! | signal       | `# dt=<dt> n=<n>`                     |
//! | coefficients | `# basis=hermite\|fourier n=<n>`      |
//! | measurements | `# n=<n> m=<m> seed=<seed> dt=<dt>`   |
//!
//! Run logs (`iteration,step,l1_measure`) and sweep tables have a header only.

use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;

use crate::bases::BasisKind;
use crate::error::{Error, Result};
use crate::metrics::{SweepRow, SweepTable};
use crate::recon::ReconResult;
use crate::sensing::MeasurementSet;
use crate::signal::Signal;

pub const SAMPLE_HEADER: [&str; 3] = ["index", "re", "im"];
pub const RUN_LOG_HEADER: [&str; 3] = ["iteration", "step", "l1_measure"];
pub const SWEEP_HEADER: [&str; 9] = [
    "basis",
    "fraction",
    "m",
    "trial",
    "seed",
    "mse",
    "mse_normalized",
    "converged",
    "iterations",
];

/// Full-precision float formatting used for every numeric column.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Ordered `key=value` pairs from a `#` comment line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    fn parse(line: &str) -> Result<Self> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| Error::Format(format!("expected metadata line, got '{line}'")))?;
        body.split_whitespace()
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| Error::Format(format!("bad metadata entry '{kv}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Metadata)
    }

    fn render(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# {}\n", parts.join(" "))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::Format(format!("missing metadata key '{key}'")))?;
        raw.parse()
            .map_err(|_| Error::Format(format!("bad value '{raw}' for metadata key '{key}'")))
    }
}

fn parse_field<T: FromStr>(record: &csv::StringRecord, col: usize, name: &str) -> Result<T> {
    let raw = record
        .get(col)
        .ok_or_else(|| Error::Format(format!("missing column '{name}'")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Format(format!("bad value '{raw}' in column '{name}'")))
}

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Format(format!(
            "expected header '{}', got '{}'",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn csv_reader(body: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes())
}

/// Splits off the metadata line and returns it together with the CSV body.
fn split_metadata(text: &str) -> Result<(Metadata, &str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    Ok((Metadata::parse(first.trim_end_matches('\r'))?, rest))
}

fn write_samples<W: Write>(
    mut w: W,
    meta: &Metadata,
    indices: impl Iterator<Item = usize>,
    values: &[Complex64],
) -> Result<()> {
    w.write_all(meta.render().as_bytes())?;
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(SAMPLE_HEADER)?;
    for (i, v) in indices.zip(values) {
        writer.write_record([i.to_string(), fmt_f64(v.re), fmt_f64(v.im)])?;
    }
    writer.flush()?;
    Ok(())
}

fn read_samples(body: &str) -> Result<(Vec<usize>, Vec<Complex64>)> {
    let mut reader = csv_reader(body);
    check_header(&mut reader, &SAMPLE_HEADER)?;
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        indices.push(parse_field(&record, 0, "index")?);
        values.push(Complex64::new(
            parse_field(&record, 1, "re")?,
            parse_field(&record, 2, "im")?,
        ));
    }
    Ok((indices, values))
}

fn read_to_string<R: Read>(mut r: R) -> Result<String> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    Ok(text)
}

fn expect_dense(indices: &[usize], n: usize) -> Result<()> {
    if indices.len() != n {
        return Err(Error::Format(format!(
            "metadata says n={n} but {} rows follow",
            indices.len()
        )));
    }
    if let Some((k, i)) = indices.iter().enumerate().find(|(k, i)| *k != **i) {
        return Err(Error::Format(format!("row {k} has index {i}")));
    }
    Ok(())
}

pub fn write_signal<W: Write>(w: W, signal: &Signal) -> Result<()> {
    let meta = Metadata(vec![
        ("dt".into(), signal.dt().to_string()),
        ("n".into(), signal.len().to_string()),
    ]);
    write_samples(w, &meta, 0..signal.len(), signal.samples())
}

pub fn read_signal<R: Read>(r: R) -> Result<Signal> {
    let text = read_to_string(r)?;
    let (meta, body) = split_metadata(&text)?;
    let dt: f64 = meta.require("dt")?;
    let n: usize = meta.require("n")?;
    let (indices, values) = read_samples(body)?;
    expect_dense(&indices, n)?;
    Signal::new(values, dt)
}

pub fn write_coefficients<W: Write>(
    w: W,
    kind: BasisKind,
    coefficients: &[Complex64],
) -> Result<()> {
    let meta = Metadata(vec![
        ("basis".into(), kind.name().into()),
        ("n".into(), coefficients.len().to_string()),
    ]);
    write_samples(w, &meta, 0..coefficients.len(), coefficients)
}

pub fn read_coefficients<R: Read>(r: R) -> Result<(BasisKind, Vec<Complex64>)> {
    let text = read_to_string(r)?;
    let (meta, body) = split_metadata(&text)?;
    let kind: BasisKind = meta.require("basis")?;
    let n: usize = meta.require("n")?;
    let (indices, values) = read_samples(body)?;
    expect_dense(&indices, n)?;
    Ok((kind, values))
}

pub fn write_measurements<W: Write>(w: W, meas: &MeasurementSet) -> Result<()> {
    let meta = Metadata(vec![
        ("n".into(), meas.n().to_string()),
        ("m".into(), meas.m().to_string()),
        ("seed".into(), meas.seed().to_string()),
        ("dt".into(), meas.dt().to_string()),
    ]);
    write_samples(w, &meta, meas.indices().iter().copied(), meas.values())
}

/// Reads a measurement file; a missing `dt` key defaults to 1.
pub fn read_measurements<R: Read>(r: R) -> Result<MeasurementSet> {
    let text = read_to_string(r)?;
    let (meta, body) = split_metadata(&text)?;
    let n: usize = meta.require("n")?;
    let m: usize = meta.require("m")?;
    let seed: u64 = meta.require("seed")?;
    let dt: f64 = if meta.get("dt").is_some() {
        meta.require("dt")?
    } else {
        1.0
    };
    let (indices, values) = read_samples(body)?;
    if indices.len() != m {
        return Err(Error::Format(format!(
            "metadata says m={m} but {} rows follow",
            indices.len()
        )));
    }
    MeasurementSet::from_parts(n, indices, values, seed, dt)
}

pub fn write_run_log<W: Write>(w: W, result: &ReconResult) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(RUN_LOG_HEADER)?;
    for (iteration, measure) in result.measure_history.iter().enumerate() {
        writer.write_record([
            iteration.to_string(),
            fmt_f64(result.step_at(iteration)),
            fmt_f64(*measure),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// `(iteration, step, l1_measure)` rows of a run log.
pub fn read_run_log<R: Read>(r: R) -> Result<Vec<(usize, f64, f64)>> {
    let text = read_to_string(r)?;
    let mut reader = csv_reader(&text);
    check_header(&mut reader, &RUN_LOG_HEADER)?;
    reader
        .records()
        .map(|record| {
            let record = record?;
            Ok((
                parse_field(&record, 0, "iteration")?,
                parse_field(&record, 1, "step")?,
                parse_field(&record, 2, "l1_measure")?,
            ))
        })
        .collect()
}

pub fn write_sweep<W: Write>(w: W, table: &SweepTable) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(SWEEP_HEADER)?;
    for row in &table.rows {
        writer.write_record([
            row.basis.name().to_string(),
            fmt_f64(row.fraction),
            row.m.to_string(),
            row.trial.to_string(),
            row.seed.to_string(),
            fmt_f64(row.mse),
            fmt_f64(row.mse_normalized),
            row.converged.to_string(),
            row.iterations.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_sweep<R: Read>(r: R) -> Result<SweepTable> {
    let text = read_to_string(r)?;
    let mut reader = csv_reader(&text);
    check_header(&mut reader, &SWEEP_HEADER)?;
    let rows = reader
        .records()
        .map(|record| {
            let record = record?;
            Ok(SweepRow {
                basis: parse_field(&record, 0, "basis")?,
                fraction: parse_field(&record, 1, "fraction")?,
                m: parse_field(&record, 2, "m")?,
                trial: parse_field(&record, 3, "trial")?,
                seed: parse_field(&record, 4, "seed")?,
                mse: parse_field(&record, 5, "mse")?,
                mse_normalized: parse_field(&record, 6, "mse_normalized")?,
                converged: parse_field(&record, 7, "converged")?,
                iterations: parse_field(&record, 8, "iterations")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

/// Which format a CSV file holds, judged from its first lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Signal,
    Coefficients,
    Measurements,
    RunLog,
    Sweep,
}

pub fn detect_kind(text: &str) -> Result<FileKind> {
    let first = text.lines().next().unwrap_or("").trim();
    if first.starts_with('#') {
        let meta = Metadata::parse(first)?;
        return Ok(if meta.get("basis").is_some() {
            FileKind::Coefficients
        } else if meta.get("m").is_some() {
            FileKind::Measurements
        } else {
            FileKind::Signal
        });
    }
    if first == RUN_LOG_HEADER.join(",") {
        Ok(FileKind::RunLog)
    } else if first == SWEEP_HEADER.join(",") {
        Ok(FileKind::Sweep)
    } else {
        Err(Error::Format(format!("unrecognised CSV header '{first}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{build_basis, BasisKind};
    use crate::recon::{reconstruct, ReconConfig};
    use crate::sensing::{measure, select_indices};
    use crate::signal::{generate_fhss, generate_sinusoid, FhssConfig};
    use proptest::prelude::*;

    #[test]
    fn signal_file_layout() {
        let s = generate_fhss(&FhssConfig::paper_preset()).unwrap();
        let mut buf = Vec::new();
        write_signal(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# dt=0.01 n=600"));
        assert_eq!(lines.next(), Some("index,re,im"));
        assert_eq!(text.lines().count(), 602);
        assert_eq!(read_signal(text.as_bytes()).unwrap(), s);
        assert_eq!(detect_kind(&text).unwrap(), FileKind::Signal);
    }

    #[test]
    fn constant_signal_rows() {
        let s = generate_sinusoid(0.0, 8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_signal(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for (k, line) in text.lines().skip(2).enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols[0].parse::<usize>().unwrap(), k);
            assert_eq!(cols[1].parse::<f64>().unwrap(), 1.0);
            assert_eq!(cols[2].parse::<f64>().unwrap(), 0.0);
            // at least 12 significant digits
            assert!(cols[1].trim_start_matches('-').len() >= 13);
        }
    }

    #[test]
    fn other_formats_round_trip() {
        let n = 32;
        let s = generate_sinusoid(2.0, n, 0.05).unwrap();
        let b = build_basis(BasisKind::Hermite, n).unwrap();
        let coeffs = b.analyze_signal(&s).unwrap();
        let mut buf = Vec::new();
        write_coefficients(&mut buf, BasisKind::Hermite, &coeffs).unwrap();
        assert!(buf.starts_with(b"# basis=hermite n=32\n"));
        assert_eq!(
            read_coefficients(buf.as_slice()).unwrap(),
            (BasisKind::Hermite, coeffs)
        );

        let meas = measure(&s, &select_indices(n, 10, 77).unwrap(), 77).unwrap();
        let mut buf = Vec::new();
        write_measurements(&mut buf, &meas).unwrap();
        assert!(buf.starts_with(b"# n=32 m=10 seed=77 dt=0.05\n"));
        assert_eq!(read_measurements(buf.as_slice()).unwrap(), meas);

        let fb = build_basis(BasisKind::Fourier, n).unwrap();
        let result = reconstruct(&meas, &fb, &ReconConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_run_log(&mut buf, &result).unwrap();
        let log = read_run_log(buf.as_slice()).unwrap();
        assert_eq!(log.len(), result.iterations + 1);
        assert_eq!(log[0].1, result.step_history[0].1);
        assert_eq!(
            log.iter().map(|r| r.2).collect::<Vec<_>>(),
            result.measure_history
        );
    }

    #[test]
    fn measurement_file_without_dt() {
        let text = "# n=4 m=2 seed=9\nindex,re,im\n1,1.0,0.0\n3,0.5,-0.5\n";
        let meas = read_measurements(text.as_bytes()).unwrap();
        assert_eq!(meas.indices(), &[1, 3]);
        assert_eq!(meas.dt(), 1.0);
        assert_eq!(meas.seed(), 9);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(read_signal("index,re,im\n0,1,0\n".as_bytes()).is_err());
        assert!(read_signal("# dt=1 n=2\nindex,re,im\n0,1,0\n".as_bytes()).is_err());
        assert!(read_signal("# dt=1 n=2\nindex,re,im\n0,1,0\n2,1,0\n".as_bytes()).is_err());
        assert!(read_signal("# dt=1 n=1\nidx,re,im\n0,1,0\n".as_bytes()).is_err());
        assert!(read_signal("# dt=1 n=1\nindex,re,im\n0,abc,0\n".as_bytes()).is_err());
        assert!(
            read_measurements("# n=4 m=2 seed=1\nindex,re,im\n3,1,0\n1,1,0\n".as_bytes()).is_err()
        );
        assert!(read_measurements("# n=4 m=1 seed=1\nindex,re,im\n4,1,0\n".as_bytes()).is_err());
        assert!(detect_kind("foo,bar\n").is_err());
    }

    fn sweep_row() -> impl Strategy<Value = SweepRow> {
        (
            any::<bool>(),
            0.01f64..=1.0,
            1usize..1000,
            0usize..50,
            any::<u64>(),
            0.0f64..10.0,
            any::<bool>(),
            0usize..20_000,
        )
            .prop_map(
                |(h, fraction, m, trial, seed, mse, converged, iterations)| SweepRow {
                    basis: if h {
                        BasisKind::Hermite
                    } else {
                        BasisKind::Fourier
                    },
                    fraction,
                    m,
                    trial,
                    seed,
                    mse,
                    mse_normalized: mse / 3.0,
                    converged,
                    iterations,
                },
            )
    }

    proptest! {
        #[test]
        fn sweep_csv_round_trips(rows in prop::collection::vec(sweep_row(), 0..20)) {
            let table = SweepTable { rows };
            let mut buf = Vec::new();
            write_sweep(&mut buf, &table).unwrap();
            prop_assert_eq!(detect_kind(std::str::from_utf8(&buf).unwrap()).unwrap(), FileKind::Sweep);
            prop_assert_eq!(read_sweep(buf.as_slice()).unwrap(), table);
        }

        #[test]
        fn signal_csv_round_trips(
            values in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..50),
            dt in 1e-6f64..10.0,
        ) {
            let s = Signal::new(values.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(), dt).unwrap();
            let mut buf = Vec::new();
            write_signal(&mut buf, &s).unwrap();
            prop_assert_eq!(read_signal(buf.as_slice()).unwrap(), s);
        }
    }
}

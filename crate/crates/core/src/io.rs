//! CSV and JSON artifacts.
//!
//! Every writer has a matching reader. Floating-point fields are written
//! with 17 significant digits so values round-trip exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qed::{JcModel, MeasurementRecord, OutcomeProbabilities, PrepParams};
use crate::statistics::CorrelationSample;
use crate::wigner::{GridSpec, WignerGrid};

pub const WIGNER_HEADER: [&str; 3] = ["x", "p", "W"];
pub const SWEEP_HEADER: [&str; 5] = ["kappa_t", "g2", "g2a", "mean_n", "m2"];
pub const MEASUREMENT_HEADER: [&str; 6] = ["x", "p", "Pe0", "Pepi", "W_est", "shots"];

/// Relative tolerance used when inferring a lattice from written coordinates.
const LATTICE_TOL: f64 = 1e-9;

pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_f64(field: &str, row: usize, column: &str) -> Result<f64> {
    let trimmed = field.trim();
    if trimmed.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    trimmed.parse::<f64>().map_err(|_| {
        Error::Parse(format!(
            "row {row}, column `{column}`: `{field}` is not a number"
        ))
    })
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn write_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: "<stream>".into(),
            source,
        },
        other => Error::Parse(format!("{other:?}")),
    }
}

fn write_rows<W: Write>(
    out: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(write_error)?;
    for row in rows {
        w.write_record(&row).map_err(write_error)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<stream>".into(),
        source,
    })
}

/// Reads all numeric rows after checking the header.
fn read_rows<R: Read>(input: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let found = r.headers().map_err(csv_error)?.clone();
    if found.len() != header.len() || found.iter().zip(header).any(|(a, b)| a.trim() != *b) {
        return Err(Error::Parse(format!(
            "unexpected header `{}`, expected `{}`",
            found.iter().collect::<Vec<_>>().join(","),
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = record
            .iter()
            .zip(header)
            .map(|(field, column)| parse_f64(field, i + 1, column))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_wigner_csv<W: Write>(out: W, grid: &WignerGrid) -> Result<()> {
    let rows = grid
        .iter()
        .map(|(pt, w)| vec![format_f64(pt.x()), format_f64(pt.p()), format_f64(w)]);
    write_rows(out, &WIGNER_HEADER, rows)
}

/// Parses a grid written by [`write_wigner_csv`], inferring the lattice from
/// the coordinates.
pub fn read_wigner_csv<R: Read>(input: R) -> Result<WignerGrid> {
    let rows = read_rows(input, &WIGNER_HEADER)?;
    if rows.len() < 4 {
        return Err(Error::Parse(format!(
            "a grid needs at least 4 rows, got {}",
            rows.len()
        )));
    }
    let p0 = rows[0][1];
    let nx = rows.iter().take_while(|r| r[1] == p0).count();
    if nx < 2 || rows.len() % nx != 0 {
        return Err(Error::Parse(format!(
            "{} rows do not form a lattice with {nx} points per line",
            rows.len()
        )));
    }
    let np = rows.len() / nx;
    let spec = GridSpec::new(
        rows[0][0],
        rows[nx - 1][0],
        p0,
        rows[rows.len() - 1][1],
        nx,
        np,
    )
    .map_err(|e| Error::Parse(e.to_string()))?;
    let scale = [spec.x_min, spec.x_max, spec.p_min, spec.p_max]
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    for (k, row) in rows.iter().enumerate() {
        let (i, j) = (k % nx, k / nx);
        if (row[0] - spec.x(i)).abs() > LATTICE_TOL * scale
            || (row[1] - spec.p(j)).abs() > LATTICE_TOL * scale
        {
            return Err(Error::Parse(format!(
                "row {}: ({}, {}) is off the inferred lattice",
                k + 1,
                row[0],
                row[1]
            )));
        }
    }
    let values = rows.iter().map(|r| r[2]).collect();
    WignerGrid::from_values(spec, values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_sweep_csv<W: Write>(out: W, samples: &[CorrelationSample]) -> Result<()> {
    let rows = samples.iter().map(|s| {
        vec![
            format_f64(s.kappa_t),
            format_f64(s.g2.unwrap_or(f64::NAN)),
            format_f64(s.g2a),
            format_f64(s.mean_n),
            format_f64(s.second_factorial_moment),
        ]
    });
    write_rows(out, &SWEEP_HEADER, rows)
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<CorrelationSample>> {
    Ok(read_rows(input, &SWEEP_HEADER)?
        .into_iter()
        .map(|r| CorrelationSample {
            kappa_t: r[0],
            g2: (!r[1].is_nan()).then_some(r[1]),
            g2a: r[2],
            mean_n: r[3],
            second_factorial_moment: r[4],
        })
        .collect())
}

pub fn write_measurement_csv<W: Write>(out: W, records: &[MeasurementRecord]) -> Result<()> {
    let rows = records.iter().map(|m| {
        vec![
            format_f64(m.x),
            format_f64(m.p),
            format_f64(m.p_e_phase0),
            format_f64(m.p_e_phase_pi),
            format_f64(m.w_estimate),
            m.shots.to_string(),
        ]
    });
    write_rows(out, &MEASUREMENT_HEADER, rows)
}

pub fn read_measurement_csv<R: Read>(input: R) -> Result<Vec<MeasurementRecord>> {
    read_rows(input, &MEASUREMENT_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let shots = r[5];
            if !(shots >= 0.0 && shots.fract() == 0.0 && shots <= u64::MAX as f64) {
                return Err(Error::Parse(format!(
                    "row {}: shots must be a non-negative integer",
                    i + 1
                )));
            }
            for (v, name) in [(r[2], "Pe0"), (r[3], "Pepi")] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Parse(format!(
                        "row {}: {name} = {v} outside [0, 1]",
                        i + 1
                    )));
                }
            }
            Ok(MeasurementRecord {
                x: r[0],
                p: r[1],
                p_e_phase0: r[2],
                p_e_phase_pi: r[3],
                w_estimate: r[4],
                shots: shots as u64,
            })
        })
        .collect()
}

/// Complex amplitude as `[re, im]`.
pub type ComplexPair = [f64; 2];

pub fn complex_pairs(values: impl IntoIterator<Item = Complex64>) -> Vec<ComplexPair> {
    values.into_iter().map(|c| [c.re, c.im]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepStatus {
    Ok,
    PostSelectionFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepReport {
    pub status: PrepStatus,
    pub params: PrepParams,
    pub model: JcModel,
    pub success_probability: f64,
    pub outcome_probabilities: Option<OutcomeProbabilities>,
    /// Cavity amplitudes in the Fock basis; empty on failure.
    pub cavity: Vec<ComplexPair>,
    pub target: Vec<ComplexPair>,
    /// `|⟨target|cavity⟩|²`, 0 on failure.
    pub fidelity: f64,
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Parse(e.to_string()))?;
    out.write_all(b"\n").map_err(|source| Error::Io {
        path: "<stream>".into(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_prep_report(bytes: &[u8]) -> Result<PrepReport> {
    read_json(bytes)
}

/// Creates `path` and runs `body` on a buffered writer, attaching the path
/// to any I/O failure.
pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON writers. Floats are written in `{:.9e}` so files diff
//! cleanly across runs; unavailable values are empty CSV fields.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use rabi_hubbard::sweep::{Cell, PhaseDiagram};

use crate::error::CliError;

pub const SWEEP_HEADER: [&str; 5] = [
    "g_over_w0",
    "zJ_over_w0",
    "abs_psi",
    "converged",
    "iterations",
];
pub const BOUNDARY_HEADER: [&str; 4] = ["g_over_w0", "zJc_numeric", "zJc_analytic", "J_crit_lme"];

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.9e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn sweep_record(g: f64, zj: f64, c: &Cell) -> [String; 5] {
    [
        fmt_f64(g),
        fmt_f64(zj),
        fmt_f64(c.abs_psi),
        c.converged.to_string(),
        c.iterations.to_string(),
    ]
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

pub fn write_sweep_csv(path: &Path, d: &PhaseDiagram) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(SWEEP_HEADER).map_err(&err)?;
    for (i, &g) in d.g_values.iter().enumerate() {
        for (c, &zj) in d.row(i).iter().zip(&d.zj_values) {
            w.write_record(sweep_record(g, zj, c)).map_err(&err)?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn boundary_rows(d: &PhaseDiagram) -> Vec<[String; 4]> {
    d.g_values
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            [
                fmt_f64(g),
                fmt_opt(d.boundary_numeric[i]),
                fmt_opt(d.boundary_analytic[i]),
                fmt_opt(d.boundary_lme[i]),
            ]
        })
        .collect()
}

/// Writes a header and rows to `out`; `label` names the sink in errors.
pub fn write_rows<W: Write, const K: usize>(
    out: W,
    label: &Path,
    header: [&str; K],
    rows: &[[String; K]],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let err = csv_err(label);
    w.write_record(header).map_err(&err)?;
    for r in rows {
        w.write_record(r).map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::io(label, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Row-at-a-time sweep output so an interrupted run keeps finished rows.
/// Rows appear in completion order; the final file is rewritten sorted.
pub struct PartialSweep {
    path: PathBuf,
    writer: std::sync::Mutex<csv::Writer<File>>,
}

impl PartialSweep {
    pub fn create(path: PathBuf) -> Result<Self, CliError> {
        let mut w = csv_writer(&path)?;
        w.write_record(SWEEP_HEADER).map_err(csv_err(&path))?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(Self {
            path,
            writer: std::sync::Mutex::new(w),
        })
    }

    /// Appends one row; write errors are reported once the sweep finishes.
    pub fn append(&self, g: f64, zj_values: &[f64], cells: &[Cell]) -> Result<(), CliError> {
        let mut w = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        for (c, &zj) in cells.iter().zip(zj_values) {
            w.write_record(sweep_record(g, zj, c))
                .map_err(csv_err(&self.path))?;
        }
        w.flush().map_err(|e| CliError::io(&self.path, e))
    }

    pub fn remove(self) -> Result<(), CliError> {
        drop(self.writer);
        fs::remove_file(&self.path).map_err(|e| CliError::io(&self.path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.5), "1.500000000e0");
        assert_eq!(fmt_f64(0.0), "0.000000000e0");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        assert_eq!(fmt_opt(None), "");
        assert_eq!(fmt_f64(1.5).parse::<f64>().unwrap(), 1.5);
    }
}

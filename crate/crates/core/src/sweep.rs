// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! (g, zJ) grid scans, threshold-crossing boundaries and the analytic overlays.
//!
//! Rows of fixed g are the unit of parallel work. Within a row the zJ axis is
//! scanned upward in a fixed order and each cell is warm-started from the
//! converged ψ of its lower neighbour, so the result does not depend on how
//! rows are scheduled.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{critical_zj, lme_boundary};
use crate::dissipation::BathParams;
use crate::error::{invalid, Result};
use crate::meanfield::{classify_point_with_seeds, SolverOptions};
use crate::operators::{default_fock_dim, ModelParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            scale: Scale::Log,
        }
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        if self.count < 2 {
            return Err(invalid(
                name,
                format!("count must be >= 2, got {}", self.count),
            ));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(invalid(
                name,
                format!("need finite min < max, got [{}, {}]", self.min, self.max),
            ));
        }
        if self.scale == Scale::Log && !(self.min > 0.0) {
            return Err(invalid(name, "log scale requires min > 0"));
        }
        Ok(())
    }

    /// Grid points, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let last = (n - 1) as f64;
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + t * (self.max - self.min),
                    Scale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect();
        v[0] = self.min;
        v[n - 1] = self.max;
        v
    }
}

/// Fock-space cutoff used for each g.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// N = ⌈g² + 8g + 10⌉ per row.
    #[default]
    Rule,
    /// Twice the rule, for truncation checks.
    DoubledRule,
    Fixed(usize),
}

impl Truncation {
    pub fn fock_dim(&self, g: f64, omega0: f64) -> usize {
        match *self {
            Truncation::Rule => default_fock_dim(g, omega0),
            Truncation::DoubledRule => 2 * default_fock_dim(g, omega0),
            Truncation::Fixed(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub g_axis: Axis,
    pub zj_axis: Axis,
    /// ε, ω0 and z; g and the cutoff are set per row.
    pub model: ModelParams,
    pub bath: BathParams,
    pub solver: SolverOptions,
    pub truncation: Truncation,
    /// Thread count; 0 uses the rayon default.
    pub workers: usize,
    /// Lattice dimension d of the LME estimate.
    pub lme_dim: u32,
}

impl SweepSpec {
    /// Desk-scale replica of the zero-temperature figure: g ∈ [0.3, 2.5] ω0,
    /// zJ ∈ [1e-4, 0.3] ω0 (log), 60 × 60.
    pub fn figure_default(bath: BathParams) -> Self {
        Self {
            g_axis: Axis::linear(0.3, 2.5, 60),
            zj_axis: Axis::log(1e-4, 0.3, 60),
            model: ModelParams::new(1.0, 0.3, 3),
            bath,
            solver: SolverOptions::default(),
            truncation: Truncation::Rule,
            workers: 0,
            lme_dim: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.g_axis.validate("g_axis")?;
        self.zj_axis.validate("zj_axis")?;
        if self.g_axis.min < 0.0 {
            return Err(invalid("g_axis", "g must be >= 0"));
        }
        if self.zj_axis.min < 0.0 {
            return Err(invalid("zj_axis", "zJ must be >= 0"));
        }
        if self.lme_dim == 0 {
            return Err(invalid("lme_dim", "must be >= 1"));
        }
        if let Truncation::Fixed(n) = self.truncation {
            if n < 2 {
                return Err(invalid("fock_dim", "must be >= 2"));
            }
        }
        self.model_at(self.g_axis.min).validate()?;
        self.bath.validate()?;
        self.solver.validate()
    }

    /// Model used for the row at coupling `g`.
    pub fn model_at(&self, g: f64) -> ModelParams {
        ModelParams {
            g,
            fock_dim: self.truncation.fock_dim(g, self.model.omega0),
            ..self.model
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub abs_psi: f64,
    pub converged: bool,
    pub iterations: usize,
    /// The point could not be evaluated; `abs_psi` is NaN.
    pub failed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub g_idx: usize,
    pub zj_idx: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub spec: SweepSpec,
    pub version: String,
    /// Fock cutoff used for each g row.
    pub fock_dims: Vec<usize>,
    pub threshold: f64,
    pub unconverged: usize,
    pub failures: Vec<CellFailure>,
    /// Rows whose |ψ| re-enters the localized side after the first crossing.
    pub non_monotone_rows: Vec<usize>,
    /// Rows without a crossing inside the zJ range.
    pub no_crossing_rows: Vec<usize>,
    /// Set when the analytic overlay is unavailable (non-Ohmic or unequal temperatures).
    pub analytic_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub g_values: Vec<f64>,
    pub zj_values: Vec<f64>,
    /// Row-major: index `g_idx * zj_values.len() + zj_idx`.
    pub cells: Vec<Cell>,
    pub boundary_numeric: Vec<Option<f64>>,
    pub boundary_analytic: Vec<Option<f64>>,
    pub boundary_lme: Vec<Option<f64>>,
    pub metadata: SweepMetadata,
}

impl PhaseDiagram {
    pub fn cell(&self, g_idx: usize, zj_idx: usize) -> &Cell {
        &self.cells[g_idx * self.zj_values.len() + zj_idx]
    }

    pub fn row(&self, g_idx: usize) -> &[Cell] {
        let n = self.zj_values.len();
        &self.cells[g_idx * n..(g_idx + 1) * n]
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<PhaseDiagram> {
    run_sweep_with_progress(spec, &|_, _| {})
}

/// As [`run_sweep`], calling `on_row(g_idx, cells)` as each row completes
/// (in completion order, possibly from worker threads).
pub fn run_sweep_with_progress(
    spec: &SweepSpec,
    on_row: &(dyn Fn(usize, &[Cell]) + Sync),
) -> Result<PhaseDiagram> {
    spec.validate()?;
    let g_values = spec.g_axis.values();
    let zj_values = spec.zj_axis.values();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    let rows: Vec<(Vec<Cell>, Vec<CellFailure>)> = pool.install(|| {
        g_values
            .par_iter()
            .enumerate()
            .map(|(gi, &g)| {
                let row = scan_row(spec, gi, g, &zj_values);
                on_row(gi, &row.0);
                row
            })
            .collect()
    });

    let mut cells = Vec::with_capacity(g_values.len() * zj_values.len());
    let mut failures = Vec::new();
    for (row, fails) in rows {
        cells.extend(row);
        failures.extend(fails);
    }
    let unconverged = cells.iter().filter(|c| !c.converged).count();

    let (analytic_ok, analytic_note) = analytic_availability(&spec.bath);
    let boundary_analytic = g_values
        .iter()
        .map(|&g| {
            analytic_ok
                .then(|| critical_zj(&spec.model_at(g), &spec.bath, spec.bath.temp_q).ok())
                .flatten()
                .filter(|z| z.is_finite())
        })
        .collect();
    let boundary_lme = g_values
        .iter()
        .map(|&g| lme_boundary(&spec.model_at(g), &spec.bath, spec.lme_dim).ok())
        .collect();

    let mut diagram = PhaseDiagram {
        metadata: SweepMetadata {
            spec: spec.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            fock_dims: g_values
                .iter()
                .map(|&g| spec.model_at(g).fock_dim)
                .collect(),
            threshold: spec.solver.psi_threshold,
            unconverged,
            failures,
            non_monotone_rows: Vec::new(),
            no_crossing_rows: Vec::new(),
            analytic_note,
        },
        boundary_numeric: Vec::new(),
        boundary_analytic,
        boundary_lme,
        g_values,
        zj_values,
        cells,
    };
    let extraction = extract_boundary(&diagram, spec.solver.psi_threshold);
    diagram.boundary_numeric = extraction.values;
    diagram.metadata.non_monotone_rows = extraction.non_monotone_rows;
    diagram.metadata.no_crossing_rows = extraction.no_crossing_rows;
    Ok(diagram)
}

fn analytic_availability(b: &BathParams) -> (bool, Option<String>) {
    if !b.is_ohmic() {
        (false, Some("closed forms are Ohmic-only".into()))
    } else if b.temp_q != b.temp_c {
        (
            false,
            Some("closed forms assume equal bath temperatures".into()),
        )
    } else {
        (true, None)
    }
}

fn scan_row(
    spec: &SweepSpec,
    gi: usize,
    g: f64,
    zj_values: &[f64],
) -> (Vec<Cell>, Vec<CellFailure>) {
    let p = spec.model_at(g);
    let mut cells = Vec::with_capacity(zj_values.len());
    let mut failures = Vec::new();
    let mut warm: Option<Complex64> = None;
    for (zi, &zj) in zj_values.iter().enumerate() {
        let extra: Vec<Complex64> = warm.into_iter().collect();
        match classify_point_with_seeds(&p, zj, &spec.bath, &spec.solver, &extra) {
            Ok(c) => {
                let converged = c.converged() && !c.warning;
                warm = (converged && c.selected.abs_psi > 0.0).then_some(c.selected.psi);
                cells.push(Cell {
                    abs_psi: c.abs_psi,
                    converged,
                    iterations: c.selected.iterations,
                    failed: false,
                });
            }
            Err(e) => {
                warm = None;
                failures.push(CellFailure {
                    g_idx: gi,
                    zj_idx: zi,
                    message: e.to_string(),
                });
                cells.push(Cell {
                    abs_psi: f64::NAN,
                    converged: false,
                    iterations: 0,
                    failed: true,
                });
            }
        }
    }
    (cells, failures)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryExtraction {
    pub values: Vec<Option<f64>>,
    pub non_monotone_rows: Vec<usize>,
    pub no_crossing_rows: Vec<usize>,
}

/// Threshold crossing of a single row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub zj: Option<f64>,
    pub non_monotone: bool,
}

/// First upward crossing of `threshold` by |ψ| along ascending zJ, linearly
/// interpolated (in ln zJ on a log axis). Failed (NaN) cells are skipped.
pub fn row_crossing(zj: &[f64], abs_psi: &[f64], threshold: f64, scale: Scale) -> Crossing {
    let pts: Vec<(f64, f64)> = zj
        .iter()
        .zip(abs_psi)
        .filter(|(_, a)| a.is_finite())
        .map(|(&z, &a)| (z, a))
        .collect();
    let above = |a: f64| a > threshold;
    let mut first = None;
    let mut upward = 0;
    for (j, w) in pts.windows(2).enumerate() {
        if !above(w[0].1) && above(w[1].1) {
            upward += 1;
            if first.is_none() {
                first = Some(j);
            }
        }
    }
    let downward = pts.windows(2).any(|w| above(w[0].1) && !above(w[1].1));
    let zj = first.map(|j| {
        let ((z0, a0), (z1, a1)) = (pts[j], pts[j + 1]);
        let t = (threshold - a0) / (a1 - a0);
        match scale {
            Scale::Linear => z0 + t * (z1 - z0),
            Scale::Log => (z0.ln() + t * (z1.ln() - z0.ln())).exp(),
        }
    });
    Crossing {
        zj,
        non_monotone: upward > 1 || downward,
    }
}

pub fn extract_boundary(diagram: &PhaseDiagram, threshold: f64) -> BoundaryExtraction {
    let scale = diagram.metadata.spec.zj_axis.scale;
    let mut out = BoundaryExtraction {
        values: Vec::with_capacity(diagram.g_values.len()),
        non_monotone_rows: Vec::new(),
        no_crossing_rows: Vec::new(),
    };
    for gi in 0..diagram.g_values.len() {
        let psi: Vec<f64> = diagram.row(gi).iter().map(|c| c.abs_psi).collect();
        let c = row_crossing(&diagram.zj_values, &psi, threshold, scale);
        if c.non_monotone {
            out.non_monotone_rows.push(gi);
        }
        if c.zj.is_none() {
            out.no_crossing_rows.push(gi);
        }
        out.values.push(c.zj);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn axis_values() {
        let a = Axis::log(1e-4, 1e-1, 4).values();
        assert_eq!(a[0], 1e-4);
        assert_eq!(a[3], 1e-1);
        assert_relative_eq!(a[1], 1e-3, max_relative = 1e-12);
        let l = Axis::linear(0.0, 1.0, 5).values();
        assert_eq!(l, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::linear(0.0, 1.0, 1).validate("x").is_err());
        assert!(Axis::linear(1.0, 1.0, 3).validate("x").is_err());
        assert!(Axis::log(0.0, 1.0, 3).validate("x").is_err());
        assert!(Axis::log(1e-3, 1.0, 3).validate("x").is_ok());
    }

    #[test]
    fn ramp_crossing() {
        let zj: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let psi: Vec<f64> = zj.iter().map(|&z| (z - 0.5f64).max(0.0)).collect();
        let c = row_crossing(&zj, &psi, 1e-3, Scale::Linear);
        assert_relative_eq!(c.zj.unwrap(), 0.5 + 1e-3, max_relative = 1e-12);
        assert!(!c.non_monotone);
    }

    #[test]
    fn log_interpolation() {
        let zj = [1e-3, 1e-2];
        let c = row_crossing(&zj, &[0.0, 2.0], 1.0, Scale::Log);
        assert_relative_eq!(c.zj.unwrap(), 10f64.powf(-2.5), max_relative = 1e-12);
    }

    #[test]
    fn non_monotone_reports_first_crossing() {
        let zj = [1.0, 2.0, 3.0, 4.0, 5.0];
        let c = row_crossing(&zj, &[0.0, 1.0, 0.0, 0.0, 1.0], 0.5, Scale::Linear);
        assert!(c.non_monotone);
        assert_relative_eq!(c.zj.unwrap(), 1.5);
    }

    #[test]
    fn absent_crossing() {
        let zj = [1.0, 2.0, 3.0];
        assert_eq!(
            row_crossing(&zj, &[0.0, 0.0, 0.0], 0.5, Scale::Linear).zj,
            None
        );
        // Delocalized already at the lowest zJ: no sign change in range.
        assert_eq!(
            row_crossing(&zj, &[1.0, 1.0, 1.0], 0.5, Scale::Linear).zj,
            None
        );
    }

    #[test]
    fn nan_cells_are_skipped() {
        let zj = [1.0, 2.0, 3.0];
        let c = row_crossing(&zj, &[0.0, f64::NAN, 1.0], 0.5, Scale::Linear);
        assert_relative_eq!(c.zj.unwrap(), 2.0);
    }

    fn small_spec() -> SweepSpec {
        SweepSpec {
            g_axis: Axis::linear(0.3, 0.5, 2),
            zj_axis: Axis::log(1e-5, 1e-4, 2),
            ..SweepSpec::figure_default(BathParams::ohmic(1e-4, 1e-4, 0.0))
        }
    }

    #[test]
    fn deep_localized_grid() {
        let d = run_sweep(&small_spec()).unwrap();
        assert_eq!(d.cells.len(), 4);
        assert!(d.cells.iter().all(|c| c.converged && c.abs_psi < 1e-6));
        assert_eq!(d.boundary_numeric, vec![None, None]);
        assert_eq!(d.metadata.no_crossing_rows, vec![0, 1]);
        assert!(d.boundary_analytic.iter().all(|z| z.unwrap() > 0.1));
        assert_eq!(d.metadata.fock_dims, vec![13, 15]);
    }

    #[test]
    fn deterministic_across_workers() {
        let spec = SweepSpec {
            g_axis: Axis::linear(1.3, 1.6, 3),
            zj_axis: Axis::log(1e-3, 1e-2, 5),
            ..small_spec()
        };
        let one = run_sweep(&SweepSpec {
            workers: 1,
            ..spec.clone()
        })
        .unwrap();
        let four = run_sweep(&SweepSpec { workers: 4, ..spec }).unwrap();
        assert_eq!(one.cells, four.cells);
        assert_eq!(one.boundary_numeric, four.boundary_numeric);
        assert!(one.cells.iter().any(|c| c.abs_psi > 0.1));
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = SweepSpec {
            zj_axis: Axis::log(0.0, 1e-2, 5),
            ..small_spec()
        };
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn unequal_temperatures_drop_analytic_overlay() {
        let mut spec = small_spec();
        spec.bath.temp_c = 0.1;
        let d = run_sweep(&spec).unwrap();
        assert!(d.boundary_analytic.iter().all(Option::is_none));
        assert!(d.metadata.analytic_note.is_some());
    }
}

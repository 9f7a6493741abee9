// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Single-point commands print JSON on stdout;
//! tabular commands print CSV on stdout unless an output directory is set.

use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rabi_hubbard::analytic::{
    adiabatic_gap, adiabatic_rate, critical_zj, lme_boundary, psi_closed_form,
};
use rabi_hubbard::dissipation::{bose_occupation, lme_steady_state, BathParams};
use rabi_hubbard::meanfield::{
    classify_point, meanfield_map, solve_fixed_point, Branch, Classification, FixedPointResult,
    Phase,
};
use rabi_hubbard::operators::{basis_ops, build_meanfield_hamiltonian, ModelParams};
use rabi_hubbard::sweep::{extract_boundary, run_sweep_with_progress, PhaseDiagram, SweepMetadata};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{
    boundary_rows, ensure_dir, fmt_f64, fmt_opt, read_json, write_json, write_rows,
    write_sweep_csv, write_text, PartialSweep, BOUNDARY_HEADER,
};
use crate::svg;

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_PARTIAL: &str = "sweep.partial.csv";
pub const SWEEP_META: &str = "sweep_meta.json";
pub const PHASE_DIAGRAM: &str = "phase_diagram.json";
pub const HEATMAP: &str = "heatmap.svg";
pub const BOUNDARY_CSV: &str = "boundary.csv";
pub const ANALYTIC_CSV: &str = "analytic.csv";
pub const PSI_CSV: &str = "analytic_psi.csv";
pub const POINT_JSON: &str = "point.json";
pub const COMPARE_JSON: &str = "compare.json";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cplx {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Closed-form comparators at one point; absent for non-Ohmic baths or
/// unequal bath temperatures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticComparators {
    pub delta: f64,
    pub gamma_delta: f64,
    pub n_b: f64,
    pub zjc: f64,
    pub abs_psi_closed_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub units: String,
    pub g: f64,
    pub zj: f64,
    pub temp_q: f64,
    pub temp_c: f64,
    pub fock_dim: usize,
    pub phase: Phase,
    pub psi: Cplx,
    pub abs_psi: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub branch: String,
    /// No branch converged and the point was classified localized by default.
    pub warning: bool,
    pub branches_tried: usize,
    pub analytic: Option<AnalyticComparators>,
}

fn branch_label(b: &Branch) -> String {
    match b {
        Branch::FromZero => "from_zero".into(),
        Branch::FromSeed(s) if s.im == 0.0 => format!("from_seed({})", s.re),
        Branch::FromSeed(s) => format!("from_seed({}{:+}i)", s.re, s.im),
    }
}

fn require_zj_value(zj: f64) -> Result<f64, CliError> {
    if zj >= 0.0 && zj.is_finite() {
        Ok(zj)
    } else {
        Err(CliError::Config(format!(
            "`model.zj` must be finite and >= 0, got {zj}"
        )))
    }
}

fn comparators(p: &ModelParams, zj: f64, b: &BathParams) -> Option<AnalyticComparators> {
    if !b.is_ohmic() || b.temp_q != b.temp_c {
        return None;
    }
    let t = b.temp_q;
    let delta = adiabatic_gap(p);
    Some(AnalyticComparators {
        delta,
        gamma_delta: adiabatic_rate(p, b).ok()?,
        n_b: bose_occupation(delta, t).ok()?,
        zjc: critical_zj(p, b, t).ok()?,
        abs_psi_closed_form: psi_closed_form(p, zj, b, t).ok()?,
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn sweep_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg
        .out_dir()
        .map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    ensure_dir(&dir)?;
    Ok(dir)
}

/// Writes a table to `<out>/<name>` when an output directory is set, else to stdout.
fn emit_table<const K: usize>(
    cfg: &RunConfig,
    name: &str,
    header: [&str; K],
    rows: &[[String; K]],
) -> Result<(), CliError> {
    match cfg.out_dir() {
        Some(dir) => {
            ensure_dir(dir)?;
            let path = dir.join(name);
            let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
            write_rows(io::BufWriter::new(file), &path, header, rows)
        }
        None => write_rows(io::stdout().lock(), Path::new("<stdout>"), header, rows),
    }
}

pub fn point(cfg: &RunConfig) -> Result<(), CliError> {
    let g = cfg.require_g()?;
    let zj = require_zj_value(cfg.require_zj()?)?;
    let p = cfg.model_at(g)?;
    let b = cfg.bath()?;
    let opts = cfg.solver()?;

    let (selected, phase, warning, tried): (FixedPointResult, Phase, bool, usize) =
        match cfg.solver.seed {
            Some(seed) => {
                let r = solve_fixed_point(&p, zj, &b, Complex64::new(seed, 0.0), &opts)?;
                let phase = if r.converged && r.abs_psi > opts.psi_threshold {
                    Phase::Delocalized
                } else {
                    Phase::Localized
                };
                let warning = !r.converged;
                (r, phase, warning, 1)
            }
            None => {
                let Classification {
                    phase,
                    selected,
                    branches,
                    warning,
                    ..
                } = classify_point(&p, zj, &b, &opts)?;
                (selected, phase, warning, branches.len())
            }
        };

    let record = PointRecord {
        units: "omega0".into(),
        g,
        zj,
        temp_q: b.temp_q,
        temp_c: b.temp_c,
        fock_dim: p.fock_dim,
        phase,
        psi: selected.psi.into(),
        abs_psi: selected.abs_psi,
        iterations: selected.iterations,
        converged: selected.converged && !warning,
        residual: selected.residual,
        branch: branch_label(&selected.branch),
        warning,
        branches_tried: tried,
        analytic: comparators(&p, zj, &b),
    };
    print_json(&record)?;
    if let Some(dir) = cfg.out_dir() {
        ensure_dir(dir)?;
        write_json(&dir.join(POINT_JSON), &record)?;
    }
    if !record.converged {
        return Err(CliError::Numeric(format!(
            "fixed point did not converge in {} iterations (residual {:.3e})",
            record.iterations, record.residual
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct SweepMeta {
    pub units: String,
    pub config: RunConfig,
    pub metadata: SweepMetadata,
    pub wall_time_s: f64,
    pub versions: Versions,
}

#[derive(Serialize, Deserialize)]
pub struct Versions {
    pub rabi_hubbard_cli: String,
    pub target: String,
}

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.sweep_spec()?;
    let dir = sweep_dir(cfg)?;
    let g_values = spec.g_axis.values();
    let zj_values = spec.zj_axis.values();

    let partial = PartialSweep::create(dir.join(SWEEP_PARTIAL))?;
    let write_error: Mutex<Option<CliError>> = Mutex::new(None);
    let start = Instant::now();
    let diagram = run_sweep_with_progress(&spec, &|gi, cells| {
        if let Err(e) = partial.append(g_values[gi], &zj_values, cells) {
            write_error
                .lock()
                .unwrap_or_else(|p| p.into_inner())
                .get_or_insert(e);
        }
    })?;
    let wall = start.elapsed().as_secs_f64();
    if let Some(e) = write_error.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(e);
    }

    write_sweep_csv(&dir.join(SWEEP_CSV), &diagram)?;
    write_json(&dir.join(PHASE_DIAGRAM), &diagram)?;
    let meta = SweepMeta {
        units: "omega0".into(),
        config: cfg.clone(),
        metadata: diagram.metadata.clone(),
        wall_time_s: wall,
        versions: Versions {
            rabi_hubbard_cli: env!("CARGO_PKG_VERSION").into(),
            target: std::env::consts::ARCH.to_string() + "-" + std::env::consts::OS,
        },
    };
    write_json(&dir.join(SWEEP_META), &meta)?;
    if cfg.output.heatmap {
        write_text(&dir.join(HEATMAP), &svg::heatmap(&diagram))?;
    }
    partial.remove()?;

    let m = &diagram.metadata;
    eprintln!(
        "sweep: {}x{} cells in {wall:.1} s, {} unconverged, {} failed; written to {}",
        g_values.len(),
        zj_values.len(),
        m.unconverged,
        m.failures.len(),
        dir.display()
    );
    if cfg.output.strict && (m.unconverged > 0 || !m.failures.is_empty()) {
        return Err(CliError::Numeric(format!(
            "{} unconverged and {} failed cells (--strict)",
            m.unconverged,
            m.failures.len()
        )));
    }
    Ok(())
}

fn analytic_columns(
    cfg: &RunConfig,
    g: f64,
    b: &BathParams,
) -> Result<(Option<f64>, Option<f64>), CliError> {
    let p = cfg.model_at(g)?;
    let analytic = (b.is_ohmic() && b.temp_q == b.temp_c)
        .then(|| critical_zj(&p, b, b.temp_q).ok())
        .flatten()
        .filter(|z| z.is_finite());
    let lme = lme_boundary(&p, b, cfg.model.lme_dim).ok();
    Ok((analytic, lme))
}

/// `from`: re-extract from a saved diagram; `threshold` overrides its stored threshold.
pub fn boundary(
    cfg: &RunConfig,
    from: Option<&Path>,
    analytic_only: bool,
    threshold: Option<f64>,
) -> Result<(), CliError> {
    let rows = if analytic_only {
        if cfg.model.lme_dim == 0 {
            return Err(CliError::Config("`model.lme_dim` must be >= 1".into()));
        }
        let axis = cfg.require_g_axis()?;
        axis.validate("sweep.g")?;
        let b = cfg.bath()?;
        axis.values()
            .into_iter()
            .map(|g| {
                let (a, l) = analytic_columns(cfg, g, &b)?;
                Ok([fmt_f64(g), String::new(), fmt_opt(a), fmt_opt(l)])
            })
            .collect::<Result<Vec<_>, CliError>>()?
    } else {
        let mut diagram: PhaseDiagram = match from {
            Some(path) => read_json(path)?,
            None => rabi_hubbard::sweep::run_sweep(&cfg.sweep_spec()?)?,
        };
        if let Some(t) = threshold {
            if !(t > 0.0) {
                return Err(CliError::Config(format!(
                    "`solver.threshold` must be > 0, got {t}"
                )));
            }
            diagram.boundary_numeric = extract_boundary(&diagram, t).values;
        }
        boundary_rows(&diagram)
    };
    emit_table(cfg, BOUNDARY_CSV, BOUNDARY_HEADER, &rows)
}

pub const ANALYTIC_HEADER: [&str; 6] = [
    "g_over_w0",
    "delta_over_w0",
    "gamma_delta_over_w0",
    "n_B",
    "zJc_over_w0",
    "J_crit_lme_over_w0",
];
pub const PSI_HEADER: [&str; 3] = ["g_over_w0", "zJ_over_w0", "abs_psi_closed_form"];

pub fn analytic(cfg: &RunConfig) -> Result<(), CliError> {
    let g_values = match (cfg.sweep.g, cfg.model.g) {
        (Some(axis), _) => {
            axis.validate("sweep.g")?;
            axis.values()
        }
        (None, Some(g)) => vec![g],
        (None, None) => {
            return Err(CliError::Config(
                "missing required key `sweep.g` or `model.g` (or flag --g-axis / --g)".into(),
            ))
        }
    };
    let zj_values = match (cfg.sweep.zj, cfg.model.zj) {
        (Some(axis), _) => {
            axis.validate("sweep.zj")?;
            axis.values()
        }
        (None, Some(zj)) => vec![require_zj_value(zj)?],
        (None, None) => Vec::new(),
    };
    let b = cfg.bath()?;
    let t = cfg.analytic_temperature()?;
    if cfg.model.lme_dim == 0 {
        return Err(CliError::Config("`model.lme_dim` must be >= 1".into()));
    }

    let mut table = Vec::with_capacity(g_values.len());
    let mut curves = Vec::new();
    for &g in &g_values {
        let p = cfg.model_at(g)?;
        let delta = adiabatic_gap(&p);
        table.push([
            fmt_f64(g),
            fmt_f64(delta),
            fmt_f64(adiabatic_rate(&p, &b)?),
            fmt_f64(bose_occupation(delta, t)?),
            fmt_f64(critical_zj(&p, &b, t)?),
            fmt_opt(lme_boundary(&p, &b, cfg.model.lme_dim).ok()),
        ]);
        for &zj in &zj_values {
            curves.push([
                fmt_f64(g),
                fmt_f64(zj),
                fmt_f64(psi_closed_form(&p, zj, &b, t)?),
            ]);
        }
    }
    emit_table(cfg, ANALYTIC_CSV, ANALYTIC_HEADER, &table)?;
    if !curves.is_empty() {
        if cfg.out_dir().is_none() {
            println!();
        }
        emit_table(cfg, PSI_CSV, PSI_HEADER, &curves)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub a: Cplx,
    pub n: f64,
    pub sigma_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub units: String,
    pub g: f64,
    pub zj: f64,
    pub fock_dim: usize,
    /// Self-consistent DME order parameter at which both steady states are evaluated.
    pub psi: Cplx,
    pub converged: bool,
    pub dme: Observables,
    pub lme: Observables,
    pub lme_residual: f64,
}

pub fn compare(cfg: &RunConfig) -> Result<(), CliError> {
    let g = cfg.require_g()?;
    let zj = require_zj_value(cfg.require_zj()?)?;
    let p = cfg.model_at(g)?;
    let b = cfg.bath()?;
    let opts = cfg.solver()?;

    let c = classify_point(&p, zj, &b, &opts)?;
    let psi = c.selected.psi;
    let eval = meanfield_map(&p, zj, &b, psi, opts.null_space)?;
    let rho_dme = eval.state.density_matrix(&eval.spectrum)?;
    let h = build_meanfield_hamiltonian(&p, zj, psi)?;
    let lme = lme_steady_state(&h, &p, &b)?;

    let nf = p.fock_dim;
    let (a, n, sz) = (
        basis_ops::annihilation(nf),
        basis_ops::number(nf),
        basis_ops::sigma_z(nf),
    );
    let observe = |rho: &DMatrix<Complex64>| Observables {
        a: (rho * &a).trace().into(),
        n: (rho * &n).trace().re,
        sigma_z: (rho * &sz).trace().re,
    };
    let record = CompareRecord {
        units: "omega0".into(),
        g,
        zj,
        fock_dim: nf,
        psi: psi.into(),
        converged: c.converged() && !c.warning,
        dme: observe(&rho_dme),
        lme: observe(&lme.rho),
        lme_residual: lme.residual,
    };
    print_json(&record)?;
    if let Some(dir) = cfg.out_dir() {
        ensure_dir(dir)?;
        write_json(&dir.join(COMPARE_JSON), &record)?;
    }
    if cfg.output.strict && !record.converged {
        return Err(CliError::Numeric(
            "DME fixed point did not converge (--strict)".into(),
        ));
    }
    Ok(())
}

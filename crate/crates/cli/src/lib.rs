// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: `point`, `sweep`, `boundary`, `analytic` and
//! `compare`. Exit codes: 0 success, 2 configuration error, 3 numerical
//! failure (or non-convergence under `--strict`), 4 I/O failure.

// `!(x > 0.0)` is deliberate throughout: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use rabi_hubbard::sweep::Axis;

use crate::config::{parse_axis, Overrides, RunConfig};
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "rabi-hubbard",
    version,
    about = "Mean-field phase diagram of the dissipative Rabi-Hubbard lattice"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; each overrides the matching config key.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Qubit-cavity coupling g / ω0.
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Total hopping zJ / ω0.
    #[arg(long, global = true)]
    pub zj: Option<f64>,
    /// Common bath temperature T / ω0.
    #[arg(long, global = true)]
    pub temp: Option<f64>,
    #[arg(long, global = true)]
    pub gamma_q: Option<f64>,
    #[arg(long, global = true)]
    pub gamma_c: Option<f64>,
    /// Coordination number.
    #[arg(long, global = true)]
    pub z: Option<u32>,
    /// Fixed Fock cutoff N (default ⌈g² + 8g + 10⌉).
    #[arg(long, global = true)]
    pub fock_dim: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, env = "RABI_HUBBARD_WORKERS")]
    pub workers: Option<usize>,
    /// |ψ| threshold separating the phases.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", env = "RABI_HUBBARD_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// Exit 3 when any point fails to converge.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Lattice dimension d in the LME boundary estimate.
    #[arg(long, global = true)]
    pub lme_dim: Option<u32>,
    /// Single real seed for `point` instead of the standard seed set.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub seed: Option<f64>,
    /// g axis as MIN,MAX,COUNT[,linear|log].
    #[arg(long, global = true, value_parser = parse_axis, value_name = "AXIS")]
    pub g_axis: Option<Axis>,
    /// zJ axis as MIN,MAX,COUNT[,linear|log].
    #[arg(long, global = true, value_parser = parse_axis, value_name = "AXIS")]
    pub zj_axis: Option<Axis>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve and classify a single (g, zJ) point.
    Point,
    /// Scan the (g, zJ) grid and write the phase diagram.
    Sweep {
        /// Skip the SVG heatmap.
        #[arg(long)]
        no_heatmap: bool,
    },
    /// Numeric, analytic and LME phase boundaries per g.
    Boundary {
        /// Re-extract from a saved phase_diagram.json instead of sweeping.
        #[arg(long, value_name = "FILE", conflicts_with = "analytic_only")]
        from: Option<PathBuf>,
        /// Closed-form columns only; the numeric column is left empty.
        #[arg(long)]
        analytic_only: bool,
    },
    /// Closed-form Δ, Γ(Δ), n_B(Δ), zJc(T) and |ψ|(zJ).
    Analytic,
    /// DME and local Lindblad steady states at one point.
    Compare,
}

impl Cli {
    /// Loads the config file (if any) and applies the flag overrides.
    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.global.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let g = &self.global;
        cfg.apply(&Overrides {
            g: g.g,
            zj: g.zj,
            temp: g.temp,
            gamma_q: g.gamma_q,
            gamma_c: g.gamma_c,
            z: g.z,
            fock_dim: g.fock_dim,
            tol: g.tol,
            max_iter: g.max_iter,
            workers: g.workers,
            threshold: g.threshold,
            out: g.out.clone(),
            strict: g.strict,
            lme_dim: g.lme_dim,
            seed: g.seed,
            g_axis: g.g_axis,
            zj_axis: g.zj_axis,
            no_heatmap: matches!(self.command, Command::Sweep { no_heatmap: true }),
        });
        Ok(cfg)
    }
}

/// Runs the parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve_config()?;
    match &cli.command {
        Command::Point => commands::point(&cfg),
        Command::Sweep { .. } => commands::sweep(&cfg),
        Command::Boundary {
            from,
            analytic_only,
        } => commands::boundary(&cfg, from.as_deref(), *analytic_only, cli.global.threshold),
        Command::Analytic => commands::analytic(&cfg),
        Command::Compare => commands::compare(&cfg),
    }
}

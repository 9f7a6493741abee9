// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: TOML file with `[model]`, `[bath]`, `[sweep]`,
//! `[solver]` and `[output]` sections, overridden by command-line flags.
//!
//! Every field has a default except the physics inputs a command needs
//! explicitly: `model.g`/`model.zj` for single points, the sweep axes for
//! grid commands and the bath temperature everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rabi_hubbard::dissipation::{BathParams, NullSpaceMethod, SpectralKind};
use rabi_hubbard::meanfield::SolverOptions;
use rabi_hubbard::operators::{default_fock_dim, ModelParams};
use rabi_hubbard::sweep::{Axis, SweepSpec, Truncation};

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub bath: BathSection,
    pub sweep: SweepSection,
    pub solver: SolverSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub omega0: f64,
    pub epsilon: f64,
    pub z: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zj: Option<f64>,
    /// Fixed Fock cutoff; absent means ⌈g² + 8g + 10⌉ per g.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_dim: Option<usize>,
    /// Lattice dimension d in the LME boundary estimate.
    pub lme_dim: u32,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            epsilon: 1.0,
            z: 3,
            g: None,
            zj: None,
            fock_dim: None,
            lme_dim: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathSection {
    pub gamma_q: f64,
    pub gamma_c: f64,
    /// Common temperature of both baths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temp_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temp_c: Option<f64>,
    pub spectrum: SpectralKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            gamma_q: 1e-4,
            gamma_c: 1e-4,
            temp: None,
            temp_q: None,
            temp_c: None,
            spectrum: SpectralKind::Ohmic,
            cutoff: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zj: Option<Axis>,
    /// Worker threads; 0 picks the number of cores.
    pub workers: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullSpace {
    #[default]
    Gth,
    Svd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tolerance: f64,
    pub max_iter: usize,
    pub mixing: f64,
    pub oscillation_mixing: f64,
    pub accelerate: bool,
    pub threshold: f64,
    pub check_symmetry: bool,
    pub null_space: NullSpace,
    /// Single real seed for `point`; absent runs the standard seed set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            tolerance: d.tolerance,
            max_iter: d.max_iter,
            mixing: d.mixing,
            oscillation_mixing: d.oscillation_mixing,
            accelerate: d.accelerate,
            threshold: d.psi_threshold,
            check_symmetry: d.check_symmetry,
            null_space: NullSpace::Gth,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub heatmap: bool,
    pub strict: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            heatmap: true,
            strict: false,
        }
    }
}

/// Values given on the command line; `None` leaves the config untouched.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub g: Option<f64>,
    pub zj: Option<f64>,
    pub temp: Option<f64>,
    pub gamma_q: Option<f64>,
    pub gamma_c: Option<f64>,
    pub z: Option<u32>,
    pub fock_dim: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub workers: Option<usize>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub lme_dim: Option<u32>,
    pub seed: Option<f64>,
    pub g_axis: Option<Axis>,
    pub zj_axis: Option<Axis>,
    pub no_heatmap: bool,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid config: {}", e.message().trim())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is representable as TOML")
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        if o.g.is_some() {
            self.model.g = o.g;
        }
        if o.zj.is_some() {
            self.model.zj = o.zj;
        }
        if o.temp.is_some() {
            // A common temperature on the command line replaces per-bath values.
            self.bath.temp = o.temp;
            self.bath.temp_q = None;
            self.bath.temp_c = None;
        }
        set(&mut self.bath.gamma_q, &o.gamma_q);
        set(&mut self.bath.gamma_c, &o.gamma_c);
        set(&mut self.model.z, &o.z);
        if o.fock_dim.is_some() {
            self.model.fock_dim = o.fock_dim;
        }
        set(&mut self.solver.tolerance, &o.tol);
        set(&mut self.solver.max_iter, &o.max_iter);
        set(&mut self.sweep.workers, &o.workers);
        set(&mut self.solver.threshold, &o.threshold);
        if o.out.is_some() {
            self.output.dir = o.out.clone();
        }
        self.output.strict |= o.strict;
        set(&mut self.model.lme_dim, &o.lme_dim);
        if o.seed.is_some() {
            self.solver.seed = o.seed;
        }
        if o.g_axis.is_some() {
            self.sweep.g = o.g_axis;
        }
        if o.zj_axis.is_some() {
            self.sweep.zj = o.zj_axis;
        }
        if o.no_heatmap {
            self.output.heatmap = false;
        }
    }

    pub fn require_g(&self) -> Result<f64, CliError> {
        self.model.g.ok_or_else(|| missing("model.g", "--g"))
    }

    pub fn require_zj(&self) -> Result<f64, CliError> {
        self.model.zj.ok_or_else(|| missing("model.zj", "--zj"))
    }

    pub fn require_g_axis(&self) -> Result<Axis, CliError> {
        self.sweep.g.ok_or_else(|| missing("sweep.g", "--g-axis"))
    }

    pub fn require_zj_axis(&self) -> Result<Axis, CliError> {
        self.sweep
            .zj
            .ok_or_else(|| missing("sweep.zj", "--zj-axis"))
    }

    fn truncation(&self) -> Truncation {
        self.model
            .fock_dim
            .map_or(Truncation::Rule, Truncation::Fixed)
    }

    pub fn model_at(&self, g: f64) -> Result<ModelParams, CliError> {
        let m = &self.model;
        let p = ModelParams {
            omega0: m.omega0,
            epsilon: m.epsilon,
            g,
            z: m.z,
            fock_dim: m.fock_dim.unwrap_or_else(|| default_fock_dim(g, m.omega0)),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn bath(&self) -> Result<BathParams, CliError> {
        let b = &self.bath;
        let temp_q = b
            .temp_q
            .or(b.temp)
            .ok_or_else(|| missing("bath.temp", "--temp"))?;
        let temp_c = b
            .temp_c
            .or(b.temp)
            .ok_or_else(|| missing("bath.temp", "--temp"))?;
        let bath = BathParams {
            gamma_q: b.gamma_q,
            gamma_c: b.gamma_c,
            temp_q,
            temp_c,
            spectrum_kind: b.spectrum,
            cutoff: b.cutoff,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// Temperature used by the closed forms, which assume T_q = T_c.
    pub fn analytic_temperature(&self) -> Result<f64, CliError> {
        let b = self.bath()?;
        if b.temp_q != b.temp_c {
            return Err(CliError::Config(
                "analytic formulas need equal bath temperatures (set bath.temp)".into(),
            ));
        }
        Ok(b.temp_q)
    }

    pub fn solver(&self) -> Result<SolverOptions, CliError> {
        let s = &self.solver;
        let opts = SolverOptions {
            tolerance: s.tolerance,
            max_iter: s.max_iter,
            mixing: s.mixing,
            oscillation_mixing: s.oscillation_mixing,
            accelerate: s.accelerate,
            psi_threshold: s.threshold,
            check_symmetry: s.check_symmetry,
            null_space: match s.null_space {
                NullSpace::Gth => NullSpaceMethod::Gth,
                NullSpace::Svd => NullSpaceMethod::Svd,
            },
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec, CliError> {
        let g_axis = self.require_g_axis()?;
        let zj_axis = self.require_zj_axis()?;
        let spec = SweepSpec {
            g_axis,
            zj_axis,
            model: self.model_at(g_axis.min.max(0.0))?,
            bath: self.bath()?,
            solver: self.solver()?,
            truncation: self.truncation(),
            workers: self.sweep.workers,
            lme_dim: self.model.lme_dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Output directory, if one was configured.
    pub fn out_dir(&self) -> Option<&Path> {
        self.output.dir.as_deref()
    }
}

fn missing(key: &str, flag: &str) -> CliError {
    CliError::Config(format!("missing required key `{key}` (or flag {flag})"))
}

/// Parses `MIN,MAX,COUNT[,linear|log]`.
pub fn parse_axis(text: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("expected MIN,MAX,COUNT[,linear|log], got `{text}`"));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    let count = parts[2]
        .parse::<usize>()
        .map_err(|e| format!("`{}`: {e}", parts[2]))?;
    let axis = Axis::linear(num(parts[0])?, num(parts[1])?, count);
    match parts.get(3).copied() {
        None | Some("linear") => Ok(axis),
        Some("log") => Ok(Axis::log(axis.min, axis.max, count)),
        Some(other) => Err(format!("unknown axis scale `{other}`")),
    }
}

// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Self-consistent order parameter ψ = Tr{ρ_ss a} and phase classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dissipation::{
    dme_rates, dme_steady_state_with, BathParams, DensityState, NullSpaceMethod,
};
use crate::error::{invalid, Error, Result};
use crate::operators::{build_meanfield_hamiltonian, diagonalize, ModelParams, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Convergence threshold on |F(ψ) − ψ|.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Weight m of the previous iterate in ψ' = (1 − m) F(ψ) + m ψ.
    pub mixing: f64,
    /// Mixing used once an oscillation has been detected.
    pub oscillation_mixing: f64,
    /// Aitken Δ² extrapolation once successive steps contract geometrically.
    pub accelerate: bool,
    /// |ψ| above which a converged branch counts as delocalized.
    pub psi_threshold: f64,
    /// Also run the sign-flipped standard seeds.
    pub check_symmetry: bool,
    #[serde(skip)]
    pub null_space: NullSpaceMethod,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iter: 500,
            mixing: 0.3,
            oscillation_mixing: 0.6,
            accelerate: true,
            psi_threshold: 1e-3,
            check_symmetry: false,
            null_space: NullSpaceMethod::Gth,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(invalid(
                "tolerance",
                format!("must be > 0, got {}", self.tolerance),
            ));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be >= 1"));
        }
        for (name, m) in [
            ("mixing", self.mixing),
            ("oscillation_mixing", self.oscillation_mixing),
        ] {
            if !(0.0..1.0).contains(&m) {
                return Err(invalid(name, format!("must lie in [0, 1), got {m}")));
            }
        }
        if !(self.psi_threshold > 0.0) {
            return Err(invalid("psi_threshold", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Branch {
    FromZero,
    FromSeed(Complex64),
}

impl Branch {
    fn of(seed: Complex64) -> Self {
        if seed == Complex64::new(0.0, 0.0) {
            Branch::FromZero
        } else {
            Branch::FromSeed(seed)
        }
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointResult {
    pub psi: Complex64,
    pub abs_psi: f64,
    pub iterations: usize,
    pub converged: bool,
    /// |F(ψ) − ψ| at the returned ψ.
    pub residual: f64,
    pub populations: DensityState,
    pub branch: Branch,
    /// A sign-alternating step pattern forced the damped mixing.
    pub oscillation: bool,
    /// The iteration settled into a period-2 cycle.
    pub period_two: bool,
}

/// One evaluation of the self-consistency map F(ψ).
#[derive(Clone, Debug)]
pub struct MapEvaluation {
    pub psi_out: Complex64,
    pub spectrum: Spectrum,
    pub state: DensityState,
}

/// ψ = Σ_n P_n ⟨φn|a|φn⟩.
pub fn order_parameter(state: &DensityState, s: &Spectrum) -> Result<Complex64> {
    if state.dim() != s.dim() {
        return Err(Error::BasisMismatch {
            state: state.dim(),
            spectrum: s.dim(),
        });
    }
    Ok(state
        .populations
        .iter()
        .zip(&s.a_diag)
        .filter(|(p, _)| **p != 0.0)
        .map(|(p, a)| a * *p)
        .sum())
}

/// F(ψ): build H_MF(ψ), diagonalize, solve the DME steady state, return Tr{ρ a}.
pub fn meanfield_map(
    p: &ModelParams,
    zj: f64,
    b: &BathParams,
    psi: Complex64,
    null_space: NullSpaceMethod,
) -> Result<MapEvaluation> {
    let spectrum = diagonalize(&build_meanfield_hamiltonian(p, zj, psi)?)?;
    let rates = dme_rates(&spectrum, p, b)?;
    let state = dme_steady_state_with(&rates, null_space)?;
    let psi_out = order_parameter(&state, &spectrum)?;
    Ok(MapEvaluation {
        psi_out,
        spectrum,
        state,
    })
}

/// Damped fixed-point iteration of F from `seed`.
///
/// Non-convergence is reported through `converged = false`, never as an
/// error; errors are reserved for invalid input and failed steady-state
/// solves.
pub fn solve_fixed_point(
    p: &ModelParams,
    zj: f64,
    b: &BathParams,
    seed: Complex64,
    opts: &SolverOptions,
) -> Result<FixedPointResult> {
    p.validate()?;
    b.validate()?;
    opts.validate()?;
    if !(seed.re.is_finite() && seed.im.is_finite()) {
        return Err(invalid("seed", "must be finite"));
    }

    let mut psi = seed;
    let mut mixing = opts.mixing;
    let mut oscillation = false;
    let mut period_two = false;
    let mut sign_flips = 0usize;
    let mut prev_step: Option<Complex64> = None;
    let mut prev_psi: Option<Complex64> = None;
    // Observed contraction |step_k| / |step_{k-1}| of the mixed iteration.
    let mut ratio: Option<f64> = None;
    // Plain mixed iterates since the last extrapolation.
    let mut run: Vec<Complex64> = vec![seed];
    let mut best: Option<(f64, Complex64, DensityState)> = None;

    for it in 1..=opts.max_iter {
        let eval = meanfield_map(p, zj, b, psi, opts.null_space)?;
        let f = eval.psi_out;
        let residual = (f - psi).norm();
        if residual < opts.tolerance
            && error_estimate(residual, mixing, ratio, 1e-3 * opts.tolerance) < opts.tolerance
        {
            return Ok(finish(
                psi,
                it,
                true,
                residual,
                eval.state,
                seed,
                oscillation,
                period_two,
            ));
        }
        if best.as_ref().is_none_or(|(r, _, _)| residual < *r) {
            best = Some((residual, psi, eval.state));
        }
        if let Some(pp) = prev_psi {
            if (f - pp).norm() < opts.tolerance {
                period_two = true;
            }
        }

        let step = (f - psi) * (1.0 - mixing);
        if let Some(prev) = prev_step {
            if prev.norm() > 0.0 {
                ratio = Some(step.norm() / prev.norm());
            }
            if (step * prev.conj()).re < 0.0 {
                sign_flips += 1;
            } else {
                sign_flips = 0;
            }
        }
        if sign_flips >= 3 && !oscillation {
            oscillation = true;
            mixing = mixing.max(opts.oscillation_mixing);
        }
        prev_step = Some(step);
        prev_psi = Some(psi);
        let mut next = psi + step;

        run.push(next);
        if opts.accelerate && !oscillation {
            if let Some(x) = aitken(&run) {
                next = x;
                run.clear();
                run.push(next);
                prev_step = None;
            }
        }
        psi = next;
    }

    let (residual, psi_best, state) = best.expect("at least one iteration ran");
    Ok(finish(
        psi_best,
        opts.max_iter,
        false,
        residual,
        state,
        seed,
        oscillation,
        period_two,
    ))
}

/// Distance to the fixed point implied by the residual: with the mixed map
/// contracting at rate q = m + (1 − m)F', |ψ − ψ*| ≈ r (1 − m)/(1 − q).
/// Residuals below `floor` are taken at face value since q is noise there.
fn error_estimate(residual: f64, mixing: f64, ratio: Option<f64>, floor: f64) -> f64 {
    match ratio {
        Some(q) if residual > floor => {
            if q < 1.0 {
                residual * (1.0 - mixing) / (1.0 - q)
            } else {
                f64::INFINITY
            }
        }
        _ => residual,
    }
}

/// Aitken Δ² estimate from the last four iterates when the contraction ratio
/// is stable and below one.
fn aitken(run: &[Complex64]) -> Option<Complex64> {
    let n = run.len();
    if n < 4 {
        return None;
    }
    let (x0, x1, x2, x3) = (run[n - 4], run[n - 3], run[n - 2], run[n - 1]);
    let (d1, d2, d3) = (x1 - x0, x2 - x1, x3 - x2);
    if d1.norm() == 0.0 || d2.norm() == 0.0 {
        return None;
    }
    let q_prev = d2 / d1;
    let q = d3 / d2;
    // The extrapolation error scales like δq/(1 − q)², so the allowed drift
    // in the ratio shrinks as q approaches one.
    let gap = 1.0 - q.norm();
    if !(gap > 1e-9) || (q - q_prev).norm() > 0.1 * gap {
        return None;
    }
    let x = x3 + d3 * q / (Complex64::new(1.0, 0.0) - q);
    x.is_finite().then_some(x)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    psi: Complex64,
    iterations: usize,
    converged: bool,
    residual: f64,
    populations: DensityState,
    seed: Complex64,
    oscillation: bool,
    period_two: bool,
) -> FixedPointResult {
    // Report ψ on the real axis, keeping the sign of its real part.
    let psi = if psi.im != 0.0 {
        let sign = if psi.re < 0.0 { -1.0 } else { 1.0 };
        Complex64::new(sign * psi.norm(), 0.0)
    } else {
        psi
    };
    FixedPointResult {
        psi,
        abs_psi: psi.norm(),
        iterations,
        converged,
        residual,
        populations,
        branch: Branch::of(seed),
        oscillation,
        period_two,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Localized,
    Delocalized,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Localized => "localized",
            Phase::Delocalized => "delocalized",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub phase: Phase,
    pub abs_psi: f64,
    /// The branch the classification is based on.
    pub selected: FixedPointResult,
    pub branches: Vec<FixedPointResult>,
    /// The verdict is not backed by converged branches: either none converged,
    /// or ψ = 0 was selected while another branch was still unresolved. The
    /// point is reported localized.
    pub warning: bool,
}

impl Classification {
    pub fn converged(&self) -> bool {
        self.selected.converged
    }

    pub fn total_iterations(&self) -> usize {
        self.branches.iter().map(|b| b.iterations).sum()
    }
}

/// Standard seeds {0, 0.1, 1.0, g/ω0}, with the negatives of the nonzero ones
/// when symmetry checks are requested. Duplicates are dropped.
///
/// ψ = 0 is an exact fixed point by Z2 symmetry; its branch converges in one
/// step and is what a localized point reports.
pub fn standard_seeds(p: &ModelParams, opts: &SolverOptions) -> Vec<Complex64> {
    let mut seeds = Vec::new();
    let mut push = |x: f64| {
        let z = Complex64::new(x, 0.0);
        if !seeds.contains(&z) {
            seeds.push(z);
        }
    };
    for x in [0.0, 0.1, 1.0, p.g / p.omega0] {
        push(x);
    }
    if opts.check_symmetry {
        for x in [0.1, 1.0, p.g / p.omega0] {
            push(-x);
        }
    }
    seeds
}

pub fn classify_point(
    p: &ModelParams,
    zj: f64,
    b: &BathParams,
    opts: &SolverOptions,
) -> Result<Classification> {
    classify_point_with_seeds(p, zj, b, opts, &[])
}

/// As [`classify_point`], trying `extra` seeds before the standard ones.
pub fn classify_point_with_seeds(
    p: &ModelParams,
    zj: f64,
    b: &BathParams,
    opts: &SolverOptions,
    extra: &[Complex64],
) -> Result<Classification> {
    let mut seeds: Vec<Complex64> = Vec::new();
    for &s in extra.iter().chain(standard_seeds(p, opts).iter()) {
        if !seeds.contains(&s) {
            seeds.push(s);
        }
    }
    let branches = seeds
        .iter()
        .map(|&s| solve_fixed_point(p, zj, b, s, opts))
        .collect::<Result<Vec<_>>>()?;

    // Largest converged |ψ| if it clears the threshold, otherwise the branch
    // closest to the symmetric fixed point.
    let largest = branches
        .iter()
        .filter(|r| r.converged)
        .max_by(|a, b| a.abs_psi.total_cmp(&b.abs_psi));
    let best_converged = match largest {
        Some(r) if r.abs_psi > opts.psi_threshold => Some(r),
        _ => branches
            .iter()
            .filter(|r| r.converged)
            .min_by(|a, b| a.abs_psi.total_cmp(&b.abs_psi)),
    };
    // ψ = 0 is always a fixed point, so a localized verdict is only trusted
    // when no other branch is still unresolved.
    let all_converged = branches.iter().all(|r| r.converged);
    let (selected, warning) = match best_converged {
        Some(r) if r.abs_psi > opts.psi_threshold || all_converged => (r.clone(), false),
        Some(r) => (r.clone(), true),
        None => {
            let r = branches
                .iter()
                .min_by(|a, b| a.residual.total_cmp(&b.residual))
                .expect("at least one seed");
            (r.clone(), true)
        }
    };
    let phase = if !warning && selected.abs_psi > opts.psi_threshold {
        Phase::Delocalized
    } else {
        Phase::Localized
    };
    Ok(Classification {
        phase,
        abs_psi: selected.abs_psi,
        selected,
        branches,
        warning,
    })
}

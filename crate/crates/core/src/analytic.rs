// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-dressed-state approximation in the deep-strong coupling regime.
//!
//! Keeping only the two lowest adiabatic states
//! |φ0,1⟩ ≈ (|−⟩|α⟩ ∓ |+⟩|−α⟩)/√2 with α = g/ω0 reduces the DME to a
//! three-variable system whose fixed point gives closed forms for |ψ| and the
//! critical hopping zJc. Ohmic baths only.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use ode_solvers::{Dopri5, System};
use serde::{Deserialize, Serialize};

use crate::dissipation::{bose_occupation, BathParams};
use crate::error::{invalid, Error, Result};
use crate::operators::ModelParams;

/// Δ = ε exp(−2g²/ω0²).
pub fn adiabatic_gap(p: &ModelParams) -> f64 {
    p.epsilon * (-2.0 * p.g * p.g / (p.omega0 * p.omega0)).exp()
}

/// Γ(Δ)/Δ = 4g²γ_c/ω0³ + γ_q/ε.
fn rate_per_gap(p: &ModelParams, b: &BathParams) -> f64 {
    4.0 * p.g * p.g * b.gamma_c / p.omega0.powi(3) + b.gamma_q / p.epsilon
}

fn require_ohmic(b: &BathParams) -> Result<()> {
    if b.is_ohmic() {
        Ok(())
    } else {
        Err(Error::NonOhmicBath)
    }
}

/// Γ(Δ) = Δ (4g²γ_c/ω0³ + γ_q/ε).
pub fn adiabatic_rate(p: &ModelParams, b: &BathParams) -> Result<f64> {
    require_ohmic(b)?;
    Ok(adiabatic_gap(p) * rate_per_gap(p, b))
}

/// 2 n_B(Δ) + 1 at temperature `temp`.
pub fn thermal_factor(p: &ModelParams, temp: f64) -> Result<f64> {
    if !(temp >= 0.0) {
        return Err(invalid("temp", format!("must be >= 0, got {temp}")));
    }
    Ok(2.0 * bose_occupation(adiabatic_gap(p), temp)? + 1.0)
}

/// Bracket shared by |ψ| and zJc: 1 + c²(Γ/2Δ)² with c = 2n_B + 1.
fn dissipative_correction(p: &ModelParams, b: &BathParams, c: f64) -> f64 {
    let r = 0.5 * rate_per_gap(p, b);
    1.0 + c * c * r * r
}

/// |ψ| = ω0/(2√2 g zJ) · sqrt(4g²zJΔ/(cω0²) − Δ² − (cΓ)²/4), or 0 when the
/// radicand is not positive.
pub fn psi_closed_form(p: &ModelParams, zj: f64, b: &BathParams, temp: f64) -> Result<f64> {
    require_ohmic(b)?;
    let c = thermal_factor(p, temp)?;
    if zj <= 0.0 || p.g == 0.0 || !c.is_finite() {
        return Ok(0.0);
    }
    let delta = adiabatic_gap(p);
    let k = 4.0 * p.g * p.g * zj / (p.omega0 * p.omega0);
    // Factor Δ out so the cancellation near onset keeps relative precision.
    let radicand = delta * (k / c - delta * dissipative_correction(p, b, c));
    if !(radicand > 0.0) {
        return Ok(0.0);
    }
    Ok(p.omega0 / (2.0 * std::f64::consts::SQRT_2 * p.g * zj) * radicand.sqrt())
}

/// zJc = (ω0²Δ/4g²) c {1 + c² (2g²γ_c/ω0³ + γ_q/2ε)²}.
pub fn critical_zj(p: &ModelParams, b: &BathParams, temp: f64) -> Result<f64> {
    require_ohmic(b)?;
    let c = thermal_factor(p, temp)?;
    if p.g == 0.0 {
        return Ok(f64::INFINITY);
    }
    let delta = adiabatic_gap(p);
    Ok(p.omega0 * p.omega0 * delta / (4.0 * p.g * p.g) * c * dissipative_correction(p, b, c))
}

/// Local-LME estimate J_crit ≈ [γ_c² g²/ω0³ + ω0³/(16 g²)] / d.
pub fn lme_boundary(p: &ModelParams, b: &BathParams, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(invalid("d", "lattice dimension must be >= 1"));
    }
    if !(p.g > 0.0) {
        return Err(invalid("g", "LME boundary diverges at g = 0"));
    }
    let w3 = p.omega0.powi(3);
    let g2 = p.g * p.g;
    Ok((b.gamma_c * b.gamma_c * g2 / w3 + w3 / (16.0 * g2)) / d as f64)
}

/// Coupling g* = sqrt(ω0³/(4γ_c)) minimizing [`lme_boundary`]; the minimum is γ_c/(2d).
pub fn lme_optimal_g(omega0: f64, b: &BathParams) -> Option<f64> {
    (b.gamma_c > 0.0).then(|| (omega0.powi(3) / (4.0 * b.gamma_c)).sqrt())
}

/// Parameters of the reduced two-level DME.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelReduction {
    /// Δ, units of ω0.
    pub delta: f64,
    /// Γ(Δ).
    pub gamma_delta: f64,
    /// α = g/ω0.
    pub alpha: f64,
}

impl TwoLevelReduction {
    pub fn new(p: &ModelParams, b: &BathParams) -> Result<Self> {
        p.validate()?;
        b.validate()?;
        Ok(Self {
            delta: adiabatic_gap(p),
            gamma_delta: adiabatic_rate(p, b)?,
            alpha: p.g / p.omega0,
        })
    }

    /// β_ψ = −2α² zJ (ρ01 + ρ10) = −4α² zJ Re ρ10.
    pub fn beta(&self, zj: f64, re_rho10: f64) -> f64 {
        -4.0 * self.alpha * self.alpha * zj * re_rho10
    }

    /// ψ = α (ρ01 + ρ10) = 2α Re ρ10.
    pub fn psi(&self, re_rho10: f64) -> f64 {
        2.0 * self.alpha * re_rho10
    }

    /// Inverse of [`Self::psi`].
    pub fn re_rho10(&self, psi: f64) -> f64 {
        if self.alpha == 0.0 {
            0.0
        } else {
            psi / (2.0 * self.alpha)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelState {
    pub rho00: f64,
    pub rho10: Complex64,
}

impl TwoLevelState {
    fn to_vec(self) -> Vector3<f64> {
        Vector3::new(self.rho10.re, self.rho10.im, self.rho00)
    }

    fn from_vec(v: &Vector3<f64>) -> Self {
        Self {
            rho00: v[2],
            rho10: Complex64::new(v[0], v[1]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TwoLevelTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<TwoLevelState>,
    /// State at the end of the horizon.
    pub late_time: TwoLevelState,
    /// Newton-refined stationary point nearest the late-time state, if found.
    pub fixed_point: Option<TwoLevelState>,
    /// ψ = 2α Re ρ10 at the fixed point (late-time state if none).
    pub psi: f64,
    /// |dρ/dt| at the late-time state.
    pub late_time_drift: f64,
}

/// Right-hand side in (Re ρ10, Im ρ10, ρ00) with c = 2n_B + 1:
///   d(Re ρ10)/dt = −(cΓ/2) Re ρ10 + Δ Im ρ10
///   d(Im ρ10)/dt = −β(2ρ00 − 1) − (cΓ/2) Im ρ10 − Δ Re ρ10
///   dρ00/dt     = 2β Im ρ10 + (Γ/2)(1 − c(2ρ00 − 1))
struct Reduced {
    red: TwoLevelReduction,
    zj: f64,
    c: f64,
}

impl Reduced {
    fn rhs(&self, u: &Vector3<f64>) -> Vector3<f64> {
        let TwoLevelReduction {
            delta,
            gamma_delta: g,
            ..
        } = self.red;
        let (x, y, p0) = (u[0], u[1], u[2]);
        let beta = self.red.beta(self.zj, x);
        let w = 2.0 * p0 - 1.0;
        Vector3::new(
            -0.5 * self.c * g * x + delta * y,
            -beta * w - 0.5 * self.c * g * y - delta * x,
            2.0 * beta * y + 0.5 * g * (1.0 - self.c * w),
        )
    }

    fn jacobian(&self, u: &Vector3<f64>) -> Matrix3<f64> {
        let TwoLevelReduction {
            delta,
            gamma_delta: g,
            alpha,
        } = self.red;
        let k = 4.0 * alpha * alpha * self.zj;
        let (x, y, p0) = (u[0], u[1], u[2]);
        let h = 0.5 * self.c * g;
        Matrix3::new(
            -h,
            delta,
            0.0,
            k * (2.0 * p0 - 1.0) - delta,
            -h,
            2.0 * k * x,
            -2.0 * k * y,
            -2.0 * k * x,
            -self.c * g,
        )
    }
}

impl System<f64, Vector3<f64>> for Reduced {
    fn system(&self, _t: f64, y: &Vector3<f64>, dy: &mut Vector3<f64>) {
        *dy = self.rhs(y);
    }
}

const ODE_RTOL: f64 = 1e-10;
const ODE_ATOL: f64 = 1e-13;
const MAX_STEPS: u32 = 200_000_000;

/// Integrates the reduced DME from ρ00 = 1, ρ10 = ψ0/(2α) over `[0, horizon]`,
/// recording `samples` evenly spaced states.
pub fn two_level_dynamics(
    red: &TwoLevelReduction,
    zj: f64,
    temp: f64,
    psi0: f64,
    horizon: f64,
    samples: usize,
) -> Result<TwoLevelTrajectory> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid("horizon", "must be finite and > 0"));
    }
    if !(temp >= 0.0) {
        return Err(invalid("temp", format!("must be >= 0, got {temp}")));
    }
    let c = 2.0 * bose_occupation(red.delta, temp)? + 1.0;
    let sys = Reduced { red: *red, zj, c };
    let y0 = Vector3::new(red.re_rho10(psi0), 0.0, 1.0);
    let segments = samples.max(1);
    let dt = horizon / segments as f64;

    let mut times = vec![0.0];
    let mut ys = vec![y0];
    let mut y = y0;
    // One stepper per output interval: only the segment end points are kept.
    for i in 0..segments {
        let t0 = i as f64 * dt;
        let t1 = if i + 1 == segments { horizon } else { t0 + dt };
        y = integrate_segment(Reduced { red: *red, zj, c }, t0, t1, y)?;
        times.push(t1);
        ys.push(y);
    }
    let last = y;
    let late_time = TwoLevelState::from_vec(&last);
    let late_time_drift = sys.rhs(&last).norm();
    let fixed_point = newton(&sys, last).map(|v| TwoLevelState::from_vec(&v));
    let psi = red.psi(fixed_point.unwrap_or(late_time).rho10.re);
    Ok(TwoLevelTrajectory {
        times,
        states: ys.iter().map(TwoLevelState::from_vec).collect(),
        late_time,
        fixed_point,
        psi,
        late_time_drift,
    })
}

fn integrate_segment(f: Reduced, t0: f64, t1: f64, y0: Vector3<f64>) -> Result<Vector3<f64>> {
    use ode_solvers::dop_shared::IntegrationError as E;
    // Sparse output: the dense-output end sample is unreliable in ode_solvers 0.6.
    let mut stepper = Dopri5::from_param(
        f,
        t0,
        t1,
        0.0,
        y0,
        ODE_RTOL,
        ODE_ATOL,
        0.9,
        0.04,
        0.2,
        10.0,
        t1 - t0,
        0.0,
        MAX_STEPS,
        u32::MAX,
        ode_solvers::OutputType::Sparse,
    );
    stepper.integrate().map_err(|e| Error::StepSizeFailure {
        t: match e {
            E::MaxNumStepReached { x, .. }
            | E::StepSizeUnderflow { x }
            | E::StiffnessDetected { x } => x,
        },
    })?;
    Ok(*stepper
        .y_out()
        .last()
        .expect("sparse output holds the end point"))
}

/// Stationary point of the reduced system nearest `guess`.
pub fn two_level_fixed_point(
    red: &TwoLevelReduction,
    zj: f64,
    temp: f64,
    guess: TwoLevelState,
) -> Result<Option<TwoLevelState>> {
    let c = 2.0 * bose_occupation(red.delta, temp)? + 1.0;
    let sys = Reduced { red: *red, zj, c };
    Ok(newton(&sys, guess.to_vec()).map(|v| TwoLevelState::from_vec(&v)))
}

fn newton(sys: &Reduced, mut u: Vector3<f64>) -> Option<Vector3<f64>> {
    for _ in 0..100 {
        let step = sys.jacobian(&u).lu().solve(&sys.rhs(&u))?;
        u -= step;
        if !u.iter().all(|x| x.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * u.norm().max(1e-300) {
            break;
        }
    }
    (sys.rhs(&u).norm() <= 1e-14 * sys.red.delta.max(sys.red.gamma_delta)).then_some(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig1(g: f64) -> (ModelParams, BathParams) {
        (
            ModelParams::new(1.0, g, 3),
            BathParams::ohmic(1e-4, 1e-4, 0.0),
        )
    }

    #[test]
    fn gap_values() {
        assert_eq!(adiabatic_gap(&ModelParams::new(1.0, 0.0, 3)), 1.0);
        assert_relative_eq!(
            adiabatic_gap(&ModelParams::new(1.0, 1.0, 3)),
            0.135335,
            max_relative = 1e-5
        );
        assert_relative_eq!(
            adiabatic_gap(&ModelParams::new(1.0, 2.0, 3)),
            3.3546e-4,
            max_relative = 1e-4
        );
    }

    #[test]
    fn rate_values() {
        let (p, b) = fig1(1.5);
        assert_relative_eq!(
            adiabatic_rate(&p, &b).unwrap(),
            1.1109e-5,
            max_relative = 1e-4
        );
        assert_eq!(
            adiabatic_rate(&p, &BathParams::ohmic(0.0, 0.0, 0.0)).unwrap(),
            0.0
        );
        let only_q = BathParams::ohmic(3e-4, 0.0, 0.0);
        assert_relative_eq!(
            adiabatic_rate(&p, &only_q).unwrap(),
            adiabatic_gap(&p) * 3e-4 / p.epsilon
        );
        let mut sup = b;
        sup.spectrum_kind = crate::dissipation::SpectralKind::SuperOhmic { s: 3.0 };
        assert!(matches!(adiabatic_rate(&p, &sup), Err(Error::NonOhmicBath)));
    }

    #[test]
    fn critical_values() {
        let (p, b) = fig1(1.5);
        assert_relative_eq!(
            critical_zj(&p, &b, 0.0).unwrap(),
            1.2343e-3,
            max_relative = 1e-4
        );
        let c = thermal_factor(&p, 0.05).unwrap();
        assert_relative_eq!(c, 9.04, max_relative = 2e-3);
        assert_relative_eq!(
            critical_zj(&p, &b, 0.05).unwrap(),
            1.116e-2,
            max_relative = 2e-3
        );
        let none = BathParams::ohmic(0.0, 0.0, 0.0);
        let bare = p.omega0 * p.omega0 * adiabatic_gap(&p) / (4.0 * p.g * p.g);
        assert_eq!(critical_zj(&p, &none, 0.0).unwrap(), bare);
    }

    #[test]
    fn psi_values() {
        let (p, b) = fig1(1.5);
        assert_relative_eq!(
            psi_closed_form(&p, 1.5e-3, &b, 0.0).unwrap(),
            0.810,
            max_relative = 2e-3
        );
        assert_eq!(psi_closed_form(&p, 1e-4, &b, 0.0).unwrap(), 0.0);
        let zjc = critical_zj(&p, &b, 0.0).unwrap();
        assert!(psi_closed_form(&p, zjc, &b, 0.0).unwrap() < 1e-6);
    }

    #[test]
    fn lme_values() {
        let b = BathParams::ohmic(1e-4, 1e-4, 0.0);
        let g = lme_optimal_g(1.0, &b).unwrap();
        let min = lme_boundary(&ModelParams::new(1.0, g, 3), &b, 3).unwrap();
        assert_relative_eq!(min, 1e-4 / 6.0, max_relative = 1e-12);
        assert!(lme_boundary(&ModelParams::new(1.0, 0.0, 3), &b, 3).is_err());
        let big = lme_boundary(&ModelParams::new(1.0, 1e4, 3), &b, 3).unwrap();
        assert!(big > 100.0 * min);
    }

    #[test]
    fn pure_decay_without_drive() {
        let (p, b) = fig1(1.5);
        let red = TwoLevelReduction::new(&p, &b).unwrap();
        let horizon = 2.0 / red.gamma_delta;
        let psi0 = 0.2;
        let tr = two_level_dynamics(&red, 0.0, 0.0, psi0, horizon, 10).unwrap();
        let end = tr.late_time;
        assert!((end.rho00 - 1.0).abs() < 1e-12);
        let expected = red.re_rho10(psi0) * (-0.5 * red.gamma_delta * horizon).exp();
        assert_relative_eq!(end.rho10.norm(), expected, max_relative = 1e-6);
    }

    #[test]
    fn ode_fixed_point_matches_closed_form() {
        let (p, b) = fig1(1.5);
        let red = TwoLevelReduction::new(&p, &b).unwrap();
        let zj = 1.5 * critical_zj(&p, &b, 0.0).unwrap();
        let tr = two_level_dynamics(&red, zj, 0.0, 0.1, 60.0 / red.gamma_delta, 200).unwrap();
        let closed = psi_closed_form(&p, zj, &b, 0.0).unwrap();
        assert!((red.psi(tr.late_time.rho10.re).abs() - closed).abs() < 1e-4);
        let fp = tr.fixed_point.expect("newton converges");
        assert!((red.psi(fp.rho10.re).abs() - closed).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_satisfies_steady_relations() {
        let (p, b) = fig1(1.4);
        let temp = 0.02;
        let red = TwoLevelReduction::new(&p, &b).unwrap();
        let n = bose_occupation(red.delta, temp).unwrap();
        let zj = 2.0 * critical_zj(&p, &b, temp).unwrap();
        let psi = psi_closed_form(&p, zj, &b, temp).unwrap();
        let guess = TwoLevelState {
            rho00: 0.5,
            rho10: Complex64::new(red.re_rho10(psi), 0.0),
        };
        let fp = two_level_fixed_point(&red, zj, temp, guess)
            .unwrap()
            .unwrap();
        let (x, y) = (fp.rho10.re, fp.rho10.im);
        let gm = red.gamma_delta;
        assert!((y - gm * (n + 0.5) * x / red.delta).abs() < 1e-8);
        let beta = red.beta(zj, x);
        let rhs = (gm * gm * (n + 0.5).powi(2) / red.delta + red.delta) * x / beta;
        assert!(((1.0 - 2.0 * fp.rho00) - rhs).abs() < 1e-8);
        assert_relative_eq!(red.psi(x).abs(), psi, max_relative = 1e-9);
    }

    #[test]
    fn invalid_horizon_rejected() {
        let (p, b) = fig1(1.5);
        let red = TwoLevelReduction::new(&p, &b).unwrap();
        assert!(two_level_dynamics(&red, 1e-3, 0.0, 0.1, 0.0, 10).is_err());
    }
}

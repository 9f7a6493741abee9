// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Takes several minutes on a single core.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rabi_hubbard::analytic::{
    adiabatic_gap, critical_zj, lme_boundary, lme_optimal_g, psi_closed_form, thermal_factor,
    two_level_dynamics, TwoLevelReduction,
};
use rabi_hubbard::dissipation::{bose_occupation, dme_rates, dme_steady_state, BathParams};
use rabi_hubbard::meanfield::{meanfield_map, solve_fixed_point, SolverOptions};
use rabi_hubbard::operators::{
    build_meanfield_hamiltonian, build_rabi_hamiltonian, diagonalize, ModelParams, Spectrum,
};
use rabi_hubbard::sweep::{run_sweep, Axis, PhaseDiagram, SweepSpec, Truncation};

const GAMMA: f64 = 1e-4;

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        println!(
            "criterion {id} [{}] {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed += 1;
        }
    }
}

fn fig_bath(temp: f64) -> BathParams {
    BathParams::ohmic(GAMMA, GAMMA, temp)
}

/// Axes for the boundary criteria: the g window of interest at 60 × 60, with a
/// zJ range wide enough to contain the boundary at both temperatures.
fn boundary_spec(temp: f64, truncation: Truncation) -> SweepSpec {
    SweepSpec {
        g_axis: Axis::linear(1.2, 2.0, 60),
        zj_axis: Axis::log(1e-5, 1e-1, 60),
        truncation,
        ..SweepSpec::figure_default(fig_bath(temp))
    }
}

struct RandomPoint {
    p: ModelParams,
    zj: f64,
    psi: Complex64,
    gamma_q: f64,
    gamma_c: f64,
    temp: f64,
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<RandomPoint> {
    (0..n)
        .map(|_| RandomPoint {
            p: ModelParams::new(rng.random_range(0.5..1.5), rng.random_range(0.0..2.0), 3),
            zj: rng.random_range(0.0..0.1),
            psi: Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3)),
            gamma_q: 10f64.powf(rng.random_range(-5.0..-3.0)),
            gamma_c: 10f64.powf(rng.random_range(-5.0..-3.0)),
            temp: rng.random_range(0.02..0.5),
        })
        .collect()
}

fn spectrum(pt: &RandomPoint) -> Spectrum {
    diagonalize(&build_meanfield_hamiltonian(&pt.p, pt.zj, pt.psi).unwrap()).unwrap()
}

fn criterion_1_2(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(20260101);
    let points = random_points(&mut rng, 20);
    let mut worst_gibbs = 0.0f64;
    let mut worst_ground = 1.0f64;
    for pt in &points {
        let s = spectrum(pt);
        let bath = BathParams::ohmic(pt.gamma_q, pt.gamma_c, pt.temp);
        let pop = dme_steady_state(&dme_rates(&s, &pt.p, &bath).unwrap())
            .unwrap()
            .populations;
        let e0 = s.ground_energy();
        let w: Vec<f64> = s
            .energies
            .iter()
            .map(|e| (-(e - e0) / pt.temp).exp())
            .collect();
        let z: f64 = w.iter().sum();
        for (p, w) in pop.iter().zip(&w) {
            worst_gibbs = worst_gibbs.max((p - w / z).abs());
        }

        let cold = BathParams::ohmic(pt.gamma_q, pt.gamma_c, 0.0);
        let pop0 = dme_steady_state(&dme_rates(&s, &pt.p, &cold).unwrap())
            .unwrap()
            .populations;
        worst_ground = worst_ground.min(pop0[0]);
    }
    r.check(
        1,
        "Gibbs populations at equal bath temperatures",
        worst_gibbs <= 1e-10,
        format!("max |P - Boltzmann| = {worst_gibbs:.3e} over 20 sets (tol 1e-10)"),
    );
    r.check(
        2,
        "zero-temperature collapse to the ground state",
        worst_ground > 1.0 - 1e-10,
        format!("min P0 = 1 - {:.3e} (need > 1 - 1e-10)", 1.0 - worst_ground),
    );
}

fn criterion_3(r: &mut Report) {
    let mut ok = true;
    let mut parts = Vec::new();
    for g in [1.2, 1.5, 2.0] {
        let p = ModelParams::new(1.0, g, 3);
        let gap = diagonalize(&build_rabi_hamiltonian(&p).unwrap())
            .unwrap()
            .first_gap();
        let gap2 = diagonalize(&build_rabi_hamiltonian(&p.doubled()).unwrap())
            .unwrap()
            .first_gap();
        let rel = (adiabatic_gap(&p) - gap).abs() / gap;
        let stable = (gap2 - gap).abs() <= 1e-9 * gap;
        ok &= rel <= 0.10 && stable;
        parts.push(format!(
            "g={g}: rel {rel:.4}{}",
            if stable { "" } else { " (cutoff unstable)" }
        ));
    }
    r.check(
        3,
        "adiabatic gap vs exact diagonalization",
        ok,
        parts.join(", ") + " (tol 0.10)",
    );
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

fn criterion_4(r: &mut Report, d: &PhaseDiagram) {
    let mut worst = 0.0f64;
    let mut missing = 0;
    let mut numeric = Vec::new();
    for (gi, &g) in d.g_values.iter().enumerate() {
        if !(1.2..=2.0).contains(&g) {
            continue;
        }
        match (d.boundary_numeric[gi], d.boundary_analytic[gi]) {
            (Some(n), Some(a)) => {
                worst = worst.max(rel_dev(n, a));
                numeric.push(n);
            }
            _ => missing += 1,
        }
    }
    let monotone = numeric.windows(2).all(|w| w[1] < w[0]);
    r.check(
        4,
        "zero-temperature boundary vs analytic zJc",
        missing == 0 && worst <= 0.15 && monotone && d.metadata.unconverged == 0,
        format!(
            "{} rows, worst rel dev {worst:.4} (tol 0.15), monotone decreasing: {monotone}, missing: {missing}, unconverged cells: {}",
            numeric.len(),
            d.metadata.unconverged
        ),
    );
}

fn criterion_5(r: &mut Report, cold: &PhaseDiagram, warm: &PhaseDiagram) {
    let mut both = 0;
    let mut violations = 0;
    for gi in 0..cold.g_values.len() {
        if let (Some(c), Some(w)) = (cold.boundary_numeric[gi], warm.boundary_numeric[gi]) {
            both += 1;
            if w <= c {
                violations += 1;
            }
        }
    }

    let p = ModelParams::new(1.0, 1.5, 3);
    let b = fig_bath(0.0);
    let ratio = critical_zj(&p, &b, 0.05).unwrap() / critical_zj(&p, &b, 0.0).unwrap();
    // Independent evaluation: c {1 + c² r²} / {1 + r²}, r = Γ/2Δ, c = 2 n_B(Δ) + 1.
    let delta = (-4.5f64).exp();
    let c = 2.0 * bose_occupation(delta, 0.05).unwrap() + 1.0;
    let rr = 0.5 * (4.0 * 2.25 * GAMMA + GAMMA);
    let direct = c * (1.0 + c * c * rr * rr) / (1.0 + rr * rr);
    let analytic_ok =
        rel_dev(ratio, direct) <= 1e-6 && rel_dev(thermal_factor(&p, 0.05).unwrap(), c) <= 1e-12;

    // Dedicated rows at g = 1.5 for the numeric ratio.
    let row = |temp: f64| {
        let spec = SweepSpec {
            g_axis: Axis::linear(1.5, 1.6, 2),
            ..boundary_spec(temp, Truncation::Rule)
        };
        run_sweep(&spec).unwrap().boundary_numeric[0]
    };
    let numeric_ratio = match (row(0.0), row(0.05)) {
        (Some(c0), Some(c1)) => c1 / c0,
        _ => f64::NAN,
    };
    let numeric_ok = rel_dev(numeric_ratio, c) <= 0.25;

    r.check(
        5,
        "finite-temperature shift of the boundary",
        both > 0 && violations == 0 && analytic_ok && numeric_ok,
        format!(
            "T=0.05 above T=0 at {}/{both} rows; analytic zJc(T)/zJc(0) = {ratio:.6} vs direct {direct:.6} \
             (2n_B+1 = {c:.4}); numeric ratio at g=1.5 = {numeric_ratio:.4} (rel dev {:.3}, tol 0.25)",
            both - violations,
            rel_dev(numeric_ratio, c)
        ),
    );
}

fn criterion_6(r: &mut Report) {
    let d = 3;
    let b = fig_bath(0.0);
    let target = GAMMA / (2.0 * d as f64);
    let g_star = lme_optimal_g(1.0, &b).unwrap();
    let at_star = lme_boundary(&ModelParams::new(1.0, g_star, 3), &b, d).unwrap();
    let scan_min = (0..=20_000)
        .map(|i| g_star * (0.5 + i as f64 / 20_000.0))
        .map(|g| lme_boundary(&ModelParams::new(1.0, g, 3), &b, d).unwrap())
        .fold(f64::INFINITY, f64::min);
    let min_ok = rel_dev(at_star, target) <= 1e-12 && scan_min >= target * (1.0 - 1e-12);

    let spec = SweepSpec {
        g_axis: Axis::linear(2.0, 2.5, 6),
        zj_axis: Axis::log(1e-8, 1e-1, 60),
        ..SweepSpec::figure_default(b)
    };
    let diagram = run_sweep(&spec).unwrap();
    let mut below = 0;
    let mut worst_ratio = 0.0f64;
    for gi in 0..diagram.g_values.len() {
        if let (Some(n), Some(l)) = (diagram.boundary_numeric[gi], diagram.boundary_lme[gi]) {
            if n < l {
                below += 1;
            }
            worst_ratio = worst_ratio.max(n / l);
        }
    }
    r.check(
        6,
        "LME minimum and DME-below-LME for g >= 2",
        min_ok && below == diagram.g_values.len(),
        format!(
            "min J_crit = {at_star:.6e} vs gamma_c/2d = {target:.6e} (rel {:.1e}); DME below LME at {below}/{} rows (max ratio {worst_ratio:.2e})",
            rel_dev(at_star, target),
            diagram.g_values.len()
        ),
    );
}

fn criterion_7(r: &mut Report) {
    let p = ModelParams::new(1.0, 1.5, 3);
    let b = fig_bath(0.0);
    let zj = 1.5e-3;
    let closed = psi_closed_form(&p, zj, &b, 0.0).unwrap();
    let red = TwoLevelReduction::new(&p, &b).unwrap();
    let traj = two_level_dynamics(&red, zj, 0.0, 0.1, 80.0 / red.gamma_delta, 100).unwrap();
    let ode_late = red.psi(traj.late_time.rho10.re).abs();
    let ode_fp = traj.psi.abs();
    let num = solve_fixed_point(
        &p,
        zj,
        &b,
        Complex64::new(1.0, 0.0),
        &SolverOptions::default(),
    )
    .unwrap();
    let ode_ok = (ode_fp - closed).abs() <= 1e-4 && (ode_late - closed).abs() <= 1e-4;
    let num_ok = num.converged && rel_dev(num.abs_psi, closed) <= 0.20;
    r.check(
        7,
        "closed form / two-level ODE / full numeric",
        ode_ok && num_ok,
        format!(
            "closed {closed:.6}, ODE late-time {ode_late:.6}, ODE fixed point {ode_fp:.6} (tol 1e-4); numeric {:.6} (rel dev {:.3}, tol 0.20)",
            num.abs_psi,
            rel_dev(num.abs_psi, closed)
        ),
    );
}

fn criterion_8(r: &mut Report) {
    let spec = SweepSpec {
        g_axis: Axis::linear(1.2, 2.0, 12),
        zj_axis: Axis::log(1e-5, 1e-1, 16),
        ..SweepSpec::figure_default(fig_bath(0.0))
    };
    let runs: Vec<PhaseDiagram> = [1, 3, 8]
        .iter()
        .map(|&w| {
            run_sweep(&SweepSpec {
                workers: w,
                ..spec.clone()
            })
            .unwrap()
        })
        .collect();
    let bits = |d: &PhaseDiagram| -> Vec<(u64, bool, usize)> {
        d.cells
            .iter()
            .map(|c| (c.abs_psi.to_bits(), c.converged, c.iterations))
            .collect()
    };
    let identical = runs
        .windows(2)
        .all(|w| bits(&w[0]) == bits(&w[1]) && w[0].boundary_numeric == w[1].boundary_numeric);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for pt in random_points(&mut rng, 10) {
        let b = BathParams::ohmic(
            pt.gamma_q,
            pt.gamma_c,
            if rng.random_bool(0.5) { 0.0 } else { pt.temp },
        );
        let plus = meanfield_map(&pt.p, pt.zj, &b, pt.psi, Default::default())
            .unwrap()
            .psi_out;
        let minus = meanfield_map(&pt.p, pt.zj, &b, -pt.psi, Default::default())
            .unwrap()
            .psi_out;
        worst = worst.max((plus.norm() - minus.norm()).abs());
    }
    r.check(
        8,
        "determinism across workers and Z2 symmetry of F",
        identical && worst <= 1e-10,
        format!("grids bitwise identical for workers 1/3/8: {identical}; max ||F(psi)| - |F(-psi)|| = {worst:.2e} (tol 1e-10)"),
    );
}

fn criterion_9(r: &mut Report, base: &PhaseDiagram, doubled: &PhaseDiagram) {
    let worst = base
        .cells
        .iter()
        .zip(&doubled.cells)
        .map(|(a, b)| (a.abs_psi - b.abs_psi).abs())
        .fold(0.0f64, f64::max);
    r.check(
        9,
        "truncation robustness under doubled Fock cutoff",
        worst < 1e-6 && doubled.metadata.unconverged == 0,
        format!(
            "max |delta |psi|| = {worst:.3e} over {} cells (tol 1e-6)",
            base.cells.len()
        ),
    );
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut r = Report { failed: 0 };
    criterion_1_2(&mut r);
    criterion_3(&mut r);
    let cold = run_sweep(&boundary_spec(0.0, Truncation::Rule)).unwrap();
    criterion_4(&mut r, &cold);
    let warm = run_sweep(&boundary_spec(0.05, Truncation::Rule)).unwrap();
    criterion_5(&mut r, &cold, &warm);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    let doubled = run_sweep(&boundary_spec(0.0, Truncation::DoubledRule)).unwrap();
    criterion_9(&mut r, &cold, &doubled);
    println!(
        "acceptance: {} of 9 criteria passed in {:.0} s",
        9 - r.failed,
        start.elapsed().as_secs_f64()
    );
    if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

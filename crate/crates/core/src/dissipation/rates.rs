// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;

use super::bath::{bose_occupation, BathParams, Channel};
use crate::error::Result;
use crate::operators::{ModelParams, Spectrum};

/// Gaps below this are treated as degenerate and use the thermal rate limit.
pub const GAP_FLOOR: f64 = 1e-9;

/// Dressed-state transition rates, summed over both baths.
///
/// Both matrices are indexed `(k, j)` with `k > j` (strictly lower triangle):
/// `down[(k, j)]` is the rate k → j and `up[(k, j)]` the rate j → k.
#[derive(Clone, Debug, PartialEq)]
pub struct RateMatrix {
    pub down: DMatrix<f64>,
    pub up: DMatrix<f64>,
    pub dims: usize,
}

impl RateMatrix {
    pub fn zeros(dims: usize) -> Self {
        Self {
            down: DMatrix::zeros(dims, dims),
            up: DMatrix::zeros(dims, dims),
            dims,
        }
    }

    /// Rate of the transition `from → to`.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        use std::cmp::Ordering::*;
        match from.cmp(&to) {
            Greater => self.down[(from, to)],
            Less => self.up[(to, from)],
            Equal => 0.0,
        }
    }

    /// Total escape rate out of `state`.
    pub fn escape_rate(&self, state: usize) -> f64 {
        (0..self.dims).map(|to| self.rate(state, to)).sum()
    }

    /// Pauli generator W with dP/dt = W P: `W[(to, from)]` off-diagonal,
    /// columns summing to zero.
    pub fn generator(&self) -> DMatrix<f64> {
        let n = self.dims;
        let mut w = DMatrix::from_fn(n, n, |to, from| self.rate(from, to));
        for col in 0..n {
            let out: f64 = (0..n).filter(|&r| r != col).map(|r| w[(r, col)]).sum();
            w[(col, col)] = -out;
        }
        w
    }

    pub fn is_nonnegative(&self) -> bool {
        self.down.iter().chain(self.up.iter()).all(|&r| r >= 0.0)
    }
}

/// DME rates Γ_q^{kj} = G_q(Δ_kj)|⟨φj|σx|φk⟩|² and
/// Γ_c^{kj} = G_c(Δ_kj)|⟨φj|(a+a†)|φk⟩|², thermally weighted by (1 + n_u) down
/// and n_u up. Degenerate pairs use lim G(Δ)n(Δ) in both directions.
pub fn dme_rates(s: &Spectrum, p: &ModelParams, b: &BathParams) -> Result<RateMatrix> {
    p.validate()?;
    b.validate()?;
    let n = s.dim();
    let mut rates = RateMatrix::zeros(n);
    let channels = [(Channel::Qubit, &s.sx_elems), (Channel::Cavity, &s.x_elems)];
    for (ch, elems) in channels {
        if b.strength(ch) == 0.0 {
            continue;
        }
        let temp = b.temperature(ch);
        let limit = b.thermal_rate_limit(ch, p);
        for k in 1..n {
            for j in 0..k {
                let weight = elems[(j, k)].norm_sqr();
                if weight == 0.0 {
                    continue;
                }
                let gap = s.energies[k] - s.energies[j];
                if gap < GAP_FLOOR {
                    rates.down[(k, j)] += limit * weight;
                    rates.up[(k, j)] += limit * weight;
                    continue;
                }
                let gamma = b.spectral_function(ch, p, gap) * weight;
                let occ = bose_occupation(gap, temp)?;
                rates.down[(k, j)] += gamma * (1.0 + occ);
                rates.up[(k, j)] += gamma * occ;
            }
        }
    }
    Ok(rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_meanfield_hamiltonian, build_rabi_hamiltonian, diagonalize};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn no_dissipation_no_rates() {
        let p = ModelParams::new(1.0, 1.0, 3);
        let s = diagonalize(&build_rabi_hamiltonian(&p).unwrap()).unwrap();
        let r = dme_rates(&s, &p, &BathParams::ohmic(0.0, 0.0, 0.3)).unwrap();
        assert!(r.down.iter().chain(r.up.iter()).all(|&x| x == 0.0));
    }

    #[test]
    fn zero_temperature_has_no_upward_rates() {
        let p = ModelParams::new(1.0, 1.2, 3);
        let s =
            diagonalize(&build_meanfield_hamiltonian(&p, 0.01, Complex64::new(0.3, 0.0)).unwrap())
                .unwrap();
        let r = dme_rates(&s, &p, &BathParams::ohmic(1e-4, 1e-4, 0.0)).unwrap();
        assert!(r.up.iter().all(|&x| x == 0.0));
        assert!(r.is_nonnegative());
        assert!(r.down[(1, 0)] > 0.0);
    }

    #[test]
    fn detailed_balance_per_gap() {
        let p = ModelParams::new(1.0, 0.9, 3);
        let s =
            diagonalize(&build_meanfield_hamiltonian(&p, 0.05, Complex64::new(0.2, 0.0)).unwrap())
                .unwrap();
        let t = 0.4;
        let r = dme_rates(&s, &p, &BathParams::ohmic(2e-4, 1e-4, t)).unwrap();
        for k in 1..s.dim() {
            for j in 0..k {
                if r.down[(k, j)] > 0.0 {
                    let gap = s.energies[k] - s.energies[j];
                    assert_relative_eq!(
                        r.up[(k, j)] / r.down[(k, j)],
                        (-gap / t).exp(),
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn lowest_pair_matches_two_level_rate() {
        // Γ(Δ) ≈ Δ (4g²γ_c/ω0³ + γ_q/ε) with |⟨φ0|x|φ1⟩| ≈ 2g and |⟨φ0|σx|φ1⟩| ≈ 1.
        let p = ModelParams::new(1.0, 1.5, 3);
        let s = diagonalize(&build_rabi_hamiltonian(&p).unwrap()).unwrap();
        let r = dme_rates(&s, &p, &BathParams::ohmic(1e-4, 1e-4, 0.0)).unwrap();
        let gap = s.first_gap();
        let two_level = gap * (4.0 * 1.5 * 1.5 * 1e-4 + 1e-4);
        assert_relative_eq!(r.down[(1, 0)], two_level, max_relative = 0.05);
        let analytic = 1.1109e-5;
        assert_relative_eq!(r.down[(1, 0)], analytic, max_relative = 0.10);
    }

    #[test]
    fn forbidden_pair_has_zero_rate() {
        // At ψ = 0 parity forbids transitions between same-parity states.
        let p = ModelParams::new(1.0, 1.0, 3);
        let s = diagonalize(&build_rabi_hamiltonian(&p).unwrap()).unwrap();
        let r = dme_rates(&s, &p, &BathParams::ohmic(1e-4, 1e-4, 0.2)).unwrap();
        let par = crate::operators::basis_ops::parity(p.fock_dim);
        let parity_of = |n: usize| {
            let v = s.states.column(n);
            (v.adjoint() * &par * v)[(0, 0)].re.round()
        };
        let mut checked = 0;
        for k in 1..6 {
            for j in 0..k {
                if parity_of(k) == parity_of(j) {
                    assert!(s.sx_elems[(j, k)].norm() < 1e-10 && s.x_elems[(j, k)].norm() < 1e-10);
                    assert!(r.down[(k, j)] < 1e-20);
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn generator_columns_sum_to_zero() {
        let p = ModelParams::new(1.0, 0.7, 3);
        let s = diagonalize(&build_rabi_hamiltonian(&p).unwrap()).unwrap();
        let r = dme_rates(&s, &p, &BathParams::ohmic(1e-3, 2e-3, 0.3)).unwrap();
        let w = r.generator();
        for col in 0..w.ncols() {
            let sum: f64 = w.column(col).iter().sum();
            assert!(sum.abs() < 1e-15 * w.amax().max(1.0) * 10.0);
        }
    }

    #[test]
    fn degenerate_pairs_use_thermal_limit() {
        // At g = 0 and ε = ω0 the levels |↑,n⟩ and |↓,n+1⟩ are degenerate.
        let p = ModelParams::new(1.0, 0.0, 3).with_fock_dim(4);
        let s = diagonalize(&build_rabi_hamiltonian(&p).unwrap()).unwrap();
        let b = BathParams::ohmic(1e-4, 2e-4, 0.25);
        let r = dme_rates(&s, &p, &b).unwrap();
        for k in 1..s.dim() {
            for j in 0..k {
                if s.energies[k] - s.energies[j] < GAP_FLOOR {
                    assert_eq!(r.up[(k, j)], r.down[(k, j)]);
                }
            }
        }
    }
}

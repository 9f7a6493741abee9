// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense vectorized Liouvillians and their steady states.
//!
//! Row-major vectorization: vec(ρ)[i·d + j] = ρ_ij, so that
//! vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::bath::{bose_occupation, BathParams};
use super::rates::RateMatrix;
use crate::error::{Error, Result};
use crate::operators::{basis_ops, Hamiltonian, ModelParams, Spectrum};

/// Default cap on the Hilbert dimension for superoperator solves.
pub const DEFAULT_DIM_CAP: usize = 70;

/// Relative residual above which a superoperator solve is rejected.
const RESIDUAL_LIMIT: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sparse operator given by its nonzero entries `(row, col, value)`.
type Sparse = Vec<(usize, usize, Complex64)>;

fn sparse(m: &DMatrix<Complex64>) -> Sparse {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if m[(r, c)] != Complex64::new(0.0, 0.0) {
                out.push((r, c, m[(r, c)]));
            }
        }
    }
    out
}

pub struct Superoperator {
    d: usize,
    matrix: DMatrix<Complex64>,
}

impl Superoperator {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            matrix: DMatrix::zeros(d * d, d * d),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.d + j
    }

    /// −i[H, ρ].
    pub fn add_hamiltonian(&mut self, h: &DMatrix<Complex64>) {
        let d = self.d;
        for (i, k, hik) in sparse(h) {
            for j in 0..d {
                let (row, col) = (self.at(i, j), self.at(k, j));
                self.matrix[(row, col)] -= I * hik;
            }
        }
        for (l, j, hlj) in sparse(h) {
            for i in 0..d {
                let (row, col) = (self.at(i, j), self.at(i, l));
                self.matrix[(row, col)] += I * hlj;
            }
        }
    }

    /// rate · (O ρ O† − ½ O†O ρ − ½ ρ O†O).
    pub fn add_dissipator(&mut self, op: &DMatrix<Complex64>, rate: f64) {
        if rate == 0.0 {
            return;
        }
        let d = self.d;
        let o = sparse(op);
        for &(i, k, oik) in &o {
            for &(j, l, ojl) in &o {
                let (row, col) = (self.at(i, j), self.at(k, l));
                self.matrix[(row, col)] += oik * ojl.conj() * rate;
            }
        }
        let m = sparse(&(op.adjoint() * op));
        for &(i, k, mik) in &m {
            for j in 0..d {
                let (row, col) = (self.at(i, j), self.at(k, j));
                self.matrix[(row, col)] -= mik * (0.5 * rate);
            }
        }
        for &(l, j, mlj) in &m {
            for i in 0..d {
                let (row, col) = (self.at(i, j), self.at(i, l));
                self.matrix[(row, col)] -= mlj * (0.5 * rate);
            }
        }
    }

    /// ‖L vec(ρ)‖₂.
    pub fn residual(&self, rho: &DMatrix<Complex64>) -> f64 {
        (&self.matrix * vectorize(rho)).norm()
    }

    /// Unit-trace null vector, found by replacing the ρ_00 equation with the
    /// trace constraint.
    pub fn steady_state(&self) -> Result<(DMatrix<Complex64>, f64)> {
        let d = self.d;
        let mut a = self.matrix.clone();
        for col in 0..d * d {
            a[(0, col)] = Complex64::new(0.0, 0.0);
        }
        for i in 0..d {
            a[(0, self.at(i, i))] = Complex64::new(1.0, 0.0);
        }
        let mut rhs = DVector::<Complex64>::zeros(d * d);
        rhs[0] = Complex64::new(1.0, 0.0);
        let x = a.lu().solve(&rhs).ok_or(Error::SingularSuperoperator {
            residual: f64::INFINITY,
        })?;
        let rho = DMatrix::from_fn(d, d, |i, j| x[i * d + j]);
        let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let residual = self.residual(&rho);
        let scale = self.matrix.camax().max(1.0);
        if !residual.is_finite() || residual > RESIDUAL_LIMIT * scale {
            return Err(Error::SingularSuperoperator { residual });
        }
        Ok((rho, residual))
    }
}

pub fn vectorize(rho: &DMatrix<Complex64>) -> DVector<Complex64> {
    let d = rho.nrows();
    DVector::from_fn(d * d, |k, _| rho[(k / d, k % d)])
}

/// Steady state of a Lindblad equation, with its residual ‖L(ρ)‖.
#[derive(Clone, Debug)]
pub struct LindbladSteadyState {
    pub rho: DMatrix<Complex64>,
    pub residual: f64,
}

impl LindbladSteadyState {
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Complex64 {
        (&self.rho * op).trace()
    }
}

/// Local Lindblad steady state: D[a], D[a†] at γ_c(1 + n_c(ω0)), γ_c n_c(ω0)
/// and D[σ−], D[σ+] at γ_q(1 + n_q(ε)), γ_q n_q(ε).
pub fn lme_steady_state(
    h: &Hamiltonian,
    p: &ModelParams,
    b: &BathParams,
) -> Result<LindbladSteadyState> {
    lme_steady_state_capped(h, p, b, DEFAULT_DIM_CAP)
}

pub fn lme_steady_state_capped(
    h: &Hamiltonian,
    p: &ModelParams,
    b: &BathParams,
    cap: usize,
) -> Result<LindbladSteadyState> {
    p.validate()?;
    b.validate()?;
    let d = h.dim();
    if d > cap {
        return Err(Error::DimensionCap { dim: d, cap });
    }
    if h.fock_dim() != p.fock_dim {
        return Err(Error::BasisMismatch {
            state: d,
            spectrum: p.dim(),
        });
    }
    let nf = p.fock_dim;
    let n_c = bose_occupation(p.omega0, b.temp_c)?;
    let n_q = bose_occupation(p.epsilon, b.temp_q)?;
    let a = basis_ops::annihilation(nf);
    let sm = basis_ops::sigma_minus(nf);

    let mut l = Superoperator::new(d);
    l.add_hamiltonian(h.matrix());
    l.add_dissipator(&a, b.gamma_c * (1.0 + n_c));
    l.add_dissipator(&a.adjoint(), b.gamma_c * n_c);
    l.add_dissipator(&sm, b.gamma_q * (1.0 + n_q));
    l.add_dissipator(&sm.adjoint(), b.gamma_q * n_q);
    let (rho, residual) = l.steady_state()?;
    Ok(LindbladSteadyState { rho, residual })
}

/// Full dressed master equation in the eigenbasis: −i[diag(E), ρ] plus
/// D[|φj⟩⟨φk|] at every rate of `r`. Cross-check for the rate-equation path;
/// the returned ρ is in the eigenbasis.
pub fn dme_liouvillian_steady_state(s: &Spectrum, r: &RateMatrix) -> Result<LindbladSteadyState> {
    let d = s.dim();
    if r.dims != d {
        return Err(Error::BasisMismatch {
            state: r.dims,
            spectrum: d,
        });
    }
    if d > DEFAULT_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: d,
            cap: DEFAULT_DIM_CAP,
        });
    }
    let h = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(s.energies[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut l = Superoperator::new(d);
    l.add_hamiltonian(&h);
    let mut jump = DMatrix::<Complex64>::zeros(d, d);
    for k in 1..d {
        for j in 0..k {
            for (to, from, rate) in [(j, k, r.down[(k, j)]), (k, j, r.up[(k, j)])] {
                if rate > 0.0 {
                    jump[(to, from)] = Complex64::new(1.0, 0.0);
                    l.add_dissipator(&jump, rate);
                    jump[(to, from)] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    let (rho, residual) = l.steady_state()?;
    Ok(LindbladSteadyState { rho, residual })
}

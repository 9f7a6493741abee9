// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated qubit ⊗ Fock Hilbert space, the on-site Rabi Hamiltonian and its
//! mean-field extension, and dense Hermitian diagonalization.
//!
//! Basis layout: a product state `|q⟩ ⊗ |n⟩` lives at index `q * N + n`, with
//! the qubit index slowest. `q = 0` is the σz = +1 (upper) qubit level and
//! `q = 1` is σz = −1. All energies are in units of ω0.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance used when checking Hermiticity of diagonalizer inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// On-site parameters of a mean-field Rabi-Hubbard site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega0: f64,
    pub epsilon: f64,
    pub g: f64,
    /// Coordination number. Only the product zJ enters the mean-field
    /// equations; `z` is carried so J = zJ / z can be reported.
    pub z: u32,
    /// Fock-space truncation N; the full Hilbert space has dimension 2N.
    pub fock_dim: usize,
}

impl ModelParams {
    /// Parameters with ω0 = 1 and the default truncation for `g`.
    pub fn new(epsilon: f64, g: f64, z: u32) -> Self {
        Self {
            omega0: 1.0,
            epsilon,
            g,
            z,
            fock_dim: default_fock_dim(g, 1.0),
        }
    }

    pub fn with_fock_dim(mut self, fock_dim: usize) -> Self {
        self.fock_dim = fock_dim;
        self
    }

    /// Same parameters with `g` replaced and the truncation re-derived.
    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self.fock_dim = default_fock_dim(g, self.omega0);
        self
    }

    /// Same parameters with twice the Fock truncation.
    pub fn doubled(self) -> Self {
        self.with_fock_dim(2 * self.fock_dim)
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_dim
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(invalid(
                "omega0",
                format!("must be > 0, got {}", self.omega0),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid(
                "epsilon",
                format!("must be > 0, got {}", self.epsilon),
            ));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(invalid("g", format!("must be >= 0, got {}", self.g)));
        }
        if self.z < 1 {
            return Err(invalid("z", "coordination number must be >= 1"));
        }
        if self.fock_dim < 2 {
            return Err(invalid(
                "fock_dim",
                format!("must be >= 2, got {}", self.fock_dim),
            ));
        }
        Ok(())
    }

    /// Whether `fock_dim` covers the displaced-oscillator support of the
    /// default truncation rule.
    pub fn is_truncation_adequate(&self) -> bool {
        self.fock_dim >= default_fock_dim(self.g, self.omega0)
    }
}

/// Default truncation N = ceil(α² + 8α + 10) with α = g/ω0.
///
/// The coherent displacement α concentrates photon weight near n ≈ α² with
/// width α; the margin keeps the tail below double precision.
pub fn default_fock_dim(g: f64, omega0: f64) -> usize {
    let alpha = g / omega0;
    (alpha * alpha + 8.0 * alpha + 10.0).ceil() as usize
}

/// A Hermitian matrix on the truncated product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    fock_dim: usize,
    matrix: DMatrix<Complex64>,
}

impl Hamiltonian {
    /// Wrap a square matrix of even dimension 2N.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || n == 0 || !n.is_multiple_of(2) {
            return Err(invalid(
                "matrix",
                format!(
                    "expected square matrix of even dimension, got {}x{}",
                    n,
                    matrix.ncols()
                ),
            ));
        }
        Ok(Self {
            fock_dim: n / 2,
            matrix,
        })
    }

    pub fn from_real(matrix: DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest |H_ij − conj(H_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[inline]
fn idx(fock_dim: usize, q: usize, n: usize) -> usize {
    q * fock_dim + n
}

/// ω0 a†a + (ε/2) σz + g σx (a + a†) on the truncated basis.
pub fn build_rabi_hamiltonian(p: &ModelParams) -> Result<Hamiltonian> {
    p.validate()?;
    let nf = p.fock_dim;
    let dim = 2 * nf;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for q in 0..2 {
        let sz = if q == 0 { 1.0 } else { -1.0 };
        for n in 0..nf {
            h[(idx(nf, q, n), idx(nf, q, n))] = p.omega0 * n as f64 + 0.5 * p.epsilon * sz;
        }
    }
    for n in 0..nf - 1 {
        let c = p.g * ((n + 1) as f64).sqrt();
        for q in 0..2 {
            let (i, j) = (idx(nf, q, n), idx(nf, 1 - q, n + 1));
            h[(i, j)] = c;
            h[(j, i)] = c;
        }
    }
    Hamiltonian::from_real(h)
}

/// H_Rabi − zJ (ψ* a + ψ a†) + zJ |ψ|².
///
/// For real ψ this is exactly −zJψ(a + a†) + zJψ².
pub fn build_meanfield_hamiltonian(
    p: &ModelParams,
    zj: f64,
    psi: Complex64,
) -> Result<Hamiltonian> {
    if !(zj >= 0.0 && zj.is_finite()) {
        return Err(invalid("zj", format!("must be >= 0, got {zj}")));
    }
    if !(psi.re.is_finite() && psi.im.is_finite()) {
        return Err(invalid("psi", "order parameter must be finite"));
    }
    let mut h = build_rabi_hamiltonian(p)?.into_matrix();
    if zj == 0.0 || psi == Complex64::new(0.0, 0.0) {
        return Hamiltonian::from_matrix(h);
    }
    let nf = p.fock_dim;
    let drive = psi * zj;
    let shift = zj * psi.norm_sqr();
    for q in 0..2 {
        for n in 0..nf {
            h[(idx(nf, q, n), idx(nf, q, n))] += shift;
        }
        for n in 0..nf - 1 {
            let s = ((n + 1) as f64).sqrt();
            // ⟨n|a|n+1⟩ = √(n+1) carries ψ*, ⟨n+1|a†|n⟩ carries ψ.
            h[(idx(nf, q, n), idx(nf, q, n + 1))] -= drive.conj() * s;
            h[(idx(nf, q, n + 1), idx(nf, q, n))] -= drive * s;
        }
    }
    Hamiltonian::from_matrix(h)
}

/// Full spectral decomposition of a mean-field Hamiltonian together with the
/// eigenbasis matrix elements the master equation needs.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub fock_dim: usize,
    /// Ascending eigenvalues E_n.
    pub energies: Vec<f64>,
    /// Column n is |φn⟩ in the product basis.
    pub states: DMatrix<Complex64>,
    /// ⟨φj|(a + a†)|φk⟩.
    pub x_elems: DMatrix<Complex64>,
    /// ⟨φj|σx|φk⟩.
    pub sx_elems: DMatrix<Complex64>,
    /// ⟨φn|a|φn⟩.
    pub a_diag: Vec<Complex64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// E_1 − E_0.
    pub fn first_gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    /// Σ_n E_n |φn⟩⟨φn| in the product basis.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, n| {
            self.states[(i, n)] * self.energies[n]
        });
        &scaled * self.states.adjoint()
    }

    /// Weight of eigenvector `n` on Fock levels `m >= from`.
    pub fn fock_tail_weight(&self, n: usize, from: usize) -> f64 {
        let nf = self.fock_dim;
        (0..2)
            .flat_map(|q| (from.min(nf)..nf).map(move |m| idx(nf, q, m)))
            .map(|i| self.states[(i, n)].norm_sqr())
            .sum()
    }
}

/// Diagonalize a Hermitian matrix and evaluate (a + a†), σx and diag(a) in its
/// eigenbasis. Real input takes a real symmetric path.
pub fn diagonalize(h: &Hamiltonian) -> Result<Spectrum> {
    let m = h.matrix();
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Eigensolver("matrix has non-finite entries".into()));
    }
    let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let nf = h.fock_dim();
    if h.is_real() {
        let real = m.map(|z| z.re);
        let eig = real.symmetric_eigen();
        eigen_to_spectrum(nf, eig.eigenvalues, eig.eigenvectors)
    } else {
        let eig = m.clone().symmetric_eigen();
        eigen_to_spectrum(nf, eig.eigenvalues, eig.eigenvectors)
    }
}

fn eigen_to_spectrum<T>(nf: usize, values: DVector<f64>, vectors: DMatrix<T>) -> Result<Spectrum>
where
    T: ComplexField<RealField = f64> + Copy + Into<Complex64>,
{
    let dim = values.len();
    if values.iter().any(|e| !e.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let energies: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut v = DMatrix::<T>::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        // Fix the gauge: the largest-magnitude component is real and positive.
        let src = vectors.column(k);
        let pivot = src
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.modulus().total_cmp(&b.1.modulus()))
            .map(|(_, z)| z)
            .unwrap_or_else(T::one);
        let phase = pivot.conjugate().unscale(pivot.modulus());
        for i in 0..dim {
            v[(i, col)] = src[i] * phase;
        }
    }

    let vh = v.adjoint();
    let x_v = apply_position(nf, &v);
    let sx_v = apply_sigma_x(nf, &v);
    let x_elems = (&vh * &x_v).map(Into::into);
    let sx_elems = (&vh * &sx_v).map(Into::into);
    let a_diag = (0..dim)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..2 {
                for m in 0..nf - 1 {
                    let bra: Complex64 = v[(idx(nf, q, m), n)].into();
                    let ket: Complex64 = v[(idx(nf, q, m + 1), n)].into();
                    acc += bra.conj() * ket * ((m + 1) as f64).sqrt();
                }
            }
            acc
        })
        .collect();

    Ok(Spectrum {
        fock_dim: nf,
        energies,
        states: v.map(Into::into),
        x_elems,
        sx_elems,
        a_diag,
    })
}

/// (a + a†) ⊗ 1 applied to every column.
fn apply_position<T: ComplexField<RealField = f64> + Copy>(
    nf: usize,
    v: &DMatrix<T>,
) -> DMatrix<T> {
    let mut out = DMatrix::<T>::zeros(v.nrows(), v.ncols());
    for col in 0..v.ncols() {
        for q in 0..2 {
            for m in 0..nf {
                let mut acc = T::zero();
                if m > 0 {
                    acc += v[(idx(nf, q, m - 1), col)].scale((m as f64).sqrt());
                }
                if m + 1 < nf {
                    acc += v[(idx(nf, q, m + 1), col)].scale(((m + 1) as f64).sqrt());
                }
                out[(idx(nf, q, m), col)] = acc;
            }
        }
    }
    out
}

/// σx ⊗ 1 applied to every column.
fn apply_sigma_x<T: ComplexField<RealField = f64> + Copy>(nf: usize, v: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::<T>::zeros(v.nrows(), v.ncols());
    for col in 0..v.ncols() {
        for q in 0..2 {
            for m in 0..nf {
                out[(idx(nf, q, m), col)] = v[(idx(nf, 1 - q, m), col)];
            }
        }
    }
    out
}

/// Product-basis matrices of the single-site operators, for tests and the
/// Lindblad solver.
pub mod basis_ops {
    use super::idx;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn zero(nf: usize) -> DMatrix<Complex64> {
        DMatrix::zeros(2 * nf, 2 * nf)
    }

    /// Photon annihilation a ⊗ 1.
    pub fn annihilation(nf: usize) -> DMatrix<Complex64> {
        let mut a = zero(nf);
        for q in 0..2 {
            for n in 0..nf - 1 {
                a[(idx(nf, q, n), idx(nf, q, n + 1))] =
                    Complex64::new(((n + 1) as f64).sqrt(), 0.0);
            }
        }
        a
    }

    pub fn number(nf: usize) -> DMatrix<Complex64> {
        let mut m = zero(nf);
        for q in 0..2 {
            for n in 0..nf {
                m[(idx(nf, q, n), idx(nf, q, n))] = Complex64::new(n as f64, 0.0);
            }
        }
        m
    }

    pub fn sigma_z(nf: usize) -> DMatrix<Complex64> {
        let mut m = zero(nf);
        for n in 0..nf {
            m[(idx(nf, 0, n), idx(nf, 0, n))] = Complex64::new(1.0, 0.0);
            m[(idx(nf, 1, n), idx(nf, 1, n))] = Complex64::new(-1.0, 0.0);
        }
        m
    }

    pub fn sigma_x(nf: usize) -> DMatrix<Complex64> {
        let mut m = zero(nf);
        for n in 0..nf {
            m[(idx(nf, 0, n), idx(nf, 1, n))] = Complex64::new(1.0, 0.0);
            m[(idx(nf, 1, n), idx(nf, 0, n))] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Qubit lowering σ− = |↓⟩⟨↑| ⊗ 1.
    pub fn sigma_minus(nf: usize) -> DMatrix<Complex64> {
        let mut m = zero(nf);
        for n in 0..nf {
            m[(idx(nf, 1, n), idx(nf, 0, n))] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Parity Π = σz ⊗ (−1)^(a†a).
    pub fn parity(nf: usize) -> DMatrix<Complex64> {
        let mut m = zero(nf);
        for q in 0..2 {
            let s = if q == 0 { 1.0 } else { -1.0 };
            for n in 0..nf {
                let sign = if n % 2 == 0 { s } else { -s };
                m[(idx(nf, q, n), idx(nf, q, n))] = Complex64::new(sign, 0.0);
            }
        }
        m
    }
}

// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Stationary solution of the secular (Pauli) rate equation
//! dP_k/dt = Σ_j [W_{k←j} P_j − W_{j←k} P_k].

use nalgebra::DMatrix;
use num_complex::Complex64;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::rates::RateMatrix;
use crate::error::{Error, Result};
use crate::operators::Spectrum;

/// Diagonal steady state in the dressed eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    pub populations: Vec<f64>,
}

impl DensityState {
    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    /// Population concentrated on a single eigenstate.
    pub fn pure(dim: usize, level: usize) -> Self {
        let mut populations = vec![0.0; dim];
        populations[level] = 1.0;
        Self { populations }
    }

    /// ρ = Σ_n P_n |φn⟩⟨φn| in the product basis.
    pub fn density_matrix(&self, s: &Spectrum) -> Result<DMatrix<Complex64>> {
        if self.dim() != s.dim() {
            return Err(Error::BasisMismatch {
                state: self.dim(),
                spectrum: s.dim(),
            });
        }
        let v = &s.states;
        let weighted =
            DMatrix::from_fn(v.nrows(), v.ncols(), |i, n| v[(i, n)] * self.populations[n]);
        Ok(weighted * v.adjoint())
    }
}

/// How the null vector of the rate generator is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NullSpaceMethod {
    /// Grassmann-Taksar-Heyman elimination; subtraction-free.
    #[default]
    Gth,
    /// Right singular vector of the smallest singular value.
    Svd,
}

pub fn dme_steady_state(r: &RateMatrix) -> Result<DensityState> {
    dme_steady_state_with(r, NullSpaceMethod::default())
}

pub fn dme_steady_state_with(r: &RateMatrix, method: NullSpaceMethod) -> Result<DensityState> {
    let closed = closed_classes(r);
    if closed.len() != 1 {
        return Err(Error::DisconnectedRateGraph {
            closed_classes: closed.len(),
            components: closed,
        });
    }
    let populations = match method {
        NullSpaceMethod::Gth => gth(r, closed[0][0]),
        NullSpaceMethod::Svd => svd_null_vector(r)?,
    };
    Ok(DensityState {
        populations: clip_and_normalize(populations),
    })
}

/// Strongly connected components of the rate graph that no transition
/// leaves. A unique stationary distribution exists iff there is exactly one.
pub fn closed_classes(r: &RateMatrix) -> Vec<Vec<usize>> {
    let n = r.dims;
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for from in 0..n {
        for to in 0..n {
            if from != to && r.rate(from, to) > 0.0 {
                graph.add_edge(nodes[from], nodes[to], ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut members: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
            members.sort_unstable();
            members
        })
        .filter(|members| {
            members.iter().all(|&from| {
                (0..n).all(|to| {
                    from == to || r.rate(from, to) == 0.0 || members.binary_search(&to).is_ok()
                })
            })
        })
        .collect();
    classes.sort();
    classes
}

/// GTH elimination with `anchor` (a member of the closed class) kept last.
fn gth(r: &RateMatrix, anchor: usize) -> Vec<f64> {
    let n = r.dims;
    if n == 1 {
        return vec![1.0];
    }
    // Position 0 holds the anchor; the rest keep their relative order.
    let order: Vec<usize> = std::iter::once(anchor)
        .chain((0..n).filter(|&i| i != anchor))
        .collect();
    let mut q = vec![0.0; n * n];
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate() {
            if a != b {
                q[a * n + b] = r.rate(i, j);
            }
        }
    }
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| q[k * n + j]).sum();
        // s > 0 because every remaining state reaches the anchor.
        for i in 0..k {
            q[i * n + k] /= s;
        }
        for i in 0..k {
            let qik = q[i * n + k];
            if qik == 0.0 {
                continue;
            }
            for j in 0..k {
                if i != j {
                    q[i * n + j] += qik * q[k * n + j];
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for j in 1..n {
        pi[j] = (0..j).map(|i| pi[i] * q[i * n + j]).sum();
    }
    let mut out = vec![0.0; n];
    for (a, &i) in order.iter().enumerate() {
        out[i] = pi[a];
    }
    out
}

fn svd_null_vector(r: &RateMatrix) -> Result<Vec<f64>> {
    let w = r.generator();
    let scale = w.amax();
    if scale == 0.0 {
        return Err(Error::DegenerateNullSpace(r.dims));
    }
    let svd = (w / scale).svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Eigensolver("SVD did not return V^T".into()))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));
    let zero_tol = 1e-13 * sv[order[order.len() - 1]];
    let null_dim = order.iter().take_while(|&&i| sv[i] <= zero_tol).count();
    if null_dim > 1 {
        return Err(Error::DegenerateNullSpace(null_dim));
    }
    let row = v_t.row(order[0]);
    let sum: f64 = row.iter().sum();
    Ok(row.iter().map(|x| x / sum).collect())
}

fn clip_and_normalize(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= total;
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

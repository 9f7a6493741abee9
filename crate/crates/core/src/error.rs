// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("negative energy gap {0:.3e}; gaps must be oriented upward")]
    NegativeGap(f64),

    #[error("rate graph has {closed_classes} closed classes; components: {components:?}")]
    DisconnectedRateGraph {
        closed_classes: usize,
        components: Vec<Vec<usize>>,
    },

    #[error("steady-state null space is degenerate (dimension {0})")]
    DegenerateNullSpace(usize),

    #[error("basis mismatch: state has dimension {state}, spectrum has {spectrum}")]
    BasisMismatch { state: usize, spectrum: usize },

    #[error("Hilbert dimension {dim} exceeds the superoperator cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("superoperator solve is singular or ill-conditioned (residual {residual:.3e})")]
    SingularSuperoperator { residual: f64 },

    #[error("operation requires an Ohmic bath")]
    NonOhmicBath,

    #[error("ODE step size underflow at t = {t:.6e}")]
    StepSizeFailure { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

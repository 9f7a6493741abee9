// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Dressed-master-equation rates and steady states, plus the local Lindblad
//! equation used for comparison.

mod bath;
mod liouvillian;
mod pauli;
mod rates;

pub use bath::{bose_occupation, BathParams, Channel, SpectralKind};
pub use liouvillian::{
    dme_liouvillian_steady_state, lme_steady_state, lme_steady_state_capped, vectorize,
    LindbladSteadyState, Superoperator, DEFAULT_DIM_CAP,
};
pub use pauli::{
    closed_classes, dme_steady_state, dme_steady_state_with, DensityState, NullSpaceMethod,
};
pub use rates::{dme_rates, RateMatrix, GAP_FLOOR};

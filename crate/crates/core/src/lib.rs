// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! Mean-field phase diagram of the dissipative Rabi-Hubbard lattice.

// `!(x > 0.0)` is deliberate throughout: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dissipation;
pub mod error;
pub mod meanfield;
pub mod operators;
pub mod sweep;

pub use error::{Error, Result};

// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::operators::ModelParams;

/// Family of the bath spectral function G_u(ω).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralKind {
    /// G(ω) = γ ω/ω_ref · exp(−ω/ω_c).
    Ohmic,
    /// G(ω) = γ (ω/ω_ref)^s · exp(−ω/ω_c), s ≥ 1.
    SuperOhmic { s: f64 },
}

impl SpectralKind {
    pub fn exponent(&self) -> f64 {
        match self {
            SpectralKind::Ohmic => 1.0,
            SpectralKind::SuperOhmic { s } => *s,
        }
    }
}

/// Which of the two local baths a rate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// Qubit bath, coupled through σx, reference frequency ε.
    Qubit,
    /// Cavity bath, coupled through (a + a†), reference frequency ω0.
    Cavity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub gamma_q: f64,
    pub gamma_c: f64,
    pub temp_q: f64,
    pub temp_c: f64,
    pub spectrum_kind: SpectralKind,
    /// Cutoff frequency ω_c; `None` is an infinite cutoff.
    pub cutoff: Option<f64>,
}

impl BathParams {
    /// Ohmic baths with infinite cutoff and a common temperature.
    pub fn ohmic(gamma_q: f64, gamma_c: f64, temp: f64) -> Self {
        Self {
            gamma_q,
            gamma_c,
            temp_q: temp,
            temp_c: temp,
            spectrum_kind: SpectralKind::Ohmic,
            cutoff: None,
        }
    }

    pub fn with_temperature(mut self, temp: f64) -> Self {
        self.temp_q = temp;
        self.temp_c = temp;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_q", self.gamma_q),
            ("gamma_c", self.gamma_c),
            ("temp_q", self.temp_q),
            ("temp_c", self.temp_c),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if let SpectralKind::SuperOhmic { s } = self.spectrum_kind {
            if !(s >= 1.0 && s.is_finite()) {
                return Err(invalid(
                    "spectrum_kind",
                    format!("super-Ohmic exponent must be >= 1, got {s}"),
                ));
            }
        }
        if let Some(wc) = self.cutoff {
            if !(wc > 0.0) {
                return Err(invalid("cutoff", format!("must be > 0, got {wc}")));
            }
        }
        Ok(())
    }

    pub fn is_ohmic(&self) -> bool {
        matches!(self.spectrum_kind, SpectralKind::Ohmic)
    }

    pub fn strength(&self, ch: Channel) -> f64 {
        match ch {
            Channel::Qubit => self.gamma_q,
            Channel::Cavity => self.gamma_c,
        }
    }

    pub fn temperature(&self, ch: Channel) -> f64 {
        match ch {
            Channel::Qubit => self.temp_q,
            Channel::Cavity => self.temp_c,
        }
    }

    fn reference(ch: Channel, p: &ModelParams) -> f64 {
        match ch {
            Channel::Qubit => p.epsilon,
            Channel::Cavity => p.omega0,
        }
    }

    /// Spectral function G_u(ω) for ω ≥ 0.
    pub fn spectral_function(&self, ch: Channel, p: &ModelParams, omega: f64) -> f64 {
        let reference = Self::reference(ch, p);
        let bare = match self.spectrum_kind {
            SpectralKind::Ohmic => self.strength(ch) * omega / reference,
            SpectralKind::SuperOhmic { s } => self.strength(ch) * (omega / reference).powf(s),
        };
        match self.cutoff {
            Some(wc) => bare * (-omega / wc).exp(),
            None => bare,
        }
    }

    /// lim_{ω→0} G_u(ω) n_u(ω): γ T/ω_ref for Ohmic baths, zero for s > 1.
    pub fn thermal_rate_limit(&self, ch: Channel, p: &ModelParams) -> f64 {
        if self.spectrum_kind.exponent() > 1.0 {
            return 0.0;
        }
        self.strength(ch) * self.temperature(ch) / Self::reference(ch, p)
    }
}

/// Bose-Einstein occupation 1/(exp(Δ/T) − 1); zero at T = 0.
pub fn bose_occupation(delta: f64, temp: f64) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::NegativeGap(delta));
    }
    if temp < 0.0 {
        return Err(invalid("temp", format!("must be >= 0, got {temp}")));
    }
    if temp == 0.0 {
        return Ok(0.0);
    }
    if delta == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (delta / temp).exp_m1())
}

// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Classical stationary Gaussian noise models: autocorrelations, spectral
//! densities and sampled realizations.

mod sampling;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

pub use sampling::{
    cell_averages, ou_cell_averages, rng_for, sample_trajectory, NoiseTrajectory, SampleKind,
};
pub use synth::{CellTable, OneOverFSynth, DEFAULT_COMPONENTS, DEFAULT_OFFSET_LEVELS};

/// Default upper cutoff for sampled 1/f noise, in units of the Rabi frequency.
pub const DEFAULT_OMEGA_H_OVER_OMEGA: f64 = 1e3;

fn default_omega_h() -> f64 {
    DEFAULT_OMEGA_H_OVER_OMEGA
}

/// Zero-mean stationary Gaussian noise `η(t)` entering `H = Ω/2 σx + η σz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// `S(t) = σ²`: a random but constant detuning.
    Quasistatic { sigma: f64 },
    /// `S(t) = σ² e^{−|t|/τ_c}`.
    #[serde(alias = "lorentzian")]
    OrnsteinUhlenbeck { sigma: f64, tau_c: f64 },
    /// `S(ω) = 2πσ²/|ω|` for `ω_l < |ω| < ω_h`.
    ///
    /// Analytic (PLME) formulas use `ω_h → ∞`; `omega_h` bounds the sampled
    /// spectrum only.
    OneOverF {
        sigma: f64,
        omega_l: f64,
        #[serde(default = "default_omega_h")]
        omega_h: f64,
    },
    /// `S(t) = D δ(t)`.
    White { diffusion: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        match *self {
            NoiseModel::Quasistatic { sigma } if !finite_nonneg(sigma) => bad(format!("sigma must be finite and ≥ 0, got {sigma}")),
            NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => {
                if !finite_nonneg(sigma) {
                    bad(format!("sigma must be finite and ≥ 0, got {sigma}"))
                } else if !(tau_c > 0.0) || tau_c.is_nan() {
                    bad(format!("tau_c must be > 0, got {tau_c}"))
                } else {
                    Ok(())
                }
            }
            NoiseModel::OneOverF { sigma, omega_l, omega_h } => {
                if !finite_nonneg(sigma) {
                    bad(format!("sigma must be finite and ≥ 0, got {sigma}"))
                } else if !(omega_l > 0.0 && omega_l.is_finite()) {
                    bad(format!("omega_l must be finite and > 0, got {omega_l}"))
                } else if !(omega_h > omega_l) || omega_h.is_nan() {
                    bad(format!("omega_h must exceed omega_l, got {omega_h}"))
                } else {
                    Ok(())
                }
            }
            NoiseModel::White { diffusion } if !finite_nonneg(diffusion) => {
                bad(format!("diffusion must be finite and ≥ 0, got {diffusion}"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Quasistatic { .. } => "quasistatic",
            NoiseModel::OrnsteinUhlenbeck { .. } => "ornstein_uhlenbeck",
            NoiseModel::OneOverF { .. } => "one_over_f",
            NoiseModel::White { .. } => "white",
        }
    }

    /// Amplitude `σ`; zero for white noise, which has no finite variance.
    pub fn sigma(&self) -> f64 {
        match *self {
            NoiseModel::Quasistatic { sigma }
            | NoiseModel::OrnsteinUhlenbeck { sigma, .. }
            | NoiseModel::OneOverF { sigma, .. } => sigma,
            NoiseModel::White { .. } => 0.0,
        }
    }

    /// Copy with the amplitude replaced.
    pub fn with_sigma(&self, s: f64) -> NoiseModel {
        let mut m = *self;
        match &mut m {
            NoiseModel::Quasistatic { sigma }
            | NoiseModel::OrnsteinUhlenbeck { sigma, .. }
            | NoiseModel::OneOverF { sigma, .. } => *sigma = s,
            NoiseModel::White { .. } => {}
        }
        m
    }

    /// `S(t) = ⟨η(t)η(0)⟩`, with the finite 1/f cutoff `omega_h`.
    ///
    /// White noise has no pointwise autocorrelation at `t = 0`.
    pub fn autocorr(&self, t: f64) -> Result<f64> {
        self.validate()?;
        let t = t.abs();
        match *self {
            NoiseModel::OneOverF { sigma, omega_l, omega_h } => {
                if t == 0.0 {
                    return Ok(2.0 * sigma * sigma * (omega_h / omega_l).ln());
                }
                // Ci(ω_h t) − Ci(ω_l t) = ln(ω_h/ω_l) − Cin(ω_h t) + Cin(ω_l t)
                let v = (omega_h / omega_l).ln() - special::cin(omega_h * t)? + special::cin(omega_l * t)?;
                Ok(2.0 * sigma * sigma * v)
            }
            _ => self.autocorr_limit(t),
        }
    }

    /// `S(t)` with the 1/f upper cutoff sent to infinity: `−2σ² Ci(ω_l t)`.
    pub fn autocorr_limit(&self, t: f64) -> Result<f64> {
        self.validate()?;
        let t = t.abs();
        match *self {
            NoiseModel::Quasistatic { sigma } => Ok(sigma * sigma),
            NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => Ok(sigma * sigma * (-t / tau_c).exp()),
            NoiseModel::OneOverF { sigma, omega_l, .. } => {
                if t == 0.0 {
                    return Err(Error::Domain("1/f autocorrelation diverges at t = 0 without an upper cutoff".into()));
                }
                Ok(-2.0 * sigma * sigma * special::ci(omega_l * t)?)
            }
            NoiseModel::White { .. } => {
                if t == 0.0 {
                    Err(Error::Domain("white-noise autocorrelation is a delta function".into()))
                } else {
                    Ok(0.0)
                }
            }
        }
    }

    /// `S(ω) = ∫ S(t) e^{iωt} dt`. The quasistatic density is a delta at
    /// zero and is rejected.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        self.validate()?;
        let w = omega.abs();
        match *self {
            NoiseModel::Quasistatic { .. } => Err(Error::Domain("quasistatic spectral density is a delta at ω = 0".into())),
            NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => Ok(2.0 * sigma * sigma * tau_c / (1.0 + w * w * tau_c * tau_c)),
            NoiseModel::OneOverF { sigma, omega_l, omega_h } => {
                if w > omega_l && w < omega_h {
                    Ok(2.0 * std::f64::consts::PI * sigma * sigma / w)
                } else {
                    Ok(0.0)
                }
            }
            NoiseModel::White { diffusion } => Ok(diffusion),
        }
    }

    /// `∫₀ᵗ S(u) du`, the 0th-order half rate.
    pub fn integrated_autocorr(&self, t: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            NoiseModel::Quasistatic { sigma } => Ok(sigma * sigma * t),
            NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => Ok(-sigma * sigma * tau_c * (-t / tau_c).exp_m1()),
            NoiseModel::OneOverF { sigma, omega_l, .. } => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                let x = omega_l * t;
                Ok(2.0 * sigma * sigma * (x.sin() - x * special::ci(x)?) / omega_l)
            }
            NoiseModel::White { diffusion } => Ok(diffusion / 2.0),
        }
    }
}

// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pseudo-Lindblad master equation (PLME) generators for a Rabi-driven qubit
//! `H = Ω(t)/2 σx + g(t) η(t) σz`, written in the interaction frame of the
//! drive.
//!
//! The second-order generator is
//! `−i[h σx, ·] + Γ₊ D[τᵘ] + Γ₋ D[τᵛ]` with jump operators rotating in the
//! z–y plane, `τᵘ = cos θ̃ σz + sin θ̃ σy`, `τᵛ = −sin θ̃ σz + cos θ̃ σy` and
//! `θ̃ = φ/2 + θ(t)`, `θ(t) = ∫₀ᵗ Ω`. The fourth-order cumulant adds an
//! x-dephasing rate `Γₓ`.

mod closed;
mod drive;
mod fourth;
mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::noise::NoiseModel;
use crate::qmath::{dissipator, hamiltonian_superop, pauli, Mat3, Operator2, Superoperator};

pub use closed::{gamma_x_closed, one_over_f_unsimplified, plme_params_closed};
pub use drive::DriveProfile;
pub use fourth::{r4_bloch, r4_superoperator, R4Options};
pub use quadrature::{plme_params_quadrature, second_order_moments, OneOverFKernel, QuadratureOptions, SecondOrderMoments};

/// Expansion order of a PLME generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Zeroth,
    Second,
    Fourth,
}

/// Canonical parameters of the PLME generator at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlmeParams {
    pub t: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Zero unless fourth-order terms were kept.
    pub gamma_x: f64,
    /// In `(−π, π]`.
    pub phi: f64,
    /// Coefficient `h` of `H_ren = h σx`.
    pub h_ren_coeff: f64,
    /// Drive angle `θ(t)`.
    pub theta: f64,
}

/// `(Γ₊, Γ₋)` from `C = Γ̃ cos φ`, `r = |Γ̃|` and `s = sign Γ̃`, without
/// cancellation in the small rate.
fn rates(c: f64, sn: f64, s: f64) -> (f64, f64) {
    let r = c.hypot(sn);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    if c * s >= 0.0 {
        let big = c + s * r;
        (big, -sn * sn / big)
    } else {
        let big = c - s * r;
        (-sn * sn / big, big)
    }
}

impl PlmeParams {
    /// Parameters from the kernel moments `C = Γ̃ cos φ`, `Sn = h = −Γ̃ sin φ`
    /// and the sign of `Γ̃`.
    pub fn from_moments(t: f64, theta: f64, c: f64, sn: f64, sign: f64) -> PlmeParams {
        let s = if sign < 0.0 { -1.0 } else { 1.0 };
        let (gamma_plus, gamma_minus) = rates(c, sn, s);
        let phi = if c == 0.0 && sn == 0.0 { 0.0 } else { (-s * sn).atan2(s * c) };
        PlmeParams { t, gamma_plus, gamma_minus, gamma_x: 0.0, phi, h_ren_coeff: sn, theta }
    }

    /// `Γ̃ = (Γ₊ − Γ₋)/2`.
    pub fn gamma_tilde(&self) -> f64 {
        0.5 * (self.gamma_plus - self.gamma_minus)
    }

    /// `θ̃ = φ/2 + θ`.
    pub fn theta_tilde(&self) -> f64 {
        0.5 * self.phi + self.theta
    }

    pub fn jump_u(&self) -> Operator2 {
        let (s, c) = self.theta_tilde().sin_cos();
        pauli::Z * c + pauli::Y * s
    }

    pub fn jump_v(&self) -> Operator2 {
        let (s, c) = self.theta_tilde().sin_cos();
        pauli::Z * -s + pauli::Y * c
    }
}

/// Interaction-frame coupling operator `A(t) = g(t)(cos θ σz + sin θ σy)`.
pub fn interaction_a(drive: &DriveProfile, t: f64) -> Operator2 {
    pauli::dot(drive.coupling_vector(t))
}

/// PLME Liouvillian for the given parameters, in column-stacking form.
pub fn plme_liouvillian(p: &PlmeParams) -> Superoperator {
    let mut l = hamiltonian_superop(&(pauli::X * p.h_ren_coeff));
    l = l.add(&dissipator(&p.jump_u()).scale(p.gamma_plus));
    l = l.add(&dissipator(&p.jump_v()).scale(p.gamma_minus));
    if p.gamma_x != 0.0 {
        l = l.add(&dissipator(&pauli::X).scale(p.gamma_x));
    }
    l
}

/// Rate `r₀(t) = 2 g(t)² ∫₀ᵗ S` and unit jump operator `cos θ σz + sin θ σy`
/// of the 0th-order approximation `r₀ D[·]`, which neglects the rotation of
/// `A` during the noise memory time.
pub fn zeroth_order(noise: &NoiseModel, drive: &DriveProfile, t: f64) -> Result<(f64, Operator2)> {
    let lambda = noise.integrated_autocorr(t)?;
    let g = drive.coupling(t);
    let (s, c) = drive.theta(t).sin_cos();
    Ok((2.0 * lambda * g * g, pauli::Z * c + pauli::Y * s))
}

pub fn zeroth_order_liouvillian(noise: &NoiseModel, drive: &DriveProfile, t: f64) -> Result<Superoperator> {
    let (r, a) = zeroth_order(noise, drive, t)?;
    Ok(dissipator(&a).scale(r))
}

/// Second-order generator `−[A(t), [K(t), ·]]` written directly from the
/// kernel moments; equal to [`plme_liouvillian`] of the matching parameters.
pub fn r2_bloch(moments: &SecondOrderMoments) -> Mat3 {
    (Mat3::cross(moments.a) * Mat3::cross(moments.k)).scale(4.0)
}

/// `R⁽²⁾ + R⁽⁴⁾` at time `t`, with the second-order part from quadrature.
pub fn fourth_order_generator(
    noise: &NoiseModel,
    drive: &DriveProfile,
    t: f64,
    quad: &QuadratureOptions,
    r4: &R4Options,
) -> Result<Superoperator> {
    let m = second_order_moments(noise, drive, t, quad)?;
    let bloch = r2_bloch(&m) + r4_bloch(noise, drive, t, r4)?;
    Ok(Superoperator::from_bloch(&bloch, [0.0; 3], 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_stable_branches() {
        for &(c, sn, s) in &[(1.0, 1e-5, 1.0), (-1.0, 1e-5, 1.0), (1.0, 1e-5, -1.0), (0.3, 2.0, 1.0)] {
            let (gp, gm) = rates(c, sn, s);
            let r = f64::hypot(c, sn);
            assert!((gp - (c + s * r)).abs() < 1e-14);
            assert!((gm - (c - s * r)).abs() < 1e-14);
        }
    }

    #[test]
    fn liouvillian_is_trace_preserving() {
        let p = PlmeParams { t: 1.0, gamma_plus: 0.3, gamma_minus: -0.1, gamma_x: 0.01, phi: 0.4, h_ren_coeff: 0.2, theta: 1.0 };
        let l = plme_liouvillian(&p);
        assert!(l.trace_defect(0.0) < 1e-15);
        assert!(l.hermiticity_defect() < 1e-15);
    }
}

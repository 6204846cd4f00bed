// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Second-order PLME parameters by direct quadrature of the noise kernel.

use serde::{Deserialize, Serialize};

use super::{DriveProfile, PlmeParams};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::quad::{integrate, QuadTol};
use crate::special::{self, EULER_GAMMA};

/// How the 1/f kernel is integrated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneOverFKernel {
    /// `S(u) = −2σ² Ci(ω_l u)` integrated as is.
    #[default]
    Exact,
    /// Replaces `Ω ± ω_l` by `Ω` in the oscillatory factors, as in the
    /// compact closed forms. Requires a constant drive.
    Simplified,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    pub tol: QuadTol,
    pub one_over_f: OneOverFKernel,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tol: QuadTol { abs: 1e-16, rel: 1e-12, max_intervals: 20_000 },
            one_over_f: OneOverFKernel::Exact,
        }
    }
}

/// `Λ = ∫₀ᵗ S(u) g(t−u) du`, `K = ∫₀ᵗ S(u) a(t−u) du` and `a(t)`, where
/// `A(t) = a·σ`. The second-order generator is `−[A(t), [K·σ, ·]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondOrderMoments {
    pub t: f64,
    pub theta: f64,
    pub lambda: f64,
    pub a: [f64; 3],
    pub k: [f64; 3],
}

impl SecondOrderMoments {
    /// `a·k = Γ̃ cos φ`.
    pub fn c(&self) -> f64 {
        self.a[1] * self.k[1] + self.a[2] * self.k[2]
    }

    /// `a_y k_z − a_z k_y = h = −Γ̃ sin φ`.
    pub fn sn(&self) -> f64 {
        self.a[1] * self.k[2] - self.a[2] * self.k[1]
    }

    /// Parameters, with the sign of `Γ̃` taken from `Λ` (positive when `Λ`
    /// vanishes to within `1e-12 σ² t`).
    pub fn params(&self, sigma_sq: f64) -> PlmeParams {
        let sign = if self.lambda.abs() < 1e-12 * sigma_sq * self.t || self.lambda > 0.0 { 1.0 } else { -1.0 };
        PlmeParams::from_moments(self.t, self.theta, self.c(), self.sn(), sign)
    }
}

fn variance_scale(noise: &NoiseModel) -> f64 {
    match *noise {
        NoiseModel::White { diffusion } => diffusion,
        _ => noise.sigma() * noise.sigma(),
    }
}

/// Kernel moments at time `t`.
pub fn second_order_moments(
    noise: &NoiseModel,
    drive: &DriveProfile,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<SecondOrderMoments> {
    noise.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and ≥ 0, got {t}")));
    }
    let a = drive.coupling_vector(t);
    let theta = drive.theta(t);
    let zero = SecondOrderMoments { t, theta, lambda: 0.0, a, k: [0.0; 3] };
    if t == 0.0 {
        return Ok(zero);
    }
    if let NoiseModel::White { diffusion } = *noise {
        let half = 0.5 * diffusion;
        return Ok(SecondOrderMoments { lambda: half * drive.coupling(t), k: a.map(|x| half * x), ..zero });
    }
    if let (NoiseModel::OneOverF { sigma, omega_l, .. }, OneOverFKernel::Simplified) = (*noise, opts.one_over_f) {
        return simplified_one_over_f(sigma, omega_l, drive, t, opts);
    }
    let integrand = |u: f64| -> Result<[f64; 3]> {
        let s = noise.autocorr_limit(u)?;
        let [_, ay, az] = drive.coupling_vector(t - u);
        Ok([s * drive.coupling(t - u), s * ay, s * az])
    };
    let mut failure = None;
    let (v, _) = match noise {
        NoiseModel::OneOverF { .. } => {
            // u = t e^{−s} tames the logarithmic singularity at u = 0.
            const S_MAX: f64 = 46.0;
            integrate(
                |s| {
                    let u = t * (-s).exp();
                    match integrand(u) {
                        Ok(f) => f.map(|x| x * u),
                        Err(e) => {
                            failure.get_or_insert(e);
                            [0.0; 3]
                        }
                    }
                },
                0.0,
                S_MAX,
                &opts.tol,
            )?
        }
        _ => integrate(
            |u| match integrand(u) {
                Ok(f) => f,
                Err(e) => {
                    failure.get_or_insert(e);
                    [0.0; 3]
                }
            },
            0.0,
            t,
            &opts.tol,
        )?,
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(SecondOrderMoments { lambda: v[0], k: [0.0, v[1], v[2]], ..zero })
}

fn simplified_one_over_f(
    sigma: f64,
    omega_l: f64,
    drive: &DriveProfile,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<SecondOrderMoments> {
    let omega = drive
        .constant_omega()
        .ok_or_else(|| Error::Unsupported("simplified 1/f kernel needs a constant drive".into()))?;
    let s2 = sigma * sigma;
    let x = omega * t;
    // ∫₀ᵗ sin(Ωu)/u du and ∫₀ᵗ (1 − cos Ωu)/u du.
    let (v, _) = integrate(
        |u| {
            if u == 0.0 {
                return [omega, 0.0];
            }
            let (s, c) = (omega * u).sin_cos();
            [s / u, (1.0 - c) / u]
        },
        0.0,
        t,
        &opts.tol,
    )?;
    let ci_l = special::ci(omega_l * t)?;
    let ci_w = EULER_GAMMA + x.ln() - v[1];
    let (sx, cx) = x.sin_cos();
    let c = -(2.0 * s2 / omega) * (ci_l * sx - v[0]);
    let sn = (2.0 * s2 / omega) * (cx * ci_l + (omega / omega_l).ln() - ci_w);
    let noise = NoiseModel::OneOverF { sigma, omega_l, omega_h: f64::MAX };
    let lambda = noise.integrated_autocorr(t)?;
    let a = drive.coupling_vector(t);
    // Invert c = a·k, sn = a_y k_z − a_z k_y for k in the z–y plane, |a| = 1.
    let k = [0.0, a[1] * c - a[2] * sn, a[2] * c + a[1] * sn];
    Ok(SecondOrderMoments { t, theta: drive.theta(t), lambda, a, k })
}

/// Second-order PLME parameters from quadrature of the kernel.
pub fn plme_params_quadrature(
    noise: &NoiseModel,
    drive: &DriveProfile,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<PlmeParams> {
    Ok(second_order_moments(noise, drive, t, opts)?.params(variance_scale(noise)))
}

// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form PLME parameters for a constant drive.

use num_complex::Complex64 as C64;

use super::PlmeParams;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::special::{self, x_minus_sin};

/// `(e^z − 1)/z`.
fn exprel(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..30 {
            term = term * z / n as f64;
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        let (s, c) = z.im.sin_cos();
        let h = (0.5 * z.im).sin();
        C64::new(z.re.exp_m1() * c - 2.0 * h * h, z.re.exp() * s) / z
    }
}

fn require_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("closed forms need a finite Ω > 0, got {omega}")))
    }
}

/// Second-order PLME parameters from the closed forms for constant `Ω`.
/// For 1/f noise these are the compact forms with `Ω ± ω_l ≈ Ω` and
/// `ω_h → ∞`.
pub fn plme_params_closed(noise: &NoiseModel, omega: f64, t: f64) -> Result<PlmeParams> {
    noise.validate()?;
    require_omega(omega)?;
    // White noise has no memory, so its rates are defined at t = 0 too.
    let white = matches!(noise, NoiseModel::White { .. });
    if !(t > 0.0 || (white && t == 0.0)) || !t.is_finite() {
        return Err(Error::Domain(format!("closed forms need finite t > 0, got {t}")));
    }
    let x = omega * t;
    Ok(match *noise {
        NoiseModel::Quasistatic { sigma } => {
            let g = sigma * sigma / omega;
            let (s, c) = (0.5 * x).sin_cos();
            let q = 0.25 * x;
            // Γ± = (σ²/Ω)(sin Ωt ± 2|sin(Ωt/2)|), written without cancellation.
            let sa = s.abs();
            let (gamma_plus, gamma_minus) = if s >= 0.0 {
                (2.0 * g * sa * (1.0 + c), -4.0 * g * sa * q.sin().powi(2))
            } else {
                (2.0 * g * sa * (1.0 - c), -4.0 * g * sa * q.cos().powi(2))
            };
            PlmeParams {
                t,
                gamma_plus,
                gamma_minus,
                gamma_x: 0.0,
                phi: (-sa).atan2(s.signum() * c),
                h_ren_coeff: 2.0 * g * s * s,
                theta: x,
            }
        }
        NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => {
            // ∫₀ᵗ σ² e^{−u/τ} e^{iΩu} du = σ² t · exprel((iΩ − 1/τ) t).
            let z = C64::new(-t / tau_c, x);
            let m = exprel(z) * (sigma * sigma * t);
            PlmeParams::from_moments(t, x, m.re, m.im, 1.0)
        }
        NoiseModel::OneOverF { sigma, omega_l, .. } => {
            let (gu, gv, g) = one_over_f_g(omega, omega_l, t)?;
            let f = 2.0 * sigma * sigma / omega;
            // sign Λ = −sign G.
            PlmeParams::from_moments(t, x, -f * gu, f * gv, -g.signum())
        }
        NoiseModel::White { diffusion } => PlmeParams {
            t,
            gamma_plus: diffusion,
            gamma_minus: 0.0,
            gamma_x: 0.0,
            phi: 0.0,
            h_ren_coeff: 0.0,
            theta: x,
        },
    })
}

/// `(G_u, G_v, G)` of the compact 1/f forms, evaluated without cancellation.
fn one_over_f_g(omega: f64, omega_l: f64, t: f64) -> Result<(f64, f64, f64)> {
    let x = omega * t;
    let y = omega_l * t;
    let ci_l = special::ci(y)?;
    let h = (0.5 * x).sin();
    let gu = x.sin() * ci_l - special::si(x)?;
    // cos x Ci(y) + ln(Ω/ω_l) − Ci(x) = −2 sin²(x/2) Ci(y) + Cin(x) − Cin(y)
    let gv = -2.0 * h * h * ci_l + special::cin(x)? - special::cin(y)?;
    let g = ci_l * y - y.sin();
    Ok((gu, gv, g))
}

/// 1/f kernel moments `(C, Sn, Λ)` with `ω_h → ∞` but keeping `Ω ± ω_l`;
/// requires `ω_l < Ω`.
pub fn one_over_f_unsimplified(sigma: f64, omega_l: f64, omega: f64, t: f64) -> Result<(f64, f64, f64)> {
    require_omega(omega)?;
    if !(omega_l > 0.0 && omega_l < omega) {
        return Err(Error::Domain("needs 0 < ω_l < Ω".into()));
    }
    let (a, x) = (omega_l, omega * t);
    let f = 2.0 * sigma * sigma / omega;
    let ci_l = special::ci(a * t)?;
    let (cp, sp) = special::cisi((omega + a) * t)?;
    let (cm, sm) = special::cisi((omega - a) * t)?;
    let c = -f * (ci_l * x.sin() - 0.5 * (sp + sm));
    let sn = f * (ci_l * x.cos() - (a / (omega * omega - a * a).sqrt()).ln() - 0.5 * (cp + cm));
    let lambda = NoiseModel::OneOverF { sigma, omega_l, omega_h: f64::MAX }.integrated_autocorr(t)?;
    Ok((c, sn, lambda))
}

/// Fourth-order x-dephasing rate in closed form (quasistatic and
/// Ornstein–Uhlenbeck noise).
pub fn gamma_x_closed(noise: &NoiseModel, omega: f64, t: f64) -> Result<f64> {
    noise.validate()?;
    require_omega(omega)?;
    let x = omega * t;
    match *noise {
        NoiseModel::Quasistatic { sigma } => {
            // 2x(1 − cos x) + sin 2x − 2 sin x = 4 sin²(x/2)(x − sin x)
            let h = (0.5 * x).sin();
            Ok(2.0 * sigma.powi(4) / omega.powi(3) * 4.0 * h * h * x_minus_sin(x))
        }
        NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => {
            let w = omega;
            let tc = tau_c;
            let q = 1.0 + w * w * tc * tc;
            let (s1, c1) = x.sin_cos();
            let (s2, c2) = (2.0 * x).sin_cos();
            let wt = w * tc;
            let beta1 = wt.powi(4) - s2 * wt.powi(3) + w * w * (3.0 * c2 + 2.0) * tc * tc + 3.0 * s2 * wt - c2 + 1.0;
            let beta2 = wt * wt * (c1 * x + s1) + 2.0 * w * w * t * tc * s1 - x * c1 + s1;
            Ok(2.0
                * sigma.powi(4)
                * (tc.powi(5) * w * w * (wt * wt + 5.0) / q.powi(3)
                    - tc.powi(3) * (-2.0 * t / tc).exp() / q.powi(3) * beta1
                    - 2.0 * tc * tc * (-t / tc).exp() / (q * q * w) * beta2))
        }
        _ => Err(Error::Unsupported(format!(
            "no closed-form Γx for {} noise; use r4_superoperator",
            noise.name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exprel_branches_agree() {
        for z in [C64::new(0.3, 0.39), C64::new(-0.001, 0.01), C64::new(-2.0, 7.0)] {
            let direct = (z.exp() - 1.0) / z;
            assert!((exprel(z) - direct).norm() < 1e-13 * direct.norm());
        }
    }

    #[test]
    fn x_minus_sin_branches() {
        for &x in &[0.999f64, 1.001, 3.0] {
            assert!((x_minus_sin(x) - (x - x.sin())).abs() < 1e-15);
        }
        assert!((x_minus_sin(1e-3) - (1e-9 / 6.0 - 1e-15 / 120.0)).abs() < 1e-24);
    }

    #[test]
    fn quasistatic_matches_printed_form() {
        let (sigma, omega) = (0.05f64, 1.0f64);
        let g = sigma * sigma / omega;
        for i in 1..200 {
            let t = i as f64 * 0.1;
            let p = plme_params_closed(&NoiseModel::Quasistatic { sigma }, omega, t).unwrap();
            let x = omega * t;
            let gp = g * (x.sin() + 2.0 * (x / 2.0).sin().abs());
            let gm = g * (x.sin() - 2.0 * (x / 2.0).sin().abs());
            assert!((p.gamma_plus - gp).abs() < 1e-15, "t = {t}");
            assert!((p.gamma_minus - gm).abs() < 1e-15, "t = {t}");
            assert!((p.h_ren_coeff - g * (1.0 - x.cos())).abs() < 1e-15);
            assert!((p.gamma_tilde() * p.phi.cos() - g * x.sin()).abs() < 1e-15);
            assert!((p.gamma_tilde() * p.phi.sin() + g * (1.0 - x.cos())).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_x_quasistatic_printed_form() {
        let (sigma, omega) = (0.05f64, 1.0f64);
        for &x in &[0.5f64, 2.0, 7.0, 12.0] {
            let printed = 2.0 * sigma.powi(4) / omega.powi(3) * (2.0 * x - 2.0 * x * x.cos() + (2.0 * x).sin() - 2.0 * x.sin());
            let v = gamma_x_closed(&NoiseModel::Quasistatic { sigma }, omega, x).unwrap();
            assert!((v - printed).abs() < 1e-15);
        }
    }
}

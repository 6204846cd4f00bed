// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use plme_lab::channel::{canonical_decompose, projected_rates};
use plme_lab::noise::NoiseModel;
use plme_lab::plme::{
    fourth_order_generator, gamma_x_closed, interaction_a, plme_liouvillian, plme_params_closed, plme_params_quadrature,
    r4_superoperator, zeroth_order, DriveProfile, PlmeParams, QuadratureOptions, R4Options,
};
use plme_lab::qmath::{dissipator, hamiltonian_superop, pauli, Mat};
use plme_lab::special::ci;
use proptest::prelude::*;

const SIGMA: f64 = 0.05;

fn drive() -> DriveProfile {
    DriveProfile::constant(1.0)
}

fn ou(tau_c: f64) -> NoiseModel {
    NoiseModel::OrnsteinUhlenbeck { sigma: SIGMA, tau_c }
}

fn qs() -> NoiseModel {
    NoiseModel::Quasistatic { sigma: SIGMA }
}

/// Γx as the weight of D[σx] in the full fourth-order generator.
fn extracted_gamma_x(noise: &NoiseModel, t: f64) -> f64 {
    let l = fourth_order_generator(noise, &drive(), t, &QuadratureOptions::default(), &R4Options::default()).unwrap();
    let g = canonical_decompose(&l).unwrap();
    projected_rates(&g, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])[0]
}

#[test]
fn interaction_a_examples() {
    let d = drive();
    assert!((interaction_a(&d, 0.0) - pauli::Z).max_abs() < 1e-16);
    assert!((interaction_a(&d, FRAC_PI_2) - pauli::Y).max_abs() < 1e-15);
    assert!((interaction_a(&d, PI) + pauli::Z).max_abs() < 1e-15);
}

#[test]
fn quadrature_matches_closed_forms() {
    let quad = QuadratureOptions::default();
    for noise in [qs(), ou(0.2), ou(1.0), ou(10.0)] {
        for k in 1..=40 {
            let t = 0.5 * k as f64;
            let a = plme_params_closed(&noise, 1.0, t).unwrap();
            let b = plme_params_quadrature(&noise, &drive(), t, &quad).unwrap();
            let s = SIGMA * SIGMA;
            for (x, y) in [(a.gamma_plus, b.gamma_plus), (a.gamma_minus, b.gamma_minus), (a.h_ren_coeff, b.h_ren_coeff)] {
                assert!((x - y).abs() < 1e-10 * s.max(x.abs()), "{} t = {t}: {x} vs {y}", noise.name());
            }
        }
    }
}

#[test]
fn white_noise_parameters() {
    let noise = NoiseModel::White { diffusion: 0.01 };
    for t in [0.0, 0.3, 7.0] {
        let p = plme_params_closed(&noise, 1.0, t).unwrap();
        assert_eq!((p.phi, p.gamma_minus, p.h_ren_coeff), (0.0, 0.0, 0.0));
        assert_eq!(p.gamma_plus, 0.01);
    }
}

#[test]
fn quasistatic_examples() {
    let p = plme_params_closed(&qs(), 1.0, PI).unwrap();
    assert!((p.gamma_plus - 0.005).abs() < 1e-15);
    assert!((p.gamma_minus + 0.005).abs() < 1e-15);
    assert!((p.h_ren_coeff - 0.005).abs() < 1e-15);
    for n in 1..5 {
        let p = plme_params_closed(&qs(), 1.0, TAU * n as f64).unwrap();
        assert!(p.gamma_plus.abs() < 1e-15 && p.gamma_minus.abs() < 1e-15 && p.h_ren_coeff.abs() < 1e-15);
    }
}

#[test]
fn ornstein_uhlenbeck_long_time() {
    let s = SIGMA * SIGMA;
    for tau in [0.2f64, 1.0, 10.0] {
        let p = plme_params_closed(&ou(tau), 1.0, 60.0 * tau).unwrap();
        let q = 1.0 + tau * tau;
        // ∫₀^∞ σ² e^{−u/τ} e^{iu} du = σ²τ(1 + iτ)/(1 + τ²).
        assert!((p.gamma_tilde() * p.phi.cos() - s * tau / q).abs() < 1e-12 * s);
        assert!((p.h_ren_coeff - s * tau * tau / q).abs() < 1e-12 * s);
        assert!((p.phi + tau.atan()).abs() < 1e-10);
    }
}

#[test]
fn one_over_f_short_time() {
    let (sigma, omega_l) = (0.01f64, 1e-3f64);
    let noise = NoiseModel::OneOverF { sigma, omega_l, omega_h: 1e3 };
    let euler = 0.577_215_664_901_532_9;
    for t in [1e-4, 1e-3] {
        let p = plme_params_closed(&noise, 1.0, t).unwrap();
        // Λ = −2σ² ∫₀ᵗ Ci(ω_l u) du for ω_l t, Ωt ≪ 1.
        let want = 2.0 * sigma * sigma * t * (1.0 - euler - (omega_l * t).ln());
        let got = p.gamma_tilde() * p.phi.cos();
        assert!((got - want).abs() < 1e-5 * want, "t = {t}: {got} vs {want}");
    }
}

#[test]
fn gamma_x_examples() {
    let s4 = SIGMA.powi(4);
    assert!(gamma_x_closed(&qs(), 1.0, TAU).unwrap().abs() < 1e-18);
    assert!((gamma_x_closed(&qs(), 1.0, PI).unwrap() - 8.0 * PI * s4).abs() < 1e-14 * 8.0 * PI * s4);
    for tau in [0.2f64, 1.0, 10.0] {
        let q = 1.0 + tau * tau;
        let want = 2.0 * s4 * tau.powi(5) * (tau * tau + 5.0) / q.powi(3);
        let got = gamma_x_closed(&ou(tau), 1.0, 80.0 * tau).unwrap();
        assert!((got - want).abs() < 1e-12 * want, "τ = {tau}");
    }
    assert!(gamma_x_closed(&NoiseModel::White { diffusion: 0.01 }, 1.0, 1.0).is_err());
}

#[test]
fn fourth_order_term() {
    let opts = R4Options::default();
    // Scales as σ⁴.
    let t = 3.0;
    let a = r4_superoperator(&NoiseModel::Quasistatic { sigma: 1e-3 }, &drive(), t, &opts).unwrap();
    let b = r4_superoperator(&NoiseModel::Quasistatic { sigma: 2e-3 }, &drive(), t, &opts).unwrap();
    assert!((b.matrix - a.matrix * 16.0).max_abs() < 1e-9 * b.matrix.max_abs());
    assert!(r4_superoperator(&NoiseModel::Quasistatic { sigma: 0.0 }, &drive(), t, &opts).unwrap().matrix.max_abs() == 0.0);
    for noise in [qs(), ou(1.0)] {
        let r = r4_superoperator(&noise, &drive(), 5.0, &opts).unwrap();
        assert!(r.trace_defect(0.0) < 1e-15);
        assert!(r.hermiticity_defect() < 1e-15);
    }
    for noise in [qs(), ou(0.2), ou(1.0), ou(10.0)] {
        for t in [FRAC_PI_2, 2.0, 5.0, 9.0] {
            let want = gamma_x_closed(&noise, 1.0, t).unwrap();
            let got = extracted_gamma_x(&noise, t);
            assert!((got - want).abs() < 1e-8 * want.abs().max(SIGMA.powi(4)), "{} t = {t}: {got} vs {want}", noise.name());
        }
    }
}

#[test]
fn liouvillian_examples() {
    let base = PlmeParams { t: 1.0, gamma_plus: 0.0, gamma_minus: 0.0, gamma_x: 0.0, phi: 0.0, h_ren_coeff: 0.0, theta: 0.0 };
    let p = PlmeParams { gamma_plus: 0.2, ..base };
    let want = dissipator(&pauli::Z).scale(0.2);
    assert!((plme_liouvillian(&p).matrix - want.matrix).max_abs() < 1e-16);

    // θ̃ = π/2: τᵘ = σy and τᵛ = −σz.
    let p = PlmeParams { gamma_plus: 0.3, gamma_minus: -0.1, gamma_x: 0.02, h_ren_coeff: 0.05, theta: FRAC_PI_2, ..base };
    let want = hamiltonian_superop(&(pauli::X * 0.05))
        .add(&dissipator(&pauli::Y).scale(0.3))
        .add(&dissipator(&pauli::Z).scale(-0.1))
        .add(&dissipator(&pauli::X).scale(0.02));
    let l = plme_liouvillian(&p);
    assert!((l.matrix - want.matrix).max_abs() < 1e-15);
    assert!(l.trace_defect(0.0) < 1e-16);
    assert_eq!(plme_liouvillian(&base).matrix, Mat::zeros());
}

#[test]
fn zeroth_order_rates() {
    let d = drive();
    let s = SIGMA * SIGMA;
    for t in [0.5, 3.0, 20.0] {
        let (r, a) = zeroth_order(&qs(), &d, t).unwrap();
        assert!((r - 2.0 * s * t).abs() < 1e-15 * r);
        assert!((a - interaction_a(&d, t)).max_abs() < 1e-15);
        let tau = 2.0;
        let (r, _) = zeroth_order(&ou(tau), &d, t).unwrap();
        let want = 2.0 * s * tau * (1.0 - (-t / tau).exp());
        assert!((r - want).abs() < 1e-14 * want);
    }
    let (sigma, omega_l) = (0.01f64, 1e-3);
    let noise = NoiseModel::OneOverF { sigma, omega_l, omega_h: 1e3 };
    for t in [1.0, 10.0, 100.0] {
        let x = omega_l * t;
        let want = 4.0 * sigma * sigma * t * (x.sin() / x - ci(x).unwrap());
        let (r, _) = zeroth_order(&noise, &d, t).unwrap();
        // The finite upper cutoff contributes at relative order 1/(ω_h t).
        assert!((r - want).abs() < 2e-3 * want, "t = {t}: {r} vs {want}");
    }
}

#[test]
fn short_time_series() {
    let (t, s) = (1e-3f64, SIGMA * SIGMA);
    let p = plme_params_closed(&qs(), 1.0, t).unwrap();
    assert!((p.gamma_plus - 2.0 * s * t).abs() < 1e-5 * 2.0 * s * t);
    assert!((p.gamma_minus + s * t.powi(3) / 8.0).abs() < 1e-5 * s * t.powi(3) / 8.0);
    assert!((p.h_ren_coeff - s * t * t / 2.0).abs() < 1e-5 * s * t * t / 2.0);
}

#[test]
fn lorentzian_limits() {
    let s = SIGMA * SIGMA;
    // τ_c → 0: white noise with D = 2σ²τ_c.
    let tau = 1e-4f64;
    let p = plme_params_closed(&ou(tau), 1.0, 5.0).unwrap();
    assert!((p.gamma_plus - 2.0 * s * tau).abs() < 1e-6 * s * tau);
    assert!(p.gamma_minus.abs() < 1e-7 * s * tau);
    // τ_c → ∞: quasistatic.
    for t in [0.5, 2.0, 6.0] {
        let a = plme_params_closed(&ou(1e6), 1.0, t).unwrap();
        let b = plme_params_closed(&qs(), 1.0, t).unwrap();
        assert!((a.gamma_plus - b.gamma_plus).abs() < 1e-5 * s);
        assert!((a.gamma_minus - b.gamma_minus).abs() < 1e-5 * s);
    }
}

#[test]
fn weak_drive_reduces_to_zeroth_order() {
    let omega = 1e-4;
    let d = DriveProfile::constant(omega);
    for t in [0.5, 2.0, 8.0] {
        let p = plme_params_closed(&ou(2.0), omega, t).unwrap();
        let (r, _) = zeroth_order(&ou(2.0), &d, t).unwrap();
        assert!((p.gamma_plus - r).abs() < 1e-6 * r, "t = {t}");
        assert!(p.gamma_minus.abs() < 1e-6 * r);
    }
}

#[test]
fn long_time_phase_small_memory() {
    let tau = 0.01f64;
    let p = plme_params_closed(&ou(tau), 1.0, 2.0).unwrap();
    assert!((p.phi + tau).abs() < tau.powi(3));
}

proptest! {
    #[test]
    fn rate_identities(t in 1e-2f64..30.0, tau in 1e-2f64..1e2, quasistatic in any::<bool>()) {
        let noise = if quasistatic { qs() } else { ou(tau) };
        let p = plme_params_closed(&noise, 1.0, t).unwrap();
        let g = p.gamma_tilde();
        let s = SIGMA * SIGMA;
        prop_assert!((p.gamma_plus + p.gamma_minus - 2.0 * g * p.phi.cos()).abs() < 1e-14 * s);
        prop_assert!((p.gamma_plus * p.gamma_minus + p.h_ren_coeff.powi(2)).abs() < 1e-14 * s * s);
        prop_assert!((p.h_ren_coeff + g * p.phi.sin()).abs() < 1e-14 * s);
        prop_assert!(p.phi > -PI && p.phi <= PI);
    }

    #[test]
    fn gamma_x_nonnegative(t in 1e-2f64..40.0, tau in 1e-2f64..1e2) {
        prop_assert!(gamma_x_closed(&qs(), 1.0, t).unwrap() >= 0.0);
        let v = gamma_x_closed(&ou(tau), 1.0, t).unwrap();
        prop_assert!(v >= -1e-15 * SIGMA.powi(4) * tau.powi(3), "{v}");
    }
}

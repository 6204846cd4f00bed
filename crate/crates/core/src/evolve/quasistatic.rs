// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Gauss–Hermite average of the exact propagator over quasistatic noise.

use super::{Provenance, QuantumMap};
use crate::error::{Error, Result};
use crate::qmath::{Mat3, Rotor};
use crate::quad::gauss_hermite;
use crate::special::x_minus_sin;

/// Interaction-frame propagator `exp(iΩtσx/2) exp(−i(Ωt/2 σx + ηt σz))` for
/// constant η, written so that the deviation from the identity is accurate
/// when `ηt` is small.
pub fn interaction_rotor(omega: f64, eta: f64, t: f64) -> Rotor {
    let a = 0.5 * omega * t;
    let b = eta * t;
    let n = a.hypot(b);
    if n == 0.0 {
        return Rotor::IDENTITY;
    }
    // δ = n − a without cancellation
    let delta = if a >= 0.0 { b * b / (n + a) } else { n - a };
    let (sa, ca) = a.sin_cos();
    let (sn, cn) = n.sin_cos();
    let half = (0.5 * n).sin();
    // a sin δ − δ sin a cos n
    let fx = -a * x_minus_sin(delta) + delta * x_minus_sin(a) + delta * sa * 2.0 * half * half;
    Rotor {
        s: ca * cn + sa * sn * (a / n),
        v: [fx / n, sa * sn * (b / n), ca * sn * (b / n)],
    }
}

fn check(sigma: f64, omega: f64, nodes: usize) -> Result<()> {
    if !(sigma >= 0.0) || !sigma.is_finite() || !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("σ = {sigma}, Ω = {omega}")));
    }
    if nodes < 20 {
        return Err(Error::InvalidParameter(format!("Gauss–Hermite needs ≥ 20 nodes, got {nodes}")));
    }
    Ok(())
}

/// Bloch deviations averaged over `η ~ N(0, σ²)` at each time.
fn averaged(sigma: f64, omega: f64, times: &[f64], nodes: usize) -> Vec<Mat3> {
    let (x, w) = gauss_hermite(nodes);
    let norm = 1.0 / std::f64::consts::PI.sqrt();
    times
        .iter()
        .map(|&t| {
            let mut acc = Mat3::ZERO;
            for (xi, wi) in x.iter().zip(&w) {
                let eta = std::f64::consts::SQRT_2 * sigma * xi;
                acc += interaction_rotor(omega, eta, t).bloch_deviation().scale(wi * norm);
            }
            acc
        })
        .collect()
}

/// `E_η[U_I ρ U_I†]` at time `t` with `nodes` Gauss–Hermite points.
pub fn quasistatic_exact_map(sigma: f64, omega: f64, t: f64, nodes: usize) -> Result<QuantumMap> {
    Ok(quasistatic_exact_series(sigma, omega, &[t], nodes)?.remove(0))
}

pub fn quasistatic_exact_series(sigma: f64, omega: f64, times: &[f64], nodes: usize) -> Result<Vec<QuantumMap>> {
    check(sigma, omega, nodes)?;
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("times"));
    }
    Ok(averaged(sigma, omega, times, nodes)
        .iter()
        .zip(times)
        .map(|(m, &t)| QuantumMap::from_bloch_deviation(m, t, Provenance::ExactQuadrature))
        .collect())
}

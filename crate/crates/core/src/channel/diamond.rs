// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Diamond norm of a Hermiticity-preserving qubit map by direct maximization.
//!
//! For a pure input on system ⊗ ancilla with reduced ancilla state σ, the
//! output of `(Φ ⊗ id)` is unitarily equivalent to `(√σ ⊗ I) J (√σ ⊗ I)`,
//! where `J` is the Choi matrix. The maximization therefore runs over the
//! Bloch ball of σ, three real parameters, with multi-start BFGS.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::choi_of;
use crate::error::Result;
use crate::evolve::QuantumMap;
use crate::qmath::{kron, pauli, trace_norm_hermitian, Mat, Operator2};

#[derive(Clone, Copy, Debug)]
pub struct DiamondOptions {
    pub starts: usize,
    /// Relative change of the objective below which BFGS stops.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for DiamondOptions {
    fn default() -> Self {
        DiamondOptions { starts: 64, tol: 1e-6, max_iter: 200, seed: 0x0d1a_304d }
    }
}

/// `√σ` for `σ = (I + r·σ)/2`, `|r| ≤ 1`.
fn sqrt_state(r: [f64; 3]) -> Operator2 {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt().min(1.0);
    let sp = (0.5 * (1.0 + n)).sqrt();
    let sm = (0.5 * (1.0 - n)).max(0.0).sqrt();
    let alpha = 0.5 * (sp + sm);
    if n == 0.0 {
        return pauli::ID * alpha;
    }
    let beta = 0.5 * (sp - sm) / n;
    pauli::ID * alpha + pauli::dot(r) * beta
}

/// Unconstrained coordinates to the open Bloch ball.
fn to_ball(x: [f64; 3]) -> [f64; 3] {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let f = if n < 1e-8 { 1.0 - n * n / 3.0 } else { n.tanh() / n };
    x.map(|v| v * f)
}

fn objective(j: &Mat<4>, r: [f64; 3]) -> f64 {
    let s = kron(&sqrt_state(r), &pauli::ID);
    let m = (s * *j * s).hermitian_part();
    trace_norm_hermitian(&m).unwrap_or(f64::NAN)
}

fn gradient(f: &impl Fn([f64; 3]) -> f64, x: [f64; 3]) -> [f64; 3] {
    const H: f64 = 1e-6;
    std::array::from_fn(|i| {
        let mut a = x;
        let mut b = x;
        a[i] += H;
        b[i] -= H;
        (f(a) - f(b)) / (2.0 * H)
    })
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Maximizes `f` from `x0`; returns the best value reached.
fn bfgs_max(f: &impl Fn([f64; 3]) -> f64, x0: [f64; 3], opts: &DiamondOptions) -> f64 {
    let mut x = x0;
    let mut fx = f(x);
    let mut g = gradient(f, x);
    let mut h = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..opts.max_iter {
        // Ascent direction p = H g.
        let mut p: [f64; 3] = std::array::from_fn(|i| dot(h[i], g));
        let mut slope = dot(p, g);
        if !(slope > 0.0) {
            p = g;
            slope = dot(g, g);
            h = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        }
        if slope <= 0.0 {
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: [f64; 3] = std::array::from_fn(|i| x[i] + step * p[i]);
            let fv = f(xn);
            if fv >= fx + 1e-4 * step * slope {
                accepted = Some((xn, fv));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fv)) = accepted else { break };
        let gn = gradient(f, xn);
        let s: [f64; 3] = std::array::from_fn(|i| xn[i] - x[i]);
        // Curvature of −f.
        let y: [f64; 3] = std::array::from_fn(|i| g[i] - gn[i]);
        let sy = dot(s, y);
        if sy > 1e-14 {
            let hy: [f64; 3] = std::array::from_fn(|i| dot(h[i], y));
            let yhy = dot(y, hy);
            for i in 0..3 {
                for k in 0..3 {
                    h[i][k] += (sy + yhy) * s[i] * s[k] / (sy * sy) - (hy[i] * s[k] + s[i] * hy[k]) / sy;
                }
            }
        }
        let improvement = fv - fx;
        x = xn;
        fx = fv;
        g = gn;
        if improvement <= opts.tol * 1e-3 * fx.abs() || dot(g, g).sqrt() < 1e-10 {
            break;
        }
    }
    fx
}

/// `max_σ ‖(√σ ⊗ I) J (√σ ⊗ I)‖₁` for the Choi matrix `j` of a
/// Hermiticity-preserving map.
pub fn diamond_norm(j: &Mat<4>, opts: &DiamondOptions) -> Result<f64> {
    let scale = j.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let jn = j.hermitian_part() * (1.0 / scale);
    let f = |x: [f64; 3]| objective(&jn, to_ball(x));
    let starts: Vec<[f64; 3]> = (0..opts.starts.max(1))
        .map(|k| {
            if k == 0 {
                [0.0; 3]
            } else {
                let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
                rng.set_stream(k as u64);
                std::array::from_fn(|_| StandardNormal.sample(&mut rng))
            }
        })
        .collect();
    let best = starts.par_iter().map(|&x0| bfgs_max(&f, x0, opts)).reduce(|| 0.0, f64::max);
    // Pure ancilla states on the sphere boundary cover the no-ancilla inputs.
    let axes = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    let edge = axes.iter().map(|&r| objective(&jn, r)).fold(0.0, f64::max);
    Ok(best.max(edge) * scale)
}

/// `‖Φ_A − Φ_B‖⋄`, in `[0, 2]` for trace-preserving maps.
pub fn diamond_distance(a: &QuantumMap, b: &QuantumMap, opts: &DiamondOptions) -> Result<f64> {
    let diff = a.deviation.sub(&b.deviation);
    diamond_norm(&choi_of(&diff), opts)
}

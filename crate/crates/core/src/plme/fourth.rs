// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fourth-order cumulant contribution to the time-local generator.
//!
//! With `L(s) = −i[A(s), ·]`, `S_ij = S(t_i − t_j)` and `t₀ = t`,
//!
//! `R⁽⁴⁾(t) = L₀ ∫_{t>t₁>t₂>t₃>0} S₀₂S₁₃ [L₁,L₂]L₃ + S₀₃S₁₂ (L₁[L₂,L₃] + [L₁,L₃]L₂)`.
//!
//! On Bloch vectors `L(s)` acts as `2[a(s)]×`, so the integrand is a real
//! 3×3 matrix and the innermost integral collapses to two vectors.

use super::DriveProfile;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::qmath::{Mat3, Superoperator};
use crate::quad::gauss_legendre;

#[derive(Clone, Copy, Debug, Default)]
pub struct R4Options {
    /// Gauss–Legendre nodes per dimension; chosen from `θ(t)` when `None`.
    pub nodes: Option<usize>,
    /// When set, also evaluates with twice the nodes and fails if the two
    /// results differ by more than this fraction of their size.
    pub verify_tol: Option<f64>,
}

fn auto_nodes(noise: &NoiseModel, drive: &DriveProfile, t: f64) -> usize {
    let phase = drive.theta(t).abs();
    let base = (1.2 * phase + 12.0).ceil() as usize;
    match noise {
        NoiseModel::OneOverF { .. } => base.max(32) + base / 2,
        _ => base.max(24),
    }
}

/// Nodes and weights on `[0, 1]`, clustered at both ends when `cluster`.
fn unit_rule(n: usize, cluster: bool) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter()
        .zip(&w)
        .map(|(&x, &w)| {
            let v = 0.5 * (1.0 + x);
            let w = 0.5 * w;
            if cluster {
                // u = v³(10 − 15v + 6v²), du/dv = 30 v²(1 − v)²
                let u = v * v * v * (10.0 - 15.0 * v + 6.0 * v * v);
                (u, w * 30.0 * v * v * (1.0 - v) * (1.0 - v))
            } else {
                (v, w)
            }
        })
        .collect()
}

fn r4_with_nodes(noise: &NoiseModel, drive: &DriveProfile, t: f64, n: usize) -> Result<Mat3> {
    let cluster = matches!(noise, NoiseModel::OneOverF { .. });
    let rule = unit_rule(n, cluster);
    let s = |u: f64| noise.autocorr_limit(u);
    let l = |v: [f64; 3]| Mat3::cross(v).scale(2.0);
    let l0 = l(drive.coupling_vector(t));
    let mut acc = Mat3::ZERO;
    let mut a3 = vec![[0.0; 3]; n];
    let mut t3 = vec![0.0; n];
    for &(u1, w1) in &rule {
        let t1 = t * u1;
        let big_w1 = t * w1;
        let l1 = l(drive.coupling_vector(t1));
        for &(u2, w2) in &rule {
            let t2 = t1 * u2;
            let big_w2 = t1 * w2;
            let l2 = l(drive.coupling_vector(t2));
            let mut v13 = [0.0; 3];
            let mut v03 = [0.0; 3];
            for (k, &(u3, w3)) in rule.iter().enumerate() {
                t3[k] = t2 * u3;
                a3[k] = drive.coupling_vector(t3[k]);
                let big_w3 = t2 * w3;
                let s13 = s(t1 - t3[k])? * big_w3;
                let s03 = s(t - t3[k])? * big_w3;
                for c in 0..3 {
                    v13[c] += s13 * a3[k][c];
                    v03[c] += s03 * a3[k][c];
                }
            }
            let m13 = l(v13);
            let m03 = l(v03);
            let s02 = s(t - t2)?;
            let s12 = s(t1 - t2)?;
            let term = (l1.commutator(&l2) * m13).scale(s02)
                + (l1 * l2.commutator(&m03) + l1.commutator(&m03) * l2).scale(s12);
            acc += term.scale(big_w1 * big_w2);
        }
    }
    Ok(l0 * acc)
}

/// `R⁽⁴⁾(t)` as a map on Bloch vectors.
pub fn r4_bloch(noise: &NoiseModel, drive: &DriveProfile, t: f64, opts: &R4Options) -> Result<Mat3> {
    noise.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and ≥ 0, got {t}")));
    }
    // Gaussian white noise has no fourth cumulant contribution.
    if t == 0.0 || matches!(noise, NoiseModel::White { .. }) {
        return Ok(Mat3::ZERO);
    }
    let n = opts.nodes.unwrap_or_else(|| auto_nodes(noise, drive, t));
    let r = r4_with_nodes(noise, drive, t, n)?;
    match opts.verify_tol {
        None => Ok(r),
        Some(tol) => {
            let r2 = r4_with_nodes(noise, drive, t, 2 * n)?;
            let diff = (r2 - r).max_abs();
            let scale = r2.max_abs().max(f64::MIN_POSITIVE);
            if diff > tol * scale {
                Err(Error::NonConvergence(format!(
                    "R4 at t = {t}: {n} and {} nodes differ by {diff:.3e} (relative {:.3e})",
                    2 * n,
                    diff / scale
                )))
            } else {
                Ok(r2)
            }
        }
    }
}

/// `R⁽⁴⁾(t)` as a column-stacking superoperator.
pub fn r4_superoperator(noise: &NoiseModel, drive: &DriveProfile, t: f64, opts: &R4Options) -> Result<Superoperator> {
    let m = r4_bloch(noise, drive, t, opts)?;
    Ok(Superoperator::from_bloch(&m, [0.0; 3], 0.0))
}

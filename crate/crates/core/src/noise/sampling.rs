// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::synth::{OneOverFSynth, DEFAULT_COMPONENTS, DEFAULT_OFFSET_LEVELS};
use super::NoiseModel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    /// `values[i] = η(grid[i])`.
    Point,
    /// `values[i]` is the mean of η over `[edges[i], edges[i+1]]`; `grid`
    /// holds the edges and is one longer than `values`.
    CellAverage,
}

#[derive(Clone, Debug)]
pub struct NoiseTrajectory {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SampleKind,
}

/// Independent, reproducible stream for trajectory `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Point samples `η(t_i)` of one realization.
pub fn sample_trajectory(model: &NoiseModel, grid: &[f64], seed: u64, stream: u64) -> Result<NoiseTrajectory> {
    model.validate()?;
    check_grid(grid)?;
    let mut rng = rng_for(seed, stream);
    let values = match *model {
        NoiseModel::Quasistatic { sigma } => {
            let x = sigma * normal(&mut rng);
            vec![x; grid.len()]
        }
        NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => {
            let mut x = sigma * normal(&mut rng);
            let mut out = Vec::with_capacity(grid.len());
            out.push(x);
            for w in grid.windows(2) {
                let a = (-(w[1] - w[0]) / tau_c).exp();
                let sd = sigma * (-(-2.0 * (w[1] - w[0]) / tau_c).exp_m1()).sqrt();
                x = a * x + sd * normal(&mut rng);
                out.push(x);
            }
            out
        }
        NoiseModel::OneOverF { sigma, omega_l, omega_h } => {
            let synth = OneOverFSynth::new(sigma, omega_l, omega_h, DEFAULT_COMPONENTS, DEFAULT_OFFSET_LEVELS)?;
            let u = synth.draw_offset(&mut rng);
            let coeffs = synth.draw_coefficients(&mut rng);
            grid.iter().map(|&t| synth.evaluate(u, &coeffs, t)).collect()
        }
        NoiseModel::White { .. } => {
            return Err(Error::Unsupported("white noise has no point values; use cell averages".into()));
        }
    };
    Ok(NoiseTrajectory { grid: grid.to_vec(), values, kind: SampleKind::Point })
}

/// `κ − 2 tanh(κ/2)`, the scaled variance of ∫η given both endpoints.
fn bridge_variance(k: f64) -> f64 {
    if k < 2e-2 {
        let k2 = k * k;
        k * k2 * (1.0 / 12.0 - k2 * (1.0 / 120.0 - k2 * (17.0 / 20160.0 - k2 * 31.0 / 362880.0)))
    } else {
        k - 2.0 * (0.5 * k).tanh()
    }
}

/// Exact joint sampling of Ornstein–Uhlenbeck cell averages, appended to `out`.
pub fn ou_cell_averages(sigma: f64, tau_c: f64, edges: &[f64], rng: &mut impl Rng, out: &mut Vec<f64>) {
    out.clear();
    let mut x = sigma * normal(rng);
    for w in edges.windows(2) {
        let d = w[1] - w[0];
        let k = d / tau_c;
        let one_minus_a = -(-k).exp_m1();
        let a = 1.0 - one_minus_a;
        let var_x = sigma * sigma * (-(-2.0 * k).exp_m1());
        let cov = sigma * sigma * tau_c * one_minus_a * one_minus_a;
        let cond = 2.0 * sigma * sigma * tau_c * tau_c * bridge_variance(k);
        let z1 = normal(rng);
        let z2 = normal(rng);
        let dx = var_x.sqrt() * z1;
        let integral = x * tau_c * one_minus_a
            + if var_x > 0.0 { cov / var_x * dx } else { 0.0 }
            + cond.max(0.0).sqrt() * z2;
        out.push(integral / d);
        x = a * x + dx;
    }
}

/// Cell averages of η over consecutive `edges`.
pub fn cell_averages(model: &NoiseModel, edges: &[f64], seed: u64, stream: u64) -> Result<NoiseTrajectory> {
    model.validate()?;
    check_grid(edges)?;
    let mut rng = rng_for(seed, stream);
    let mut values = Vec::with_capacity(edges.len().saturating_sub(1));
    match *model {
        NoiseModel::Quasistatic { sigma } => {
            let x = sigma * normal(&mut rng);
            values.resize(edges.len() - 1, x);
        }
        NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => ou_cell_averages(sigma, tau_c, edges, &mut rng, &mut values),
        NoiseModel::OneOverF { sigma, omega_l, omega_h } => {
            let synth = OneOverFSynth::new(sigma, omega_l, omega_h, DEFAULT_COMPONENTS, DEFAULT_OFFSET_LEVELS)?;
            let u = synth.draw_offset(&mut rng);
            let coeffs = synth.draw_coefficients(&mut rng);
            synth.cell_table(u, edges).averages_into(&coeffs, &mut values);
        }
        NoiseModel::White { diffusion } => {
            for w in edges.windows(2) {
                values.push((diffusion / (w[1] - w[0])).sqrt() * normal(&mut rng));
            }
        }
    }
    Ok(NoiseTrajectory { grid: edges.to_vec(), values, kind: SampleKind::CellAverage })
}

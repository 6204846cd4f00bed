// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo average of per-realization conjugation maps.
//!
//! Trajectory `n` draws its noise from stream `n` of the configured seed, and
//! trajectories are split into a fixed number of contiguous batches whose
//! statistics are merged in batch order, so results do not depend on the
//! thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::{frame_rotor, step_coefficients};
use super::{Provenance, QuantumMap};
use crate::error::{Error, Result};
use crate::noise::{ou_cell_averages, rng_for, CellTable, NoiseModel, OneOverFSynth, DEFAULT_COMPONENTS, DEFAULT_OFFSET_LEVELS};
use crate::plme::DriveProfile;
use crate::qmath::{Mat3, Rotor};

/// Default trajectory step, `2π/200` in units of `1/Ω`.
pub const DEFAULT_DT: f64 = std::f64::consts::TAU / 200.0;
pub const DEFAULT_BATCHES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_traj: usize,
    pub dt: f64,
    pub seed: u64,
    /// Output times, ascending and ≥ 0.
    pub grid: Vec<f64>,
    /// Batches used for the jackknife and for parallel work.
    #[serde(default = "default_batches")]
    pub batches: usize,
}

fn default_batches() -> usize {
    DEFAULT_BATCHES
}

impl EnsembleConfig {
    pub fn new(n_traj: usize, dt: f64, seed: u64, grid: Vec<f64>) -> Self {
        EnsembleConfig { n_traj, dt, seed, grid, batches: DEFAULT_BATCHES }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.n_traj == 0 {
            bad.push("n_traj must be ≥ 1".to_string());
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            bad.push(format!("dt must be finite and > 0, got {}", self.dt));
        }
        if self.batches == 0 {
            bad.push("batches must be ≥ 1".to_string());
        }
        if self.grid.is_empty() {
            bad.push("grid is empty".to_string());
        }
        if self.grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            bad.push("grid times must be finite and ≥ 0".to_string());
        }
        if self.grid.windows(2).any(|w| w[1] < w[0]) {
            bad.push("grid must be ascending".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    /// Mean map at each grid time.
    pub maps: Vec<QuantumMap>,
    /// Standard error of each Bloch-block entry of the mean map; the other
    /// entries of the Pauli transfer matrix are exact.
    pub std_err: Vec<Mat3>,
    /// Mean Bloch deviation per batch, indexed `[batch][time]`.
    pub batch_means: Vec<Vec<Mat3>>,
    pub batch_counts: Vec<usize>,
    pub n_traj: usize,
    pub seed: u64,
}

impl EnsembleResult {
    pub fn grid(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.t).collect()
    }

    /// Mean maps with batch `b` left out.
    pub fn leave_one_out(&self, b: usize) -> Vec<QuantumMap> {
        let nb = self.batch_counts[b] as f64;
        let n = self.n_traj as f64;
        self.maps
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let full = m.deviation.bloch_parts().0;
                let rest = (full.scale(n) - self.batch_means[b][i].scale(nb)).scale(1.0 / (n - nb));
                QuantumMap::from_bloch_deviation(&rest, m.t, Provenance::ExactEnsemble)
            })
            .collect()
    }

    /// Estimate of a statistic of the mean maps with its delete-one-batch
    /// jackknife standard error.
    pub fn jackknife<F>(&self, f: F) -> Result<(Vec<f64>, Vec<f64>)>
    where
        F: Fn(&[QuantumMap]) -> Result<Vec<f64>> + Sync,
    {
        let b = self.batch_counts.len();
        if b < 2 {
            return Err(Error::InvalidParameter("jackknife needs at least two batches".into()));
        }
        let full = f(&self.maps)?;
        let partial: Vec<Vec<f64>> = (0..b).into_par_iter().map(|i| f(&self.leave_one_out(i))).collect::<Result<_>>()?;
        let k = full.len();
        let mut se = vec![0.0; k];
        for j in 0..k {
            let mean = partial.iter().map(|p| p[j]).sum::<f64>() / b as f64;
            let ss: f64 = partial.iter().map(|p| (p[j] - mean).powi(2)).sum();
            se[j] = ((b as f64 - 1.0) / b as f64 * ss).sqrt();
        }
        Ok((full, se))
    }
}

/// Step edges from 0: multiples of `dt` with every grid time inserted.
/// Returns the edges and, per grid time, its edge index.
pub fn ensemble_edges(grid: &[f64], dt: f64) -> (Vec<f64>, Vec<usize>) {
    let t_max = grid.iter().copied().fold(0.0, f64::max);
    let n = (t_max / dt).ceil() as usize;
    let mut edges: Vec<f64> = (0..=n).map(|k| k as f64 * dt).filter(|&t| t <= t_max).collect();
    edges.extend_from_slice(grid);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    // Drop uniform edges that would leave slivers next to a grid time.
    let snap = 1e-3 * dt;
    let mut kept: Vec<f64> = Vec::with_capacity(edges.len());
    for &e in &edges {
        let on_grid = grid.binary_search_by(|g| g.total_cmp(&e)).is_ok();
        if let Some(&last) = kept.last() {
            if e - last < snap {
                if !on_grid {
                    continue;
                }
                let last_on_grid = grid.binary_search_by(|g| g.total_cmp(&last)).is_ok();
                if !last_on_grid && last != 0.0 {
                    kept.pop();
                }
            }
        }
        kept.push(e);
    }
    let idx = grid
        .iter()
        .map(|g| kept.binary_search_by(|e| e.total_cmp(g)).unwrap_or_else(|i| i.min(kept.len() - 1)))
        .collect();
    (kept, idx)
}

enum Sampler {
    Quasistatic(f64),
    Ou(f64, f64),
    /// Tables are built one offset level at a time by the caller.
    OneOverF(OneOverFSynth),
    White(Vec<f64>),
}

impl Sampler {
    fn new(noise: &NoiseModel, edges: &[f64]) -> Result<Sampler> {
        Ok(match *noise {
            NoiseModel::Quasistatic { sigma } => Sampler::Quasistatic(sigma),
            NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => Sampler::Ou(sigma, tau_c),
            NoiseModel::OneOverF { sigma, omega_l, omega_h } => {
                Sampler::OneOverF(OneOverFSynth::new(sigma, omega_l, omega_h, DEFAULT_COMPONENTS, DEFAULT_OFFSET_LEVELS)?)
            }
            NoiseModel::White { diffusion } => {
                Sampler::White(edges.windows(2).map(|w| (diffusion / (w[1] - w[0])).sqrt()).collect())
            }
        })
    }

    fn sample(&self, seed: u64, stream: u64, edges: &[f64], table: Option<&CellTable>, out: &mut Vec<f64>) {
        let mut rng = rng_for(seed, stream);
        let cells = edges.len() - 1;
        match self {
            Sampler::Quasistatic(sigma) => {
                let x: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * sigma;
                out.clear();
                out.resize(cells, x);
            }
            Sampler::Ou(sigma, tau) => ou_cell_averages(*sigma, *tau, edges, &mut rng, out),
            Sampler::OneOverF(synth) => {
                let coeffs = synth.draw_coefficients(&mut rng);
                table.expect("offset table").averages_into(&coeffs, out);
            }
            Sampler::White(sd) => {
                out.clear();
                out.extend(sd.iter().map(|s| s * rng.sample::<f64, _>(rand_distr::StandardNormal)));
            }
        }
    }
}

/// Running mean and sum of squared deviations per time and entry.
#[derive(Clone)]
struct Accumulator {
    n: usize,
    mean: Vec<Mat3>,
    m2: Vec<Mat3>,
}

impl Accumulator {
    fn new(times: usize) -> Self {
        Accumulator { n: 0, mean: vec![Mat3::ZERO; times], m2: vec![Mat3::ZERO; times] }
    }

    fn push(&mut self, values: &[Mat3]) {
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        for ((mean, m2), x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(values) {
            for i in 0..3 {
                for j in 0..3 {
                    let d = x.0[i][j] - mean.0[i][j];
                    mean.0[i][j] += d * inv;
                    m2.0[i][j] += d * (x.0[i][j] - mean.0[i][j]);
                }
            }
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        for t in 0..self.mean.len() {
            for i in 0..3 {
                for j in 0..3 {
                    let d = other.mean[t].0[i][j] - self.mean[t].0[i][j];
                    self.mean[t].0[i][j] += d * nb / n;
                    self.m2[t].0[i][j] += other.m2[t].0[i][j] + d * d * na * nb / n;
                }
            }
        }
        self.n += other.n;
    }
}

/// Mean conjugation maps over `cfg.n_traj` realizations at each grid time.
pub fn exact_ensemble(noise: &NoiseModel, drive: &DriveProfile, cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    noise.validate()?;
    cfg.validate()?;
    let (edges, out_idx) = ensemble_edges(&cfg.grid, cfg.dt);
    let sampler = Sampler::new(noise, &edges)?;
    let coeffs = step_coefficients(drive, &edges);
    let frames: Vec<Rotor> = out_idx.iter().map(|&i| frame_rotor(drive.theta(edges[i]) - drive.theta(0.0))).collect();
    let batches = cfg.batches.min(cfg.n_traj);
    let bounds: Vec<(usize, usize)> =
        (0..batches).map(|b| (b * cfg.n_traj / batches, (b + 1) * cfg.n_traj / batches)).collect();

    // Trajectories `lo..hi` whose stream is `level` modulo `stride`.
    let run = |acc: &mut Accumulator, (lo, hi): (usize, usize), level: usize, stride: usize, table: Option<&CellTable>| {
        let mut eta = Vec::with_capacity(coeffs.len());
        let mut devs = vec![Mat3::ZERO; out_idx.len()];
        let first = lo + (level + stride - lo % stride) % stride;
        for n in (first..hi).step_by(stride) {
            sampler.sample(cfg.seed, n as u64, &edges, table, &mut eta);
            let mut u = Rotor::IDENTITY;
            let mut next = 0;
            // Outputs at edge 0.
            while next < out_idx.len() && out_idx[next] == 0 {
                devs[next] = (frames[next] * u).bloch_deviation();
                next += 1;
            }
            for (j, (&(hd, gdt), &e)) in coeffs.iter().zip(&eta).enumerate() {
                u = Rotor::exp([hd, 0.0, gdt * e]) * u;
                while next < out_idx.len() && out_idx[next] == j + 1 {
                    devs[next] = (frames[next] * u).bloch_deviation();
                    next += 1;
                }
                if next == out_idx.len() {
                    break;
                }
            }
            acc.push(&devs);
        }
    };
    let mut parts: Vec<Accumulator> = vec![Accumulator::new(out_idx.len()); bounds.len()];
    match &sampler {
        // Stream n uses offset level n mod L. Levels run in order so only one
        // table is alive and the accumulation order is fixed.
        Sampler::OneOverF(synth) => {
            for level in 0..synth.levels {
                let table = synth.cell_table(synth.level_offset(level), &edges);
                parts
                    .par_iter_mut()
                    .zip(&bounds)
                    .for_each(|(acc, &b)| run(acc, b, level, synth.levels, Some(&table)));
            }
        }
        _ => parts.par_iter_mut().zip(&bounds).for_each(|(acc, &b)| run(acc, b, 0, 1, None)),
    }

    let mut total = Accumulator::new(out_idx.len());
    for p in &parts {
        total.merge(p);
    }
    let n = total.n as f64;
    let maps = total
        .mean
        .iter()
        .zip(&cfg.grid)
        .map(|(m, &t)| QuantumMap::from_bloch_deviation(m, t, Provenance::ExactEnsemble))
        .collect();
    let std_err = total
        .m2
        .iter()
        .map(|m2| {
            if total.n < 2 {
                Mat3::ZERO
            } else {
                let mut s = Mat3::ZERO;
                for i in 0..3 {
                    for j in 0..3 {
                        s.0[i][j] = (m2.0[i][j].max(0.0) / (n - 1.0) / n).sqrt();
                    }
                }
                s
            }
        })
        .collect();
    Ok(EnsembleResult {
        maps,
        std_err,
        batch_means: parts.iter().map(|p| p.mean.clone()).collect(),
        batch_counts: parts.iter().map(|p| p.n).collect(),
        n_traj: cfg.n_traj,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_include_grid() {
        let dt = 0.1;
        let grid = [0.0, 0.25, 0.3 + 1e-6, 1.0];
        let (edges, idx) = ensemble_edges(&grid, dt);
        for (g, &i) in grid.iter().zip(&idx) {
            assert_eq!(edges[i], *g);
        }
        assert!(edges.windows(2).all(|w| w[1] - w[0] > 1e-4 * dt));
        assert_eq!(*edges.last().unwrap(), 1.0);
    }
}

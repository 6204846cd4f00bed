// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Spectral synthesis of 1/f noise.
//!
//! Each realization is `η(t) = Σ_k √v (α_k cos ω_k t + β_k sin ω_k t)` with
//! i.i.d. standard normal `α_k, β_k` and `M` log-spaced frequencies. Every
//! frequency sits at the same relative position `u` inside its logarithmic
//! bin. Drawing `u` uniformly per realization makes the ensemble covariance
//! exactly `2σ² ∫ cos(ωt) dω/ω` over the band. Ensembles instead stratify `u`
//! over `L` evenly spaced levels so one cell table serves many realizations;
//! that is a midpoint rule in `ln ω` with step `ln(ω_h/ω_l)/(M L)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const DEFAULT_COMPONENTS: usize = 512;
pub const DEFAULT_OFFSET_LEVELS: usize = 64;

#[derive(Clone, Debug)]
pub struct OneOverFSynth {
    pub sigma: f64,
    pub omega_l: f64,
    pub omega_h: f64,
    pub components: usize,
    pub levels: usize,
    log_ratio: f64,
}

/// Cell-average kernels for one offset level on a fixed set of step edges.
///
/// Row `j` holds `√v · sinc(ω_k Δ_j/2) · (cos ω_k m_j, sin ω_k m_j)`
/// interleaved over `k`, where `m_j` is the cell midpoint.
#[derive(Clone, Debug)]
pub struct CellTable {
    pub cells: usize,
    width: usize,
    data: Vec<f64>,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl OneOverFSynth {
    pub fn new(sigma: f64, omega_l: f64, omega_h: f64, components: usize, levels: usize) -> Result<Self> {
        if components == 0 || levels == 0 {
            return Err(Error::InvalidParameter("1/f synthesis needs at least one component and level".into()));
        }
        if !(omega_l > 0.0 && omega_h > omega_l && omega_h.is_finite()) {
            return Err(Error::InvalidParameter(format!("1/f band [{omega_l}, {omega_h}] is invalid")));
        }
        let log_ratio = (omega_h / omega_l).ln() / components as f64;
        Ok(OneOverFSynth { sigma, omega_l, omega_h, components, levels, log_ratio })
    }

    /// Variance carried by each component.
    pub fn component_variance(&self) -> f64 {
        2.0 * self.sigma * self.sigma * self.log_ratio
    }

    /// Offset of level `level` inside each bin.
    pub fn level_offset(&self, level: usize) -> f64 {
        (level as f64 + 0.5) / self.levels as f64
    }

    pub fn frequencies(&self, level: usize) -> Vec<f64> {
        self.frequencies_at(self.level_offset(level))
    }

    /// Frequencies at relative bin offset `u ∈ [0, 1)`.
    pub fn frequencies_at(&self, u: f64) -> Vec<f64> {
        (0..self.components)
            .map(|k| self.omega_l * ((k as f64 + u) * self.log_ratio).exp())
            .collect()
    }

    /// Ensemble covariance `E[η(t)η(0)]` of the synthesized process, averaged
    /// over offset levels.
    pub fn covariance(&self, t: f64) -> f64 {
        let v = self.component_variance();
        let total: f64 = (0..self.levels)
            .map(|l| self.frequencies(l).iter().map(|w| (w * t).cos()).sum::<f64>())
            .sum();
        v * total / self.levels as f64
    }

    /// Continuous bin offset for a single realization.
    pub fn draw_offset(&self, rng: &mut impl Rng) -> f64 {
        rng.gen::<f64>()
    }

    /// Draws `2M` standard normal coefficients `(α_k, β_k)` interleaved.
    pub fn draw_coefficients(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..2 * self.components).map(|_| rng.sample(StandardNormal)).collect()
    }

    /// `η(t)` at bin offset `u`.
    pub fn evaluate(&self, u: f64, coeffs: &[f64], t: f64) -> f64 {
        let a = self.component_variance().sqrt();
        self.frequencies_at(u)
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let (s, c) = (w * t).sin_cos();
                coeffs[2 * k] * c + coeffs[2 * k + 1] * s
            })
            .sum::<f64>()
            * a
    }

    /// Cell-average kernels at bin offset `u`.
    pub fn cell_table(&self, u: f64, edges: &[f64]) -> CellTable {
        let a = self.component_variance().sqrt();
        let freqs = self.frequencies_at(u);
        let cells = edges.len().saturating_sub(1);
        let width = 2 * self.components;
        let mut data = vec![0.0; cells * width];
        for j in 0..cells {
            let d = edges[j + 1] - edges[j];
            let m = 0.5 * (edges[j + 1] + edges[j]);
            let row = &mut data[j * width..(j + 1) * width];
            for (k, w) in freqs.iter().enumerate() {
                let g = a * sinc(0.5 * w * d);
                let (s, c) = (w * m).sin_cos();
                row[2 * k] = g * c;
                row[2 * k + 1] = g * s;
            }
        }
        CellTable { cells, width, data }
    }
}

impl CellTable {
    /// Cell averages of the realization with the given coefficients.
    pub fn averages_into(&self, coeffs: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.data.chunks_exact(self.width).map(|row| {
            row.iter().zip(coeffs).map(|(r, c)| r * c).sum::<f64>()
        }));
    }
}

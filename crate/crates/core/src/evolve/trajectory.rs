// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact propagator of one noise realization.
//!
//! In the rotating frame each step applies
//! `exp(−i(Δθ/2 σx + g η̄ Δt σz))` with the step-averaged η̄; the result is
//! moved to the interaction frame with `U₀(θ)† = exp(iθσx/2)`.

use super::{Provenance, QuantumMap};
use crate::error::{Error, Result};
use crate::noise::{NoiseTrajectory, SampleKind};
use crate::plme::DriveProfile;
use crate::qmath::Rotor;

/// Per-step rotating-frame exponents `(Δθ/2, g(t_mid)·Δt)` on `edges`.
pub(crate) fn step_coefficients(drive: &DriveProfile, edges: &[f64]) -> Vec<(f64, f64)> {
    edges
        .windows(2)
        .map(|w| {
            let dtheta = drive.theta(w[1]) - drive.theta(w[0]);
            (0.5 * dtheta, drive.coupling(0.5 * (w[0] + w[1])) * (w[1] - w[0]))
        })
        .collect()
}

/// `U₀(θ)† = exp(iθσx/2)`.
pub(crate) fn frame_rotor(theta: f64) -> Rotor {
    Rotor::exp([-0.5 * theta, 0.0, 0.0])
}

/// Step values: cell averages as given, point samples averaged over each
/// step's endpoints.
fn step_values(traj: &NoiseTrajectory) -> Result<Vec<f64>> {
    match traj.kind {
        SampleKind::CellAverage => {
            if traj.values.len() + 1 != traj.grid.len() {
                return Err(Error::InvalidParameter("cell-average trajectory needs one more edge than values".into()));
            }
            Ok(traj.values.clone())
        }
        SampleKind::Point => {
            if traj.values.len() != traj.grid.len() {
                return Err(Error::InvalidParameter("point trajectory needs one value per grid point".into()));
            }
            Ok(traj.values.windows(2).map(|v| 0.5 * (v[0] + v[1])).collect())
        }
    }
}

/// Interaction-frame rotors at every grid point of the trajectory.
pub fn trajectory_rotors(traj: &NoiseTrajectory, drive: &DriveProfile) -> Result<Vec<Rotor>> {
    let edges = &traj.grid;
    if edges.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    }
    if edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("trajectory grid must be strictly increasing".into()));
    }
    let values = step_values(traj)?;
    let coeffs = step_coefficients(drive, edges);
    let mut u = Rotor::IDENTITY;
    let t_start = edges[0];
    let theta0 = drive.theta(t_start);
    let mut out = Vec::with_capacity(edges.len());
    out.push(Rotor::IDENTITY);
    for (j, (&(half_dtheta, gdt), &eta)) in coeffs.iter().zip(&values).enumerate() {
        u = Rotor::exp([half_dtheta, 0.0, gdt * eta]) * u;
        // Interaction frame relative to the start of the trajectory.
        let frame = frame_rotor(drive.theta(edges[j + 1]) - theta0);
        out.push(frame * u);
    }
    Ok(out)
}

/// Conjugation map of the realization from the first to the last grid time.
pub fn exact_trajectory(traj: &NoiseTrajectory, drive: &DriveProfile) -> Result<QuantumMap> {
    let rotors = trajectory_rotors(traj, drive)?;
    let t = *traj.grid.last().unwrap_or(&0.0);
    let u = rotors.last().copied().unwrap_or(Rotor::IDENTITY);
    Ok(QuantumMap::from_rotor(&u, t, Provenance::ExactEnsemble))
}

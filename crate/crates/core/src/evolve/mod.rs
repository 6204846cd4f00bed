// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution in the interaction frame of the drive: generator
//! propagation, exact single-realization propagators, Monte Carlo ensembles
//! and the Gauss–Hermite exact map for quasistatic noise.

pub mod cache;
mod ensemble;
mod integrate;
mod quasistatic;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::plme::{
    fourth_order_generator, plme_liouvillian, plme_params_closed, plme_params_quadrature, zeroth_order_liouvillian,
    DriveProfile, OneOverFKernel, Order, QuadratureOptions, R4Options,
};
use crate::qmath::{min_eigenvalue, Basis, Mat3, Operator2, Rotor, Superoperator};

pub use ensemble::{ensemble_edges, exact_ensemble, EnsembleConfig, EnsembleResult, DEFAULT_BATCHES, DEFAULT_DT};
pub use integrate::{propagate_generator, propagate_series, RkOptions};
pub use quasistatic::{interaction_rotor, quasistatic_exact_map, quasistatic_exact_series};
pub use trajectory::{exact_trajectory, trajectory_rotors};

/// How a [`QuantumMap`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[serde(rename = "plme2")]
    Plme2,
    #[serde(rename = "plme4")]
    Plme4,
    ZerothOrder,
    ExactEnsemble,
    ExactQuadrature,
}

impl Provenance {
    pub fn for_order(order: Order) -> Provenance {
        match order {
            Order::Zeroth => Provenance::ZerothOrder,
            Order::Second => Provenance::Plme2,
            Order::Fourth => Provenance::Plme4,
        }
    }
}

/// Evolution map `V(t)` acting on `ρ(0)`.
///
/// Maps near the identity lose precision when stored as `V` alone, so the
/// deviation `W = V − I` is carried as the primary quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumMap {
    /// Column-stacking `V = I + W`.
    pub superop: Superoperator,
    /// Column-stacking `W`.
    pub deviation: Superoperator,
    pub t: f64,
    pub provenance: Provenance,
}

impl QuantumMap {
    pub fn identity(t: f64, provenance: Provenance) -> QuantumMap {
        QuantumMap::from_deviation(&Superoperator::zero(Basis::ColumnStacking), t, provenance)
    }

    pub fn from_deviation(deviation: &Superoperator, t: f64, provenance: Provenance) -> QuantumMap {
        let deviation = deviation.to_basis(Basis::ColumnStacking);
        let superop = Superoperator::identity(Basis::ColumnStacking).add(&deviation);
        QuantumMap { superop, deviation, t, provenance }
    }

    pub fn from_superop(superop: &Superoperator, t: f64, provenance: Provenance) -> QuantumMap {
        let superop = superop.to_basis(Basis::ColumnStacking);
        let deviation = superop.sub(&Superoperator::identity(Basis::ColumnStacking));
        QuantumMap { superop, deviation, t, provenance }
    }

    /// Unital, trace-preserving map with Bloch block `I + m`.
    pub fn from_bloch_deviation(m: &Mat3, t: f64, provenance: Provenance) -> QuantumMap {
        QuantumMap::from_deviation(&Superoperator::from_bloch(m, [0.0; 3], 0.0), t, provenance)
    }

    /// Conjugation `ρ ↦ UρU†`.
    pub fn from_rotor(u: &Rotor, t: f64, provenance: Provenance) -> QuantumMap {
        QuantumMap::from_bloch_deviation(&u.bloch_deviation(), t, provenance)
    }

    pub fn apply(&self, x: &Operator2) -> Operator2 {
        *x + self.deviation.apply(x)
    }

    /// Largest deviation from trace preservation.
    pub fn trace_defect(&self) -> f64 {
        self.deviation.trace_defect(0.0)
    }
}

/// `ρ(t) = V(t) ρ₀`; `ρ₀` must be a density matrix to 1e-8.
pub fn evolve_state(map: &QuantumMap, rho0: &Operator2) -> Result<Operator2> {
    const TOL: f64 = 1e-8;
    if !rho0.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    let herm = rho0.hermiticity_defect();
    if herm > TOL {
        return Err(Error::NotDensityMatrix(format!("Hermiticity defect {herm:.3e}")));
    }
    let tr = rho0.trace();
    if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    let lmin = min_eigenvalue(&rho0.hermitian_part())?;
    if lmin < -TOL {
        return Err(Error::NotDensityMatrix(format!("eigenvalue {lmin:.3e}")));
    }
    Ok(map.apply(rho0))
}

/// `Re Tr(ρ O)`.
pub fn expectation(rho: &Operator2, o: &Operator2) -> f64 {
    (*rho * *o).trace().re
}

/// Options for [`plme_generator`].
#[derive(Clone, Copy, Debug, Default)]
pub struct GeneratorOptions {
    pub quad: QuadratureOptions,
    pub r4: R4Options,
}

/// Time-dependent generator of the requested order.
///
/// The second order uses the closed forms when the drive is constant and
/// they exist (quasistatic, Ornstein–Uhlenbeck, white, and 1/f with the
/// simplified kernel), and kernel quadrature otherwise.
pub fn plme_generator<'a>(
    noise: &'a NoiseModel,
    drive: &'a DriveProfile,
    order: Order,
    opts: &'a GeneratorOptions,
) -> impl Fn(f64) -> Result<Superoperator> + 'a {
    // Memory kernels give a vanishing generator at t = 0; white noise does not.
    let starts_at_zero = !matches!(noise, NoiseModel::White { .. });
    move |t: f64| {
        if t == 0.0 && starts_at_zero {
            return Ok(Superoperator::zero(Basis::ColumnStacking));
        }
        match order {
            Order::Zeroth => zeroth_order_liouvillian(noise, drive, t),
            Order::Second => {
                let closed = match noise {
                    NoiseModel::OneOverF { .. } => opts.quad.one_over_f == OneOverFKernel::Simplified,
                    _ => true,
                };
                let p = match drive.constant_omega() {
                    Some(w) if closed && w > 0.0 => plme_params_closed(noise, w, t)?,
                    _ => plme_params_quadrature(noise, drive, t, &opts.quad)?,
                };
                Ok(plme_liouvillian(&p))
            }
            Order::Fourth => fourth_order_generator(noise, drive, t, &opts.quad, &opts.r4),
        }
    }
}

/// Maps of the given order at each of `times` (ascending, from 0).
pub fn plme_maps(
    noise: &NoiseModel,
    drive: &DriveProfile,
    order: Order,
    times: &[f64],
    gen: &GeneratorOptions,
    rk: &RkOptions,
) -> Result<Vec<QuantumMap>> {
    let l = plme_generator(noise, drive, order, gen);
    propagate_series(&l, 0.0, times, rk, Provenance::for_order(order))
}

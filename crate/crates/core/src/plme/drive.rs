// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::sync::Arc;

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Drive `Ω(t)`, its integrated angle `θ(t) = ∫₀ᵗ Ω`, and the noise
/// coupling `g(t)`.
#[derive(Clone)]
pub struct DriveProfile {
    omega: TimeFn,
    theta: TimeFn,
    coupling: TimeFn,
    constant: Option<f64>,
}

impl fmt::Debug for DriveProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constant {
            Some(w) => write!(f, "DriveProfile::constant({w})"),
            None => write!(f, "DriveProfile::custom"),
        }
    }
}

impl DriveProfile {
    /// Constant Rabi frequency with unit coupling.
    pub fn constant(omega: f64) -> Self {
        DriveProfile {
            omega: Arc::new(move |_| omega),
            theta: Arc::new(move |t| omega * t),
            coupling: Arc::new(|_| 1.0),
            constant: Some(omega),
        }
    }

    /// Arbitrary profile. `theta` must be the antiderivative of `omega` with
    /// `theta(0) = 0`.
    pub fn custom(
        omega: impl Fn(f64) -> f64 + Send + Sync + 'static,
        theta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        coupling: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        DriveProfile { omega: Arc::new(omega), theta: Arc::new(theta), coupling: Arc::new(coupling), constant: None }
    }

    pub fn omega(&self, t: f64) -> f64 {
        (self.omega)(t)
    }

    pub fn theta(&self, t: f64) -> f64 {
        (self.theta)(t)
    }

    pub fn coupling(&self, t: f64) -> f64 {
        (self.coupling)(t)
    }

    /// `Some(Ω)` for a constant drive with unit coupling.
    pub fn constant_omega(&self) -> Option<f64> {
        self.constant
    }

    /// Bloch vector `a(t)` of `A(t) = a·σ`.
    pub fn coupling_vector(&self, t: f64) -> [f64; 3] {
        let g = self.coupling(t);
        let (s, c) = self.theta(t).sin_cos();
        [0.0, g * s, g * c]
    }
}

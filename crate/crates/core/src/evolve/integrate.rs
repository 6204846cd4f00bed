// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) integration of `∂ₜV = L(t) V`, written for the
//! deviation `W = V − I` so that maps near the identity keep full relative
//! precision.

use super::{Provenance, QuantumMap};
use crate::error::{Error, Result};
use crate::qmath::{Basis, Mat, Superoperator};

#[derive(Clone, Copy, Debug)]
pub struct RkOptions {
    pub rtol: f64,
    /// Absolute floor on the error scale.
    pub atol: f64,
    /// First trial step; `|t1 − t0|/64` when `None`.
    pub h_init: Option<f64>,
    /// Upper bound on the step.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions { rtol: 1e-9, atol: 1e-300, h_init: None, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

impl RkOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        RkOptions { rtol, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || !(self.atol >= 0.0) || !(self.h_max > 0.0) {
            return Err(Error::InvalidParameter("RK tolerances and h_max must be positive".into()));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// 5th minus 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type M4 = Mat<4>;

/// Length of the initial Magnus segment relative to the propagation span.
const START_FRACTION: f64 = 1e-10;

struct Stepper<'a, F> {
    l: &'a F,
    opts: RkOptions,
    t: f64,
    w: M4,
    h: f64,
    /// `L(t)(I + W)` at the current state (first-same-as-last).
    k0: Option<M4>,
    steps: usize,
}

impl<'a, F> Stepper<'a, F>
where
    F: Fn(f64) -> Result<Superoperator>,
{
    fn rhs(&self, t: f64, w: &M4) -> Result<M4> {
        let l = (self.l)(t)?.column_stacking();
        let r = l + l * *w;
        if !r.is_finite() {
            return Err(Error::NonFinite("generator"));
        }
        Ok(r)
    }

    /// Covers `[t, t + hs]` from `W = 0` with a second-order Magnus step.
    /// Unlike the embedded pair this needs no smoothness of `L` at the start,
    /// so integrable singularities such as `L ~ t ln t` are harmless.
    fn start(&mut self, hs: f64) -> Result<()> {
        let l0 = (self.l)(self.t)?.column_stacking();
        let l1 = (self.l)(self.t + hs)?.column_stacking();
        let m = (l0 + l1) * (0.5 * hs);
        let w = m + m * m * 0.5;
        if !w.is_finite() {
            return Err(Error::NonFinite("generator"));
        }
        self.t += hs;
        self.w = w;
        Ok(())
    }

    /// Advances to exactly `t1`.
    fn advance_to(&mut self, t1: f64) -> Result<()> {
        let dir = if t1 >= self.t { 1.0 } else { -1.0 };
        while (t1 - self.t) * dir > 0.0 {
            if self.steps >= self.opts.max_steps {
                return Err(Error::NonConvergence(format!(
                    "RK45 exceeded {} steps at t = {}",
                    self.opts.max_steps, self.t
                )));
            }
            let remaining = (t1 - self.t).abs();
            let mut h = self.h.min(self.opts.h_max);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            let floor = 1e-13 * self.t.abs().max(1.0);
            if h < floor && !last {
                return Err(Error::StepUnderflow { t: self.t });
            }
            let k0 = match self.k0 {
                Some(k) => k,
                None => self.rhs(self.t, &self.w)?,
            };
            let mut k = [M4::zeros(); 7];
            k[0] = k0;
            let hs = h * dir;
            for s in 1..7 {
                let mut y = self.w;
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        y += *kj * (hs * A[s][j]);
                    }
                }
                k[s] = self.rhs(self.t + C[s] * hs, &y)?;
            }
            // Stage 7 is evaluated at the 5th-order solution.
            let mut w_new = self.w;
            for (j, kj) in k.iter().enumerate().take(6) {
                if A[6][j] != 0.0 {
                    w_new += *kj * (hs * A[6][j]);
                }
            }
            let mut err = M4::zeros();
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    err += *kj * (hs * E[j]);
                }
            }
            let scale = self.opts.atol + self.opts.rtol * self.w.max_abs().max(w_new.max_abs());
            let ratio = if scale > 0.0 { err.max_abs() / scale } else { f64::INFINITY };
            self.steps += 1;
            if ratio <= 1.0 {
                self.t = if last { t1 } else { self.t + hs };
                self.w = w_new;
                self.k0 = Some(k[6]);
                let fac = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                // A clipped final step says nothing about the natural size.
                if !last || fac < 1.0 {
                    self.h = h * fac;
                }
            } else {
                if !ratio.is_finite() {
                    return Err(Error::NonFinite("RK45 error estimate"));
                }
                self.h = h * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
                if self.h < floor {
                    return Err(Error::StepUnderflow { t: self.t });
                }
            }
        }
        Ok(())
    }
}

/// Time-ordered solution of `∂ₜV = L(t)V`, `V(t0) = I`, at each of `times`
/// (monotone in the direction away from `t0`).
pub fn propagate_series<F>(
    l: &F,
    t0: f64,
    times: &[f64],
    opts: &RkOptions,
    provenance: Provenance,
) -> Result<Vec<QuantumMap>>
where
    F: Fn(f64) -> Result<Superoperator>,
{
    opts.validate()?;
    if !t0.is_finite() || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("propagation times"));
    }
    let Some(&t_end) = times.last() else { return Ok(Vec::new()) };
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut prev = t0;
    for &t in times {
        if (t - prev) * dir < 0.0 {
            return Err(Error::InvalidParameter("output times must be monotone away from t0".into()));
        }
        prev = t;
    }
    let span = (t_end - t0).abs();
    let h0 = opts.h_init.unwrap_or(span / 64.0).max(1e-10 * span).min(opts.h_max);
    let mut st = Stepper { l, opts: *opts, t: t0, w: M4::zeros(), h: if h0 > 0.0 { h0 } else { 1.0 }, k0: None, steps: 0 };
    // Outputs at t0 itself are the identity.
    let at_origin = times.iter().take_while(|&&t| t == t0).count();
    let mut out: Vec<QuantumMap> = (0..at_origin).map(|_| QuantumMap::identity(t0, provenance)).collect();
    if let Some(&first) = times.get(at_origin) {
        st.start((START_FRACTION * span).min((first - t0).abs()) * dir)?;
    }
    for &t in &times[at_origin..] {
        st.advance_to(t)?;
        out.push(QuantumMap::from_deviation(&Superoperator::new(st.w, Basis::ColumnStacking), t, provenance));
    }
    Ok(out)
}

/// Map from `t0` to `t1`.
pub fn propagate_generator<F>(l: &F, t0: f64, t1: f64, opts: &RkOptions, provenance: Provenance) -> Result<QuantumMap>
where
    F: Fn(f64) -> Result<Superoperator>,
{
    Ok(propagate_series(l, t0, &[t1], opts, provenance)?.remove(0))
}

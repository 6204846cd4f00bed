// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! C interface to `plme-lab`.
//!
//! Objects cross the boundary as opaque handles created by `plme_*_new` style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`PlmeStatus`]; on failure the message is kept per thread and
//! read with [`plme_last_error`]. Panics are caught and reported as
//! `PLME_STATUS_INTERNAL`.
//!
//! Units follow the library: frequencies in units of the Rabi frequency `Ω`,
//! times in units of `1/Ω`. Superoperators are 4×4 column-stacking matrices
//! stored row-major as separate real and imaginary arrays of 16 doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plme_lab::channel::{canonical_decompose, diamond_distance, projected_rates, DiamondOptions};
use plme_lab::evolve::{
    exact_ensemble, plme_maps, quasistatic_exact_series, EnsembleConfig, GeneratorOptions, QuantumMap, RkOptions,
};
use plme_lab::noise::NoiseModel;
use plme_lab::plme::{
    fourth_order_generator, plme_params_closed, plme_params_quadrature, DriveProfile, Order, QuadratureOptions, R4Options,
};
use plme_lab::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlmeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Internal = 4,
}

/// Noise model handle.
pub struct PlmeNoise(NoiseModel);

/// Time series of maps handle.
pub struct PlmeMapSeries {
    maps: Vec<QuantumMap>,
    /// Standard errors of the Bloch block, row-major 3×3 per time; empty
    /// unless the series is a Monte Carlo ensemble.
    std_err: Vec<[f64; 9]>,
}

/// Second- or fourth-order PLME parameters at one time.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlmeParamsC {
    pub t: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Zero for order 2.
    pub gamma_x: f64,
    pub phi: f64,
    pub h_ren_coeff: f64,
    pub theta_tilde: f64,
    pub order: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: PlmeStatus, msg: impl Into<String>) -> PlmeStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> PlmeStatus {
    let status = if e.is_numerical() { PlmeStatus::Numerical } else { PlmeStatus::InvalidArgument };
    fail(status, e.to_string())
}

/// Runs `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), PlmeStatus>) -> PlmeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PlmeStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(PlmeStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

fn lib<T>(r: plme_lab::Result<T>) -> Result<T, PlmeStatus> {
    r.map_err(from_error)
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, PlmeStatus> {
    p.as_ref().ok_or_else(|| fail(PlmeStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], PlmeStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(PlmeStatus::NullPointer, format!("{what} is NULL")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), PlmeStatus> {
    if out.is_null() {
        return Err(fail(PlmeStatus::NullPointer, "output pointer is NULL"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn plme_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn plme_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

unsafe fn new_noise(model: NoiseModel, out: *mut *mut PlmeNoise) -> PlmeStatus {
    guard(|| {
        lib(model.validate())?;
        write_out(out, PlmeNoise(model))
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn plme_noise_quasistatic(sigma: f64, out: *mut *mut PlmeNoise) -> PlmeStatus {
    new_noise(NoiseModel::Quasistatic { sigma }, out)
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn plme_noise_ornstein_uhlenbeck(sigma: f64, tau_c: f64, out: *mut *mut PlmeNoise) -> PlmeStatus {
    new_noise(NoiseModel::OrnsteinUhlenbeck { sigma, tau_c }, out)
}

/// `omega_h` bounds the sampled spectrum; analytic parameters use `ω_h → ∞`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn plme_noise_one_over_f(sigma: f64, omega_l: f64, omega_h: f64, out: *mut *mut PlmeNoise) -> PlmeStatus {
    new_noise(NoiseModel::OneOverF { sigma, omega_l, omega_h }, out)
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn plme_noise_white(diffusion: f64, out: *mut *mut PlmeNoise) -> PlmeStatus {
    new_noise(NoiseModel::White { diffusion }, out)
}

/// # Safety
/// `noise` must be NULL or a handle from a `plme_noise_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn plme_noise_free(noise: *mut PlmeNoise) {
    if !noise.is_null() {
        drop(Box::from_raw(noise));
    }
}

/// Autocorrelation `S(t)` of the noise.
///
/// # Safety
/// `noise` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn plme_noise_autocorr(noise: *const PlmeNoise, t: f64, out: *mut f64) -> PlmeStatus {
    guard(|| {
        let n = deref(noise, "noise")?;
        if out.is_null() {
            return Err(fail(PlmeStatus::NullPointer, "out is NULL"));
        }
        *out = lib(n.0.autocorr(t))?;
        Ok(())
    })
}

fn order_of(order: i32) -> Result<Order, PlmeStatus> {
    match order {
        0 => Ok(Order::Zeroth),
        2 => Ok(Order::Second),
        4 => Ok(Order::Fourth),
        _ => Err(fail(PlmeStatus::InvalidArgument, format!("order must be 0, 2 or 4, got {order}"))),
    }
}

/// PLME parameters at time `t` for constant drive `omega`. `order` is 2 or 4;
/// with 4, `gamma_x` is the weight of `D[σx]` in the fourth-order generator.
///
/// # Safety
/// `noise` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn plme_params(noise: *const PlmeNoise, omega: f64, t: f64, order: i32, out: *mut PlmeParamsC) -> PlmeStatus {
    guard(|| {
        let n = &deref(noise, "noise")?.0;
        if out.is_null() {
            return Err(fail(PlmeStatus::NullPointer, "out is NULL"));
        }
        if order != 2 && order != 4 {
            return Err(fail(PlmeStatus::InvalidArgument, format!("order must be 2 or 4, got {order}")));
        }
        let drive = DriveProfile::constant(omega);
        let quad = QuadratureOptions::default();
        let p = match n {
            NoiseModel::OneOverF { .. } => lib(plme_params_quadrature(n, &drive, t, &quad))?,
            _ => lib(plme_params_closed(n, omega, t))?,
        };
        let gamma_x = if order == 4 {
            let l = lib(fourth_order_generator(n, &drive, t, &quad, &R4Options::default()))?;
            let g = lib(canonical_decompose(&l))?;
            projected_rates(&g, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])[0]
        } else {
            0.0
        };
        *out = PlmeParamsC {
            t,
            gamma_plus: p.gamma_plus,
            gamma_minus: p.gamma_minus,
            gamma_x,
            phi: p.phi,
            h_ren_coeff: p.h_ren_coeff,
            theta_tilde: p.theta_tilde(),
            order,
        };
        Ok(())
    })
}

fn series(maps: Vec<QuantumMap>) -> PlmeMapSeries {
    PlmeMapSeries { maps, std_err: Vec::new() }
}

/// Maps of order 0, 2 or 4 under constant drive `omega` at `n_times`
/// ascending `times`, integrated to relative tolerance `rtol`.
///
/// # Safety
/// `noise` must be a live handle, `times` must point to `n_times` doubles and
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn plme_maps_compute(
    noise: *const PlmeNoise,
    omega: f64,
    order: i32,
    times: *const f64,
    n_times: usize,
    rtol: f64,
    out: *mut *mut PlmeMapSeries,
) -> PlmeStatus {
    guard(|| {
        let n = &deref(noise, "noise")?.0;
        let ts = slice(times, n_times, "times")?;
        let order = order_of(order)?;
        let maps = lib(plme_maps(n, &DriveProfile::constant(omega), order, ts, &GeneratorOptions::default(), &RkOptions::with_rtol(rtol)))?;
        write_out(out, series(maps))
    })
}

/// Monte Carlo mean maps over `n_traj` realizations with step `dt` and `seed`.
///
/// # Safety
/// As for [`plme_maps_compute`].
#[no_mangle]
pub unsafe extern "C" fn plme_exact_ensemble(
    noise: *const PlmeNoise,
    omega: f64,
    n_traj: usize,
    dt: f64,
    seed: u64,
    times: *const f64,
    n_times: usize,
    out: *mut *mut PlmeMapSeries,
) -> PlmeStatus {
    guard(|| {
        let n = &deref(noise, "noise")?.0;
        let ts = slice(times, n_times, "times")?;
        let cfg = EnsembleConfig::new(n_traj, dt, seed, ts.to_vec());
        let e = lib(exact_ensemble(n, &DriveProfile::constant(omega), &cfg))?;
        let std_err = e.std_err.iter().map(|m| std::array::from_fn(|k| m.0[k / 3][k % 3])).collect();
        write_out(out, PlmeMapSeries { maps: e.maps, std_err })
    })
}

/// Gauss–Hermite exact maps for quasistatic noise of strength `sigma`.
///
/// # Safety
/// `times` must point to `n_times` doubles and `out` must be valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn plme_quasistatic_exact(
    sigma: f64,
    omega: f64,
    times: *const f64,
    n_times: usize,
    nodes: usize,
    out: *mut *mut PlmeMapSeries,
) -> PlmeStatus {
    guard(|| {
        let ts = slice(times, n_times, "times")?;
        write_out(out, series(lib(quasistatic_exact_series(sigma, omega, ts, nodes))?))
    })
}

/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plme_map_series_free(series: *mut PlmeMapSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of maps in the series; 0 for NULL.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plme_map_series_len(series: *const PlmeMapSeries) -> usize {
    series.as_ref().map_or(0, |s| s.maps.len())
}

unsafe fn entry<'a>(series: *const PlmeMapSeries, k: usize) -> Result<(&'a PlmeMapSeries, &'a QuantumMap), PlmeStatus> {
    let s = deref(series, "series")?;
    match s.maps.get(k) {
        Some(m) => Ok((s, m)),
        None => Err(fail(PlmeStatus::InvalidArgument, format!("index {k} out of range for {} maps", s.maps.len()))),
    }
}

/// Time of map `k`.
///
/// # Safety
/// `series` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn plme_map_series_time(series: *const PlmeMapSeries, k: usize, out: *mut f64) -> PlmeStatus {
    guard(|| {
        let (_, m) = entry(series, k)?;
        if out.is_null() {
            return Err(fail(PlmeStatus::NullPointer, "out is NULL"));
        }
        *out = m.t;
        Ok(())
    })
}

unsafe fn write_matrix(m: &plme_lab::qmath::Superoperator, re: *mut f64, im: *mut f64) -> Result<(), PlmeStatus> {
    if re.is_null() || im.is_null() {
        return Err(fail(PlmeStatus::NullPointer, "output array is NULL"));
    }
    let m = m.column_stacking();
    for i in 0..4 {
        for j in 0..4 {
            *re.add(4 * i + j) = m[(i, j)].re;
            *im.add(4 * i + j) = m[(i, j)].im;
        }
    }
    Ok(())
}

/// Superoperator `V(t_k)`, written to `re[16]` and `im[16]`.
///
/// # Safety
/// `series` must be a live handle; `re` and `im` must each hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn plme_map_series_superop(series: *const PlmeMapSeries, k: usize, re: *mut f64, im: *mut f64) -> PlmeStatus {
    guard(|| write_matrix(&entry(series, k)?.1.superop, re, im))
}

/// Deviation `V(t_k) − I`; accurate where `V` is close to the identity.
///
/// # Safety
/// As for [`plme_map_series_superop`].
#[no_mangle]
pub unsafe extern "C" fn plme_map_series_deviation(series: *const PlmeMapSeries, k: usize, re: *mut f64, im: *mut f64) -> PlmeStatus {
    guard(|| write_matrix(&entry(series, k)?.1.deviation, re, im))
}

/// Standard errors of the Bloch block of map `k`, row-major, 9 doubles.
/// Fails unless the series came from [`plme_exact_ensemble`].
///
/// # Safety
/// `series` must be a live handle and `out` must hold 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn plme_map_series_std_err(series: *const PlmeMapSeries, k: usize, out: *mut f64) -> PlmeStatus {
    guard(|| {
        let (s, _) = entry(series, k)?;
        let Some(se) = s.std_err.get(k) else {
            return Err(fail(PlmeStatus::InvalidArgument, "series has no standard errors"));
        };
        if out.is_null() {
            return Err(fail(PlmeStatus::NullPointer, "out is NULL"));
        }
        ptr::copy_nonoverlapping(se.as_ptr(), out, 9);
        Ok(())
    })
}

/// Diamond-norm distance between map `ka` of `a` and map `kb` of `b`.
///
/// # Safety
/// `a` and `b` must be live handles and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn plme_diamond_distance(
    a: *const PlmeMapSeries,
    ka: usize,
    b: *const PlmeMapSeries,
    kb: usize,
    out: *mut f64,
) -> PlmeStatus {
    guard(|| {
        let (_, ma) = entry(a, ka)?;
        let (_, mb) = entry(b, kb)?;
        if out.is_null() {
            return Err(fail(PlmeStatus::NullPointer, "out is NULL"));
        }
        *out = lib(diamond_distance(ma, mb, &DiamondOptions::default()))?;
        Ok(())
    })
}

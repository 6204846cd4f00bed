// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! The computations behind each scenario. Everything here is in units of
//! `Ω = 1` and returns in-memory tables; file handling lives in the parent
//! module.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, Scenario};
use crate::channel::{
    canonical_decompose, channel_distance, default_generator_dt, instantaneous_generator, instantaneous_generator_with,
    match_rates, nonphysical_state_scan, projected_rates, plme_label_directions, process_matrix, ChannelDistance,
    DiamondOptions,
};
use crate::error::{Error, Result};
use crate::evolve::cache::{read_ensemble, write_ensemble};
use crate::evolve::{
    evolve_state, exact_ensemble, plme_maps, quasistatic_exact_map, quasistatic_exact_series, EnsembleConfig,
    EnsembleResult, GeneratorOptions, QuantumMap, RkOptions,
};
use crate::noise::NoiseModel;
use crate::plme::{gamma_x_closed, plme_params_closed, DriveProfile, Order, PlmeParams};
use crate::qmath::density_from_bloch;

/// Gauss–Hermite nodes for the exact quasistatic map.
pub const EXACT_NODES: usize = 40;
/// Integrator tolerance for the short-time scenario, where errors reach 1e-14.
const SHORT_TIME_RTOL: f64 = 1e-13;
/// Level at which the error scenario reports threshold crossings.
pub const ERROR_THRESHOLD: f64 = 1e-3;

/// Named columns of `f64` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Empty for the primary table of a scenario.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Table {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Rows whose `key` column equals `value`.
    pub fn filter(&self, key: &str, value: f64) -> Table {
        let j = self.columns.iter().position(|c| c == key).expect("filter column exists");
        Table {
            name: self.name.clone(),
            columns: self.columns.clone(),
            rows: self.rows.iter().filter(|r| r[j] == value).cloned().collect(),
        }
    }
}

/// Whether an ensemble came from the cache.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleUse {
    pub key: String,
    pub path: Option<PathBuf>,
    pub reused: bool,
    pub n_traj: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    /// The first table is the primary output.
    pub tables: Vec<Table>,
    pub summary: Value,
    pub ensembles: Vec<EnsembleUse>,
}

impl ScenarioOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Ensemble source, optionally backed by an on-disk cache.
#[derive(Clone, Debug, Default)]
pub struct EnsembleStore {
    pub dir: Option<PathBuf>,
}

const CACHE_FORMAT: &str = "PLMEMAP1";

impl EnsembleStore {
    pub fn new(dir: Option<PathBuf>) -> Self {
        EnsembleStore { dir }
    }

    /// Content key of an ensemble request.
    pub fn key(noise: &NoiseModel, cfg: &EnsembleConfig) -> String {
        let v = json!({ "format": CACHE_FORMAT, "noise": noise, "ensemble": cfg });
        let digest = Sha256::digest(v.to_string().as_bytes());
        hex::encode(&digest[..8])
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("ensemble_{key}.bin")))
    }

    fn matches(ens: &EnsembleResult, cfg: &EnsembleConfig) -> bool {
        ens.n_traj == cfg.n_traj
            && ens.seed == cfg.seed
            && ens.batch_counts.iter().sum::<usize>() == cfg.n_traj
            && ens.grid().len() == cfg.grid.len()
            && ens.grid().iter().zip(&cfg.grid).all(|(a, b)| a == b)
    }

    pub fn get(&self, noise: &NoiseModel, cfg: &EnsembleConfig) -> Result<(EnsembleResult, EnsembleUse)> {
        let key = EnsembleStore::key(noise, cfg);
        let path = self.path(&key);
        let usage = |reused| EnsembleUse { key: key.clone(), path: path.clone(), reused, n_traj: cfg.n_traj, seed: cfg.seed };
        if let Some(p) = &path {
            if p.exists() {
                // A cache that cannot be read or does not match is recomputed.
                if let Ok((_, ens)) = read_ensemble(p) {
                    if EnsembleStore::matches(&ens, cfg) {
                        return Ok((ens, usage(true)));
                    }
                }
            }
        }
        let ens = exact_ensemble(noise, &DriveProfile::constant(1.0), cfg)?;
        if let Some(p) = &path {
            write_ensemble(p, &ens, json!({ "noise": noise, "dt": cfg.dt, "batches": cfg.batches }))?;
        }
        Ok((ens, usage(false)))
    }
}

fn drive() -> DriveProfile {
    DriveProfile::constant(1.0)
}

/// Sorted union of `t`, `t + h/2` and `t + h` for every `t`.
pub fn generator_grid(times: &[f64], h: f64) -> Vec<f64> {
    let mut g: Vec<f64> = times.iter().flat_map(|&t| [t, t + 0.5 * h, t + h]).collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Maps of `maps` at exactly the times `times`.
fn pick(maps: &[QuantumMap], times: &[f64]) -> Result<Vec<QuantumMap>> {
    times
        .iter()
        .map(|&t| {
            maps.iter()
                .find(|m| m.t == t)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("no map at t = {t}")))
        })
        .collect()
}

/// Second-order parameters used to label canonical rates.
fn labels(noise: &NoiseModel, times: &[f64]) -> Result<Vec<PlmeParams>> {
    times.iter().map(|&t| plme_params_closed(noise, 1.0, t)).collect()
}

/// Per time, the canonical rates of the instantaneous generator labelled
/// `(Γ₊, Γ₋, Γx)`, followed by the rates projected on the PLME jump
/// directions in the same order; six values per time, flattened.
pub fn labelled_rates(maps: &[QuantumMap], times: &[f64], h: f64, labels: &[PlmeParams]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(6 * times.len());
    for (&t, p) in times.iter().zip(labels) {
        let g = canonical_decompose(&instantaneous_generator(maps, t, h)?)?;
        let dirs = plme_label_directions(p);
        let m = match_rates(&g, &dirs);
        out.extend([m.gamma_plus, m.gamma_minus, m.gamma_x]);
        out.extend(projected_rates(&g, &dirs));
    }
    Ok(out)
}

fn distances(a: &[QuantumMap], b: &[QuantumMap]) -> Result<Vec<ChannelDistance>> {
    let opts = DiamondOptions::default();
    a.par_iter().zip(b).map(|(x, y)| channel_distance(x, y, &opts)).collect()
}

/// First time at which `eps` exceeds `level`, interpolated in `ln ε`.
pub fn first_crossing(times: &[f64], eps: &[f64], level: f64) -> Option<f64> {
    let k = eps.iter().position(|&e| e > level)?;
    if k == 0 {
        return Some(times[0]);
    }
    let (e0, e1) = (eps[k - 1].max(f64::MIN_POSITIVE).ln(), eps[k].ln());
    let f = (level.ln() - e0) / (e1 - e0);
    Some(times[k - 1] + f * (times[k] - times[k - 1]))
}

/// Intervals on which `values` is negative, with linearly interpolated ends.
pub fn negative_intervals(times: &[f64], values: &[f64]) -> Vec<[f64; 2]> {
    let crossing = |k: usize| {
        let (a, b) = (values[k - 1], values[k]);
        times[k - 1] + a / (a - b) * (times[k] - times[k - 1])
    };
    let mut out = Vec::new();
    let mut start = if values.first().is_some_and(|&v| v < 0.0) { Some(times[0]) } else { None };
    for k in 1..values.len() {
        match (start, values[k] < 0.0) {
            (None, true) => start = Some(crossing(k)),
            (Some(s), false) => {
                out.push([s, crossing(k)]);
                start = None;
            }
            _ => {}
        }
    }
    if let (Some(s), Some(&t)) = (start, times.last()) {
        out.push([s, t]);
    }
    out
}

/// Least-squares fit `y = c·t^k` on log axes; returns `(k, c)`.
pub fn power_law_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let lx: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let k = sxy / sxx;
    (k, (my - k * mx).exp())
}

/// Prefactor of `y = c·t^k` for fixed `k`, as the geometric mean of `y/t^k`.
pub fn fixed_slope_prefactor(t: &[f64], y: &[f64], k: f64) -> f64 {
    let n = t.len() as f64;
    (t.iter().zip(y).map(|(t, y)| y.ln() - k * t.ln()).sum::<f64>() / n).exp()
}

/// `(⟨σy⟩, ⟨σz⟩)` from `|0⟩`.
fn expvals_from_zero(m: &QuantumMap) -> Result<(f64, f64)> {
    let rho = evolve_state(m, &density_from_bloch([0.0, 0.0, 1.0]))?;
    let r = crate::qmath::bloch_from_density(&rho);
    Ok((r[1], r[2]))
}

pub fn run_scenario(cfg: &ExperimentConfig, store: &EnsembleStore) -> Result<ScenarioOutput> {
    match cfg.scenario {
        Scenario::RatesQuasistatic => rates_quasistatic(cfg),
        Scenario::ErrorQuasistatic => error_quasistatic(cfg),
        Scenario::ShorttimeScaling => shorttime_scaling(cfg),
        Scenario::LorentzianPanels => lorentzian_panels(cfg, store),
        Scenario::OneoverfPanels => oneoverf_panels(cfg, store),
        Scenario::Expvals => expvals(cfg, store),
        Scenario::PositivityMap => positivity_map(cfg),
    }
}

fn rates_quasistatic(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    let sigma = cfg.sigma_over_omega;
    let noise = NoiseModel::Quasistatic { sigma };
    let times = cfg.times();
    let h = default_generator_dt(1.0);
    let exact = quasistatic_exact_series(sigma, 1.0, &generator_grid(&times, h), EXACT_NODES)?;
    let lab = labels(&noise, &times)?;
    let rates = labelled_rates(&exact, &times, h, &lab)?;
    let mut table = Table::new(
        "",
        &["omega_t", "gamma_plus_plme", "gamma_minus_plme", "gamma_x_plme4", "gamma_1_exact", "gamma_2_exact", "gamma_3_exact"],
    );
    let mut worst = [0.0f64; 3];
    for (k, (&t, p)) in times.iter().zip(&lab).enumerate() {
        let gx = gamma_x_closed(&noise, 1.0, t)?;
        let r = &rates[6 * k..6 * k + 3];
        for (w, (a, b)) in worst.iter_mut().zip(r.iter().zip([p.gamma_plus, p.gamma_minus, gx])) {
            *w = w.max((a - b).abs());
        }
        table.push(vec![t, p.gamma_plus, p.gamma_minus, gx, r[0], r[1], r[2]]);
    }
    let scale = sigma * sigma;
    let summary = json!({
        "rate_scale": scale,
        "max_abs_difference_over_scale": {
            "gamma_plus": worst[0] / scale,
            "gamma_minus": worst[1] / scale,
            "gamma_x": worst[2] / scale,
        },
    });
    Ok(ScenarioOutput { tables: vec![table], summary, ensembles: Vec::new() })
}

fn error_quasistatic(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    let sigma = cfg.sigma_over_omega;
    let noise = NoiseModel::Quasistatic { sigma };
    let times = cfg.times();
    let exact = quasistatic_exact_series(sigma, 1.0, &times, EXACT_NODES)?;
    let gen = GeneratorOptions::default();
    let orders = [Order::Zeroth, Order::Second, Order::Fourth];
    let mut dist = Vec::new();
    for o in orders {
        let maps = plme_maps(&noise, &drive(), o, &times, &gen, &RkOptions::default())?;
        dist.push(distances(&maps, &exact)?);
    }
    let mut table = Table::new(
        "",
        &["omega_t", "eps_zeroth", "eps_plme2", "eps_plme4", "one_norm_zeroth", "one_norm_plme2", "one_norm_plme4"],
    );
    for (k, &t) in times.iter().enumerate() {
        table.push(vec![
            t,
            dist[0][k].diamond,
            dist[1][k].diamond,
            dist[2][k].diamond,
            dist[0][k].one_norm,
            dist[1][k].one_norm,
            dist[2][k].one_norm,
        ]);
    }
    let crossing = |i: usize| {
        let eps: Vec<f64> = dist[i].iter().map(|d| d.diamond).collect();
        first_crossing(&times, &eps, ERROR_THRESHOLD)
    };
    let summary = json!({
        "threshold": ERROR_THRESHOLD,
        "first_crossing": { "zeroth": crossing(0), "plme2": crossing(1), "plme4": crossing(2) },
    });
    Ok(ScenarioOutput { tables: vec![table], summary, ensembles: Vec::new() })
}

fn shorttime_scaling(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    let sigma = cfg.sigma_over_omega;
    let noise = NoiseModel::Quasistatic { sigma };
    let times = cfg.times();
    let exact = quasistatic_exact_series(sigma, 1.0, &times, EXACT_NODES)?;
    let gen = GeneratorOptions::default();
    let rk = RkOptions::with_rtol(SHORT_TIME_RTOL);
    let zeroth = distances(&plme_maps(&noise, &drive(), Order::Zeroth, &times, &gen, &rk)?, &exact)?;
    let second = distances(&plme_maps(&noise, &drive(), Order::Second, &times, &gen, &rk)?, &exact)?;
    let mut table = Table::new("", &["omega_t", "one_norm_zeroth", "one_norm_plme2", "eps_zeroth", "eps_plme2"]);
    for (k, &t) in times.iter().enumerate() {
        table.push(vec![t, zeroth[k].one_norm, second[k].one_norm, zeroth[k].diamond, second[k].diamond]);
    }
    let fit = |d: &[ChannelDistance], slope: f64, reference: f64| {
        let y: Vec<f64> = d.iter().map(|x| x.one_norm).collect();
        let (k, c) = power_law_fit(&times, &y);
        json!({
            "slope": k,
            "prefactor_free_fit": c,
            "prefactor_nominal_slope": fixed_slope_prefactor(&times, &y, slope),
            "nominal_slope": slope,
            "reference_prefactor": reference,
        })
    };
    let s2 = sigma * sigma;
    let summary = json!({
        "metric": "one_norm",
        "zeroth": fit(&zeroth, 3.0, 2.0 / 3.0 * s2),
        "plme2": fit(&second, 5.0, 2.0 / 15.0 * s2 * s2),
    });
    Ok(ScenarioOutput { tables: vec![table], summary, ensembles: Vec::new() })
}

/// Monte Carlo rates, PLME rates and errors for one noise model.
struct Panel {
    rates: Vec<Vec<f64>>,
    errors: Vec<Vec<f64>>,
    usage: EnsembleUse,
    max_abs_z: [f64; 2],
}

fn panel(cfg: &ExperimentConfig, noise: &NoiseModel, with_gamma_x: bool, store: &EnsembleStore) -> Result<Panel> {
    let times = cfg.times();
    let h = default_generator_dt(1.0);
    let seed = cfg.seed.ok_or_else(|| Error::Config(vec!["seed: required for Monte Carlo scenarios".into()]))?;
    let ecfg = EnsembleConfig::new(cfg.n_traj, cfg.dt, seed, generator_grid(&times, h));
    let (ens, usage) = store.get(noise, &ecfg)?;
    let lab = labels(noise, &times)?;
    let (est, se) = ens.jackknife(|maps| labelled_rates(maps, &times, h, &lab))?;
    let exact = pick(&ens.maps, &times)?;
    let gen = GeneratorOptions::default();
    let second = plme_maps(noise, &drive(), Order::Second, &times, &gen, &RkOptions::default())?;
    let zeroth = plme_maps(noise, &drive(), Order::Zeroth, &times, &gen, &RkOptions::default())?;
    let e2 = distances(&second, &exact)?;
    let e0 = distances(&zeroth, &exact)?;
    let mut rates = Vec::new();
    let mut errors = Vec::new();
    let mut max_abs_z = [0.0f64; 2];
    for (k, (&t, p)) in times.iter().zip(&lab).enumerate() {
        let mut row = vec![t, p.gamma_plus, p.gamma_minus];
        if with_gamma_x {
            row.push(gamma_x_closed(noise, 1.0, t)?);
        }
        row.push(p.phi);
        let (e, s) = (&est[6 * k..6 * k + 6], &se[6 * k..6 * k + 6]);
        row.extend_from_slice(&e[..3]);
        row.extend_from_slice(&s[..3]);
        row.extend_from_slice(&e[3..]);
        row.extend_from_slice(&s[3..]);
        for (i, plme) in [p.gamma_plus, p.gamma_minus].into_iter().enumerate() {
            max_abs_z[i] = max_abs_z[i].max((e[i] - plme).abs() / s[i]);
        }
        rates.push(row);
        errors.push(vec![t, e0[k].diamond, e2[k].diamond]);
    }
    Ok(Panel { rates, errors, usage, max_abs_z })
}

const RATE_COLUMNS: [&str; 12] = [
    "gamma_1_exact",
    "gamma_2_exact",
    "gamma_3_exact",
    "gamma_1_se",
    "gamma_2_se",
    "gamma_3_se",
    "proj_plus_exact",
    "proj_minus_exact",
    "proj_x_exact",
    "proj_plus_se",
    "proj_minus_se",
    "proj_x_se",
];

fn lorentzian_panels(cfg: &ExperimentConfig, store: &EnsembleStore) -> Result<ScenarioOutput> {
    let mut cols = vec!["tau_c", "omega_t", "gamma_plus_plme", "gamma_minus_plme", "gamma_x_plme4", "phi_plme"];
    cols.extend(RATE_COLUMNS);
    let mut rates = Table::new("", &cols);
    let mut errors = Table::new("errors", &["tau_c", "omega_t", "eps_zeroth", "eps_plme2"]);
    let mut ensembles = Vec::new();
    let mut per_tau = Vec::new();
    for &tau_c in &cfg.tau_c_values {
        let noise = NoiseModel::OrnsteinUhlenbeck { sigma: cfg.sigma_over_omega, tau_c };
        let p = panel(cfg, &noise, true, store)?;
        for mut r in p.rates {
            r.insert(0, tau_c);
            rates.push(r);
        }
        for mut r in p.errors {
            r.insert(0, tau_c);
            errors.push(r);
        }
        per_tau.push(json!({ "tau_c": tau_c, "max_abs_z": { "gamma_plus": p.max_abs_z[0], "gamma_minus": p.max_abs_z[1] } }));
        ensembles.push(p.usage);
    }
    Ok(ScenarioOutput { tables: vec![rates, errors], summary: json!({ "panels": per_tau }), ensembles })
}

fn oneoverf_panels(cfg: &ExperimentConfig, store: &EnsembleStore) -> Result<ScenarioOutput> {
    let mut cols = vec!["omega_t", "gamma_plus_plme", "gamma_minus_plme", "phi_plme"];
    cols.extend(RATE_COLUMNS);
    let mut rates = Table::new("", &cols);
    let mut errors = Table::new("errors", &["omega_t", "eps_zeroth", "eps_plme2"]);
    let p = panel(cfg, &cfg.noise, false, store)?;
    p.rates.into_iter().for_each(|r| rates.push(r));
    p.errors.into_iter().for_each(|r| errors.push(r));
    let summary = json!({ "max_abs_z": { "gamma_plus": p.max_abs_z[0], "gamma_minus": p.max_abs_z[1] } });
    Ok(ScenarioOutput { tables: vec![rates, errors], summary, ensembles: vec![p.usage] })
}

fn expvals(cfg: &ExperimentConfig, store: &EnsembleStore) -> Result<ScenarioOutput> {
    let noise = cfg.noise;
    let times = cfg.times();
    let gen = GeneratorOptions::default();
    let rk = RkOptions::default();
    let quasistatic = matches!(noise, NoiseModel::Quasistatic { .. });
    let mut ensembles = Vec::new();
    let (exact, se): (Vec<QuantumMap>, Vec<(f64, f64)>) = if quasistatic {
        (quasistatic_exact_series(noise.sigma(), 1.0, &times, EXACT_NODES)?, vec![(0.0, 0.0); times.len()])
    } else {
        let seed = cfg.seed.ok_or_else(|| Error::Config(vec!["seed: required for Monte Carlo scenarios".into()]))?;
        let (ens, usage) = store.get(&noise, &EnsembleConfig::new(cfg.n_traj, cfg.dt, seed, times.clone()))?;
        ensembles.push(usage);
        // Components of (I + M) ẑ are M[1][2] and 1 + M[2][2].
        let se = ens.std_err.iter().map(|s| (s.0[1][2], s.0[2][2])).collect();
        (ens.maps, se)
    };
    let second = plme_maps(&noise, &drive(), Order::Second, &times, &gen, &rk)?;
    let zeroth = plme_maps(&noise, &drive(), Order::Zeroth, &times, &gen, &rk)?;
    let fourth = if quasistatic { Some(plme_maps(&noise, &drive(), Order::Fourth, &times, &gen, &rk)?) } else { None };
    let mut cols = vec!["omega_t", "sy_exact", "sz_exact", "sy_exact_se", "sz_exact_se", "sy_plme2", "sz_plme2", "sy_zeroth", "sz_zeroth"];
    if quasistatic {
        cols.extend(["sy_plme4", "sz_plme4"]);
    }
    let mut table = Table::new("", &cols);
    let mut dev = [0.0f64; 2];
    for (k, &t) in times.iter().enumerate() {
        let ex = expvals_from_zero(&exact[k])?;
        let p2 = expvals_from_zero(&second[k])?;
        let p0 = expvals_from_zero(&zeroth[k])?;
        let mut row = vec![t, ex.0, ex.1, se[k].0, se[k].1, p2.0, p2.1, p0.0, p0.1];
        if let Some(f) = &fourth {
            let p4 = expvals_from_zero(&f[k])?;
            row.extend([p4.0, p4.1]);
        }
        dev[0] = dev[0].max((p2.0 - ex.0).abs()).max((p2.1 - ex.1).abs());
        dev[1] = dev[1].max((p0.0 - ex.0).abs()).max((p0.1 - ex.1).abs());
        table.push(row);
    }
    let summary = json!({ "max_abs_deviation": { "plme2": dev[0], "zeroth": dev[1] } });
    Ok(ScenarioOutput { tables: vec![table], summary, ensembles })
}

fn positivity_map(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    let times = cfg.times();
    let gen = GeneratorOptions::default();
    let rk = RkOptions::default();
    let chi_min = |maps: &[QuantumMap]| -> Result<Vec<f64>> {
        maps.iter().map(|m| Ok(process_matrix(m)?.min_eigenvalue)).collect()
    };
    let rows: Vec<Vec<Vec<f64>>> = cfg
        .sigma_values
        .par_iter()
        .map(|&sigma| {
            let noise = NoiseModel::Quasistatic { sigma };
            let maps = plme_maps(&noise, &drive(), Order::Second, &times, &gen, &rk)?;
            Ok(times.iter().zip(chi_min(&maps)?).map(|(&t, c)| vec![sigma, t, c]).collect())
        })
        .collect::<Result<_>>()?;
    let mut map = Table::new("", &["sigma", "omega_t", "chi_min_plme2"]);
    rows.into_iter().flatten().for_each(|r| map.push(r));

    // Diagnostics at the reference strength.
    let sigma = cfg.sigma_over_omega;
    let noise = NoiseModel::Quasistatic { sigma };
    let plme = plme_maps(&noise, &drive(), Order::Second, &times, &gen, &rk)?;
    let exact = quasistatic_exact_series(sigma, 1.0, &times, EXACT_NODES)?;
    let h = default_generator_dt(1.0);
    let lab = labels(&noise, &times)?;
    let dist = distances(&plme, &exact)?;
    let chi_plme = chi_min(&plme)?;
    let chi_exact = chi_min(&exact)?;
    let mut diag = Table::new(
        "diagnostics",
        &["omega_t", "gamma_1_exact", "gamma_2_exact", "gamma_3_exact", "diamond", "one_norm", "chi_min_plme2", "chi_min_exact"],
    );
    for (k, (&t, p)) in times.iter().zip(&lab).enumerate() {
        let est = instantaneous_generator_with(|s| quasistatic_exact_map(sigma, 1.0, s, EXACT_NODES), t, h)?;
        let m = match_rates(&canonical_decompose(&est.generator)?, &plme_label_directions(p));
        diag.push(vec![t, m.gamma_plus, m.gamma_minus, m.gamma_x, dist[k].diamond, dist[k].one_norm, chi_plme[k], chi_exact[k]]);
    }

    let mut patches = Vec::new();
    for &[s, t] in &cfg.patch_points {
        let m = plme_maps(&NoiseModel::Quasistatic { sigma: s }, &drive(), Order::Second, &[t], &gen, &rk)?.remove(0);
        let scan = nonphysical_state_scan(&m, cfg.scan_resolution)?;
        patches.push(json!({ "sigma": s, "omega_t": t, "chi_min_plme2": process_matrix(&m)?.min_eigenvalue, "scan": scan }));
    }
    let worst_ratio = chi_plme
        .iter()
        .zip(&dist)
        .filter(|(c, _)| **c < 0.0)
        .map(|(c, d)| -c / d.diamond)
        .fold(0.0, f64::max);
    let summary = json!({
        "reference_sigma": sigma,
        "negative_intervals": negative_intervals(&times, &chi_plme),
        "max_negativity_over_diamond": worst_ratio,
        "patches": patches,
    });
    Ok(ScenarioOutput { tables: vec![map, diag], summary, ensembles: Vec::new() })
}

/// Hex digest identifying a configuration; the output directory is excluded.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let v = serde_json::to_string(cfg).expect("config serializes");
    hex::encode(&Sha256::digest(v.as_bytes())[..6])
}

/// Ensemble cache directory: `PLME_CACHE_DIR`, else `<output_dir>/.plme-cache`.
pub fn cache_dir_for(output_dir: &Path) -> PathBuf {
    match std::env::var_os("PLME_CACHE_DIR") {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => output_dir.join(".plme-cache"),
    }
}

// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: the on-disk TOML form, per-scenario defaults and
//! validation into a fully resolved [`ExperimentConfig`].

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::DEFAULT_DT;
use crate::noise::{NoiseModel, DEFAULT_OMEGA_H_OVER_OMEGA};

use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    RatesQuasistatic,
    ErrorQuasistatic,
    ShorttimeScaling,
    LorentzianPanels,
    OneoverfPanels,
    Expvals,
    PositivityMap,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::RatesQuasistatic,
        Scenario::ErrorQuasistatic,
        Scenario::ShorttimeScaling,
        Scenario::LorentzianPanels,
        Scenario::OneoverfPanels,
        Scenario::Expvals,
        Scenario::PositivityMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::RatesQuasistatic => "rates_quasistatic",
            Scenario::ErrorQuasistatic => "error_quasistatic",
            Scenario::ShorttimeScaling => "shorttime_scaling",
            Scenario::LorentzianPanels => "lorentzian_panels",
            Scenario::OneoverfPanels => "oneoverf_panels",
            Scenario::Expvals => "expvals",
            Scenario::PositivityMap => "positivity_map",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|s| s.name() == name)
    }

    /// One-line description of the data set the scenario produces.
    pub fn description(self) -> &'static str {
        match self {
            Scenario::RatesQuasistatic => {
                "Quasistatic noise: second-order rates Γ±(t), fourth-order Γx(t) and the canonical rates of the exact Gauss–Hermite map"
            }
            Scenario::ErrorQuasistatic => {
                "Quasistatic noise: diamond-norm error ε(t) of the 0th-order, PLME2 and PLME4 maps against the exact map"
            }
            Scenario::ShorttimeScaling => {
                "Quasistatic noise at Ωt ≪ 1: 1-norm and diamond errors of the 0th-order and PLME2 maps, with power-law fits"
            }
            Scenario::LorentzianPanels => {
                "Ornstein–Uhlenbeck noise at several Ωτ_c: PLME2 rates against Monte Carlo canonical rates, and ε(t) of PLME2 and 0th order"
            }
            Scenario::OneoverfPanels => {
                "1/f noise: PLME2 rates against Monte Carlo canonical rates, and ε(t) of PLME2 and 0th order"
            }
            Scenario::Expvals => "⟨σy⟩(t) and ⟨σz⟩(t) from |0⟩ in the interaction frame: exact baseline, PLME2 and 0th order",
            Scenario::PositivityMap => {
                "Quasistatic noise: smallest χ eigenvalue of the PLME2 map over (σ, t), channel diagnostics and Bloch-sphere patches of nonphysical inputs"
            }
        }
    }

    /// Whether the exact baseline is a Monte Carlo ensemble.
    pub fn uses_ensemble(self, noise: &NoiseModel) -> bool {
        match self {
            Scenario::LorentzianPanels | Scenario::OneoverfPanels => true,
            Scenario::Expvals => !matches!(noise, NoiseModel::Quasistatic { .. }),
            _ => false,
        }
    }

    fn log_grid(self) -> bool {
        self == Scenario::ShorttimeScaling
    }

    /// The noise kind the scenario is built around, if it is fixed.
    fn required_kind(self) -> Option<&'static str> {
        match self {
            Scenario::LorentzianPanels => Some("ornstein_uhlenbeck"),
            Scenario::OneoverfPanels => Some("one_over_f"),
            Scenario::Expvals => None,
            _ => Some("quasistatic"),
        }
    }

    /// Parameter values the scenario runs with when the file leaves them out.
    pub fn defaults(self) -> ExperimentConfig {
        let qs = |sigma| NoiseModel::Quasistatic { sigma };
        let base = ExperimentConfig {
            scenario: self,
            noise: qs(0.05),
            sigma_over_omega: 0.05,
            n_traj: 20_000,
            t_min: 0.1,
            t_max: 20.0,
            grid_points: 200,
            seed: None,
            dt: DEFAULT_DT,
            tau_c_values: Vec::new(),
            sigma_values: Vec::new(),
            patch_points: Vec::new(),
            scan_resolution: 48,
            output_dir: PathBuf::from("."),
        };
        match self {
            Scenario::RatesQuasistatic => ExperimentConfig { t_min: 0.05, t_max: 4.0 * PI, grid_points: 200, ..base },
            Scenario::ErrorQuasistatic => base,
            Scenario::ShorttimeScaling => {
                ExperimentConfig { noise: qs(0.2), sigma_over_omega: 0.2, t_min: 1e-2, t_max: 1e-1, grid_points: 21, ..base }
            }
            Scenario::LorentzianPanels => ExperimentConfig {
                noise: NoiseModel::OrnsteinUhlenbeck { sigma: 0.05, tau_c: 10.0 },
                t_min: 0.5,
                t_max: 15.0,
                grid_points: 59,
                tau_c_values: vec![10.0, 1.0, 0.2],
                ..base
            },
            Scenario::OneoverfPanels => ExperimentConfig {
                noise: NoiseModel::OneOverF { sigma: 0.01, omega_l: 1e-3, omega_h: DEFAULT_OMEGA_H_OVER_OMEGA },
                sigma_over_omega: 0.01,
                t_min: 0.5,
                t_max: 15.0,
                grid_points: 59,
                ..base
            },
            Scenario::Expvals => base,
            Scenario::PositivityMap => ExperimentConfig {
                noise: qs(0.1),
                sigma_over_omega: 0.1,
                t_min: 0.05,
                t_max: 4.0 * PI,
                grid_points: 400,
                sigma_values: (1..=20).map(|k| 0.01 * k as f64).collect(),
                patch_points: vec![[0.1, 2.25 * PI], [0.05, 2.25 * PI]],
                ..base
            },
        }
    }

    /// `(field, meaning)` for every field the scenario reads.
    pub fn parameters(self) -> Vec<(&'static str, &'static str)> {
        let mut p = vec![
            ("noise", "noise model table; sigma is taken from sigma_over_omega"),
            ("sigma_over_omega", "noise strength σ in units of Ω"),
            ("t_min", "first output time, units of 1/Ω"),
            ("t_max", "last output time, units of 1/Ω"),
            ("grid_points", "number of output times"),
        ];
        if self.log_grid() {
            p[4] = ("grid_points", "number of log-spaced output times");
        }
        match self {
            Scenario::LorentzianPanels => {
                p.push(("tau_c_values", "correlation times Ωτ_c, one panel each"));
            }
            Scenario::PositivityMap => {
                p.push(("sigma_values", "noise strengths of the (σ, t) map"));
                p.push(("patch_points", "[σ, Ωt] pairs at which Bloch-sphere patches are scanned"));
                p.push(("scan_resolution", "polar cells of the Bloch-sphere scan"));
            }
            _ => {}
        }
        if self.uses_ensemble(&self.defaults().noise) || self == Scenario::Expvals {
            p.push(("n_traj", "Monte Carlo trajectories"));
            p.push(("dt", "trajectory step, units of 1/Ω"));
            p.push(("seed", "ensemble seed; required for Monte Carlo runs"));
        }
        p
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Configuration as written in a file. Absent fields take the scenario
/// defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    pub noise: Option<NoiseModel>,
    pub sigma_over_omega: Option<f64>,
    pub n_traj: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub tau_c_values: Option<Vec<f64>>,
    pub sigma_values: Option<Vec<f64>>,
    pub patch_points: Option<Vec<[f64; 2]>>,
    pub scan_resolution: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl ConfigFile {
    /// Parses TOML. A `[noise]` table may omit `sigma`; it then takes
    /// `sigma_over_omega`, or the scenario default.
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let err = |m: &str| Error::Config(vec![m.to_string()]);
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| err(e.message()))?;
        let sigma = match doc.get("sigma_over_omega") {
            Some(v) => v.as_float().or_else(|| v.as_integer().map(|i| i as f64)),
            None => doc
                .get("scenario")
                .and_then(|v| v.as_str())
                .and_then(Scenario::from_name)
                .map(|s| s.defaults().sigma_over_omega),
        };
        if let Some(toml::Value::Table(noise)) = doc.get_mut("noise") {
            let white = noise.get("kind").and_then(|k| k.as_str()) == Some("white");
            if !white && !noise.contains_key("sigma") {
                if let Some(s) = sigma {
                    noise.insert("sigma".into(), toml::Value::Float(s));
                }
            }
        }
        doc.try_into().map_err(|e: toml::de::Error| err(e.message()))
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        ConfigFile::parse(&text)
    }
}

/// Fully resolved configuration. Frequencies are in units of `Ω`, times in
/// units of `1/Ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub noise: NoiseModel,
    pub sigma_over_omega: f64,
    pub n_traj: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub grid_points: usize,
    pub seed: Option<u64>,
    pub dt: f64,
    pub tau_c_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
    pub patch_points: Vec<[f64; 2]>,
    pub scan_resolution: usize,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Output times: linear, or logarithmic for the short-time scenario.
    pub fn times(&self) -> Vec<f64> {
        let n = self.grid_points;
        if n == 1 {
            return vec![self.t_max];
        }
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    self.t_max
                } else if self.scenario.log_grid() {
                    self.t_min * (self.t_max / self.t_min).powf(f)
                } else {
                    self.t_min + (self.t_max - self.t_min) * f
                }
            })
            .collect()
    }

    /// Short human-readable listing of the resolved parameters.
    pub fn describe(&self) -> Vec<String> {
        let mut out = vec![format!("scenario = {} ({})", self.scenario, self.scenario.description())];
        out.push(match self.noise {
            NoiseModel::Quasistatic { sigma } => format!("noise = quasistatic, sigma = {sigma} Ω"),
            NoiseModel::OrnsteinUhlenbeck { sigma, tau_c } => {
                format!("noise = ornstein_uhlenbeck, sigma = {sigma} Ω, tau_c = {tau_c} / Ω")
            }
            NoiseModel::OneOverF { sigma, omega_l, omega_h } => {
                format!("noise = one_over_f, sigma = {sigma} Ω, omega_l = {omega_l} Ω, omega_h = {omega_h} Ω")
            }
            NoiseModel::White { diffusion } => format!("noise = white, diffusion = {diffusion} Ω"),
        });
        let grid = if self.scenario.log_grid() { "log" } else { "linear" };
        out.push(format!("times = {} {grid} points on [{}, {}] / Ω", self.grid_points, self.t_min, self.t_max));
        if !self.tau_c_values.is_empty() {
            out.push(format!("tau_c_values = {:?} / Ω", self.tau_c_values));
        }
        if !self.sigma_values.is_empty() {
            out.push(format!("sigma_values = {} values on [{}, {}] Ω", self.sigma_values.len(), self.sigma_values[0], self.sigma_values[self.sigma_values.len() - 1]));
        }
        if !self.patch_points.is_empty() {
            out.push(format!("patch_points = {:?}", self.patch_points));
        }
        if self.scenario.uses_ensemble(&self.noise) {
            let seed = self.seed.map_or("missing".to_string(), |s| s.to_string());
            out.push(format!("ensemble = {} trajectories, dt = {:.6} / Ω, seed = {seed}", self.n_traj, self.dt));
        }
        out.push(format!("output_dir = {}", self.output_dir.display()));
        out
    }
}

/// Values given on the command line; they take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

/// Outcome of [`validate`]: the resolved configuration when valid, and every
/// problem found otherwise.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub config: Option<ExperimentConfig>,
    pub errors: Vec<String>,
    /// Set when the run needs a seed that neither the file nor the flags
    /// supply. Not an error for validation, since `--seed` may come later.
    pub missing_seed: bool,
}

impl ValidationReport {
    /// The configuration, if it is valid and ready to run.
    pub fn into_result(mut self) -> Result<ExperimentConfig> {
        if self.missing_seed {
            if let Some(c) = &self.config {
                self.errors.push(format!("seed: required for {} with this noise (set seed or pass --seed)", c.scenario));
            }
        }
        match self.config {
            Some(c) if self.errors.is_empty() => Ok(c),
            _ => Err(Error::Config(self.errors)),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.config {
            for line in c.describe() {
                writeln!(f, "{line}")?;
            }
        }
        if self.missing_seed {
            writeln!(f, "note: this scenario runs a Monte Carlo ensemble; pass --seed or set seed before running")?;
        }
        if self.errors.is_empty() {
            write!(f, "configuration is valid")
        } else {
            writeln!(f, "{} error(s):", self.errors.len())?;
            for e in &self.errors {
                writeln!(f, "  - {e}")?;
            }
            Ok(())
        }
    }
}

fn noise_kind(noise: &NoiseModel) -> &'static str {
    match noise {
        NoiseModel::Quasistatic { .. } => "quasistatic",
        NoiseModel::OrnsteinUhlenbeck { .. } => "ornstein_uhlenbeck",
        NoiseModel::OneOverF { .. } => "one_over_f",
        NoiseModel::White { .. } => "white",
    }
}

/// Resolves `file` against the scenario defaults and checks every field.
pub fn validate(file: &ConfigFile, overrides: &Overrides) -> ValidationReport {
    let mut errors = Vec::new();
    let scenario = match file.scenario.as_deref() {
        None => {
            errors.push("scenario: missing".to_string());
            return ValidationReport { config: None, errors, missing_seed: false };
        }
        Some(name) => match Scenario::from_name(name) {
            Some(s) => s,
            None => {
                let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                errors.push(format!("scenario: unknown '{name}', expected one of {}", names.join(", ")));
                return ValidationReport { config: None, errors, missing_seed: false };
            }
        },
    };
    let d = scenario.defaults();
    let mut noise = file.noise.unwrap_or(d.noise);
    if let Some(kind) = scenario.required_kind() {
        if noise_kind(&noise) != kind {
            errors.push(format!("noise: scenario {scenario} needs kind = \"{kind}\", got \"{}\"", noise_kind(&noise)));
            noise = d.noise;
        }
    }
    let sigma = match (file.sigma_over_omega, file.noise) {
        (Some(s), Some(n)) if !matches!(n, NoiseModel::White { .. }) && n.sigma() != s => {
            errors.push(format!("sigma_over_omega = {s} conflicts with noise.sigma = {}", n.sigma()));
            s
        }
        (Some(s), _) => s,
        (None, Some(n)) if !matches!(n, NoiseModel::White { .. }) => n.sigma(),
        _ => d.sigma_over_omega,
    };
    if !(sigma.is_finite() && sigma > 0.0) {
        errors.push(format!("sigma_over_omega must be finite and > 0, got {sigma}"));
    } else if !matches!(noise, NoiseModel::White { .. }) {
        noise = noise.with_sigma(sigma);
    }
    if let Err(e) = noise.validate() {
        errors.push(format!("noise: {e}"));
    }

    let t_min = file.t_min.unwrap_or(d.t_min);
    let t_max = file.t_max.unwrap_or(d.t_max);
    if !(t_max.is_finite() && t_max > 0.0) {
        errors.push(format!("t_max must be finite and > 0, got {t_max}"));
    }
    if !(t_min.is_finite() && t_min > 0.0) {
        errors.push(format!("t_min must be finite and > 0, got {t_min}"));
    } else if t_min >= t_max {
        errors.push(format!("t_min = {t_min} must be below t_max = {t_max}"));
    }
    let grid_points = file.grid_points.unwrap_or(d.grid_points);
    if grid_points < 2 {
        errors.push(format!("grid_points must be ≥ 2, got {grid_points}"));
    }
    let n_traj = file.n_traj.unwrap_or(d.n_traj);
    if n_traj == 0 {
        errors.push("n_traj must be ≥ 1, got 0".to_string());
    }
    let dt = file.dt.unwrap_or(d.dt);
    if !(dt.is_finite() && dt > 0.0) {
        errors.push(format!("dt must be finite and > 0, got {dt}"));
    }
    let seed = overrides.seed.or(file.seed);
    let missing_seed = scenario.uses_ensemble(&noise) && seed.is_none();

    let mut tau_c_values = file.tau_c_values.clone().unwrap_or_else(|| match (scenario, file.noise) {
        (Scenario::LorentzianPanels, Some(NoiseModel::OrnsteinUhlenbeck { tau_c, .. })) => vec![tau_c],
        _ => d.tau_c_values.clone(),
    });
    if scenario != Scenario::LorentzianPanels && file.tau_c_values.is_some() {
        errors.push(format!("tau_c_values: not used by {scenario}"));
        tau_c_values.clear();
    }
    if scenario == Scenario::LorentzianPanels {
        if tau_c_values.is_empty() {
            errors.push("tau_c_values: at least one value required".to_string());
        }
        for &t in &tau_c_values {
            if !(t.is_finite() && t > 0.0) {
                errors.push(format!("tau_c_values: {t} must be finite and > 0"));
            }
        }
    }

    let mut sigma_values = file.sigma_values.clone().unwrap_or_else(|| d.sigma_values.clone());
    let mut patch_points = file.patch_points.clone().unwrap_or_else(|| d.patch_points.clone());
    if scenario == Scenario::PositivityMap {
        if sigma_values.is_empty() {
            errors.push("sigma_values: at least one value required".to_string());
        }
        for &s in &sigma_values {
            if !(s.is_finite() && s > 0.0) {
                errors.push(format!("sigma_values: {s} must be finite and > 0"));
            }
        }
        for p in &patch_points {
            if !(p[0].is_finite() && p[0] > 0.0 && p[1].is_finite() && p[1] > 0.0) {
                errors.push(format!("patch_points: {p:?} needs σ > 0 and Ωt > 0"));
            }
        }
    } else {
        if file.sigma_values.is_some() {
            errors.push(format!("sigma_values: not used by {scenario}"));
        }
        if file.patch_points.is_some() {
            errors.push(format!("patch_points: not used by {scenario}"));
        }
        sigma_values.clear();
        patch_points.clear();
    }
    let scan_resolution = file.scan_resolution.unwrap_or(d.scan_resolution);
    if scan_resolution == 0 {
        errors.push("scan_resolution must be ≥ 1".to_string());
    }

    let output_dir = overrides.output_dir.clone().or_else(|| file.output_dir.clone()).unwrap_or(d.output_dir);
    let config = ExperimentConfig {
        scenario,
        noise,
        sigma_over_omega: sigma,
        n_traj,
        t_min,
        t_max,
        grid_points,
        seed,
        dt,
        tau_c_values,
        sigma_values,
        patch_points,
        scan_resolution,
        output_dir,
    };
    ValidationReport { config: Some(config), errors, missing_seed }
}

/// Per-scenario entry of [`list_scenarios`].
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: Vec<(&'static str, &'static str)>,
    pub defaults: ExperimentConfig,
}

pub fn list_scenarios() -> Vec<ScenarioInfo> {
    Scenario::ALL
        .iter()
        .map(|&s| ScenarioInfo { name: s.name(), description: s.description(), parameters: s.parameters(), defaults: s.defaults() })
        .collect()
}

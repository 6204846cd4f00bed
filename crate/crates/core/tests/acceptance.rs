// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and a tally.
//!
//! A FAIL is reported, not asserted, so the rest of the suite still runs and
//! `cargo test` stays usable while a criterion is open. Set
//! `PLME_ACCEPTANCE_STRICT=1` to turn any FAIL into a test failure. Run with
//! `--nocapture` to see the report.

use std::f64::consts::PI;
use std::time::Instant;

use plme_lab::channel::{channel_distance, DiamondOptions};
use plme_lab::cli::{run_scenario, EnsembleStore, ExperimentConfig, Scenario, ScenarioOutput, Table};
use plme_lab::evolve::{plme_maps, quasistatic_exact_series, GeneratorOptions, RkOptions};
use plme_lab::noise::NoiseModel;
use plme_lab::plme::{
    plme_params_closed, plme_params_quadrature, DriveProfile, OneOverFKernel, Order, PlmeParams, QuadratureOptions,
};
use plme_lab::qmath::{dissipator, expm, hamiltonian_superop, pauli, Rotor, Superoperator};

const SEED: u64 = 7;

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, n: usize, pass: bool, detail: String, started: Instant) {
        let s = format!("criterion {n} {}: {detail} [{:.1} s]", if pass { "PASS" } else { "FAIL" }, started.elapsed().as_secs_f64());
        println!("{s}");
        self.lines.push((n, pass, s));
    }
}

fn run(cfg: ExperimentConfig) -> ScenarioOutput {
    run_scenario(&cfg, &EnsembleStore::new(None)).expect("scenario runs")
}

fn col(t: &Table, name: &str) -> Vec<f64> {
    t.column(name).unwrap_or_else(|| panic!("column {name}"))
}

/// 50 log-spaced times from `a` to `b`.
fn log_times(a: f64, b: f64) -> Vec<f64> {
    (0..50).map(|k| a * (b / a).powf(k as f64 / 49.0)).collect()
}

fn quasistatic(sigma: f64) -> NoiseModel {
    NoiseModel::Quasistatic { sigma }
}

fn ou(sigma: f64, tau_c: f64) -> NoiseModel {
    NoiseModel::OrnsteinUhlenbeck { sigma, tau_c }
}

fn one_over_f() -> NoiseModel {
    NoiseModel::OneOverF { sigma: 0.01, omega_l: 1e-3, omega_h: 1e3 }
}

/// Largest relative difference of (Γ₊, Γ₋, h) and the absolute φ difference.
/// Rates are compared against `max(|value|, scale)`.
fn param_gap(a: &PlmeParams, b: &PlmeParams, scale: f64) -> (f64, f64) {
    let rel = [(a.gamma_plus, b.gamma_plus), (a.gamma_minus, b.gamma_minus), (a.h_ren_coeff, b.h_ren_coeff)]
        .iter()
        .map(|&(x, y)| (x - y).abs() / y.abs().max(scale))
        .fold(0.0, f64::max);
    let d = (a.phi - b.phi).rem_euclid(2.0 * PI);
    (rel, d.min(2.0 * PI - d))
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let drive = DriveProfile::constant(1.0);
    let times = log_times(1.0001e-2, 20.0);
    let models = [
        ("quasistatic", quasistatic(0.05), OneOverFKernel::Exact),
        ("ou tau=0.2", ou(0.05, 0.2), OneOverFKernel::Exact),
        ("ou tau=1", ou(0.05, 1.0), OneOverFKernel::Exact),
        ("ou tau=10", ou(0.05, 10.0), OneOverFKernel::Exact),
        ("1/f", one_over_f(), OneOverFKernel::Simplified),
        ("white", NoiseModel::White { diffusion: 0.01 }, OneOverFKernel::Exact),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, noise, kernel) in models {
        let opts = QuadratureOptions { one_over_f: kernel, ..Default::default() };
        let scale = match noise {
            NoiseModel::White { diffusion } => diffusion,
            _ => noise.sigma().powi(2),
        };
        let mut worst = (0.0f64, 0.0f64);
        for &t in &times {
            let a = plme_params_quadrature(&noise, &drive, t, &opts).expect("quadrature");
            let b = plme_params_closed(&noise, 1.0, t).expect("closed form");
            let g = param_gap(&a, &b, scale);
            worst = (worst.0.max(g.0), worst.1.max(g.1));
        }
        pass &= worst.0 <= 1e-8 && worst.1 <= 1e-8;
        parts.push(format!("{name} {:.1e}/{:.1e}", worst.0, worst.1));
    }
    let ok = pass && start.elapsed().as_secs_f64() < 60.0;
    r.record(1, ok, format!("max rel rate gap / phi gap: {} (tol 1e-8)", parts.join(", ")), start);
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let out = run(Scenario::RatesQuasistatic.defaults());
    let t = &out.tables[0];
    let scale = 0.05f64.powi(2);
    let worst = |a: &str, b: &str| col(t, a).iter().zip(col(t, b)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let dp = worst("gamma_1_exact", "gamma_plus_plme") / scale;
    let dm = worst("gamma_2_exact", "gamma_minus_plme") / scale;
    let gx_scale = col(t, "gamma_x_plme4").iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let dx = worst("gamma_3_exact", "gamma_x_plme4") / gx_scale;
    let pass = dp <= 0.02 && dm <= 0.02 && dx <= 0.05;
    r.record(
        2,
        pass,
        format!("max |Γ-Γ_exact|/σ²: Γ+ {dp:.3}, Γ- {dm:.3} (tol 0.02); Γx gap/max Γx {dx:.3} (tol 0.05)"),
        start,
    );
}

fn criterion_3(r: &mut Report) {
    let start = Instant::now();
    let out = run(Scenario::ErrorQuasistatic.defaults());
    let c = &out.summary["first_crossing"];
    let targets = [("zeroth", 1.0), ("plme2", 5.0), ("plme4", 17.0)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, target) in targets {
        let v = c[k].as_f64();
        pass &= v.is_some_and(|v| (v - target).abs() <= 0.3 * target);
        parts.push(format!("{k} {}", v.map_or("none".into(), |v| format!("{v:.3}"))));
    }
    // Ordering at the probe times, computed directly.
    let noise = quasistatic(0.05);
    let probes = [2.0, 5.0, 10.0];
    let exact = quasistatic_exact_series(0.05, 1.0, &probes, 40).unwrap();
    let eps: Vec<Vec<f64>> = [Order::Fourth, Order::Second, Order::Zeroth]
        .iter()
        .map(|&o| {
            let maps = plme_maps(&noise, &DriveProfile::constant(1.0), o, &probes, &GeneratorOptions::default(), &RkOptions::default())
                .unwrap();
            maps.iter().zip(&exact).map(|(a, b)| channel_distance(a, b, &DiamondOptions::default()).unwrap().diamond).collect()
        })
        .collect();
    let ordered = (0..probes.len()).all(|k| eps[0][k] < eps[1][k] && eps[1][k] < eps[2][k]);
    pass &= ordered;
    r.record(
        3,
        pass,
        format!("first ε > 1e-3 at Ωt: {} (targets 1, 5, 17 ± 30%); ordering at 2, 5, 10: {ordered}", parts.join(", ")),
        start,
    );
}

fn criterion_4(r: &mut Report) {
    let start = Instant::now();
    let out = run(Scenario::ShorttimeScaling.defaults());
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, slope) in [("plme2", 5.0), ("zeroth", 3.0)] {
        let f = &out.summary[k];
        let fitted = f["slope"].as_f64().unwrap();
        let c = f["prefactor_nominal_slope"].as_f64().unwrap();
        let reference = f["reference_prefactor"].as_f64().unwrap();
        let rel = (c - reference).abs() / reference;
        pass &= (fitted - slope).abs() <= 0.1 && rel <= 0.15;
        parts.push(format!("{k} slope {fitted:.3} (want {slope} ± 0.1), prefactor {c:.4e} vs {reference:.4e} ({:.1}%)", 100.0 * rel));
    }
    r.record(4, pass, parts.join("; "), start);
}

fn criterion_5(r: &mut Report) {
    let start = Instant::now();
    let sigma = 0.05f64;
    // Long-time limits.
    let mut long = 0.0f64;
    for tau in [0.2, 1.0, 10.0] {
        let p = plme_params_closed(&ou(sigma, tau), 1.0, 60.0 * tau).unwrap();
        let w = 1.0 + tau * tau;
        let gp = sigma * sigma * tau * (1.0 / w + 1.0 / w.sqrt());
        let gm = sigma * sigma * tau * (1.0 / w - 1.0 / w.sqrt());
        long = long.max((p.gamma_plus - gp).abs() / gp).max((p.gamma_minus - gm).abs() / gm.abs());
    }
    // Quasistatic recovery; the gap grows like t/τ_c, so the window stops at Ωt = 10.
    let mut recovery = 0.0f64;
    for t in log_times(1.0001e-2, 10.0) {
        let a = plme_params_closed(&ou(sigma, 1e4), 1.0, t).unwrap();
        let b = plme_params_closed(&quasistatic(sigma), 1.0, t).unwrap();
        recovery = recovery.max(param_gap(&a, &b, sigma * sigma).0);
    }
    // Markov limit at fixed D.
    let (d, tau) = (0.01f64, 1e-3);
    let mut markov = 0.0f64;
    for t in log_times(1.0001e-2, 20.0) {
        let p = plme_params_closed(&ou((d / tau).sqrt(), tau), 1.0, t).unwrap();
        markov = markov.max(p.gamma_minus.abs() / p.gamma_plus);
    }
    let pass = long <= 1e-6 && recovery <= 1e-3 && markov <= 1e-2;
    r.record(
        5,
        pass,
        format!("long-time rel {long:.1e} (tol 1e-6); τ_c=1e4 vs quasistatic {recovery:.1e} on Ωt ≤ 10 (tol 1e-3); Markov |Γ-|/Γ+ {markov:.1e} (tol 1e-2)"),
        start,
    );
}

/// Largest `(|Γ_exact − Γ| − allowance·|Γ|) / s.e.` over rows, for Γ₊ and Γ₋.
fn worst_z(t: &Table, allowance: f64) -> [f64; 2] {
    let z = |plme: &str, exact: &str, se: &str| {
        let (p, e, s) = (col(t, plme), col(t, exact), col(t, se));
        (0..p.len()).map(|k| ((e[k] - p[k]).abs() - allowance * p[k].abs()) / s[k]).fold(f64::NEG_INFINITY, f64::max)
    };
    [z("gamma_plus_plme", "gamma_1_exact", "gamma_1_se"), z("gamma_minus_plme", "gamma_2_exact", "gamma_2_se")]
}

fn criterion_6(r: &mut Report) {
    let start = Instant::now();
    let seeded = |s: Scenario| ExperimentConfig { seed: Some(SEED), ..s.defaults() };
    let lor = run(seeded(Scenario::LorentzianPanels));
    let mut pass = true;
    let mut parts = Vec::new();
    for tau in [10.0, 1.0, 0.2] {
        let z = worst_z(&lor.tables[0].filter("tau_c", tau), 0.0);
        pass &= z[0] <= 3.0 && z[1] <= 3.0;
        parts.push(format!("OU τ_c={tau}: Γ+ {:.2}, Γ- {:.2}", z[0], z[1]));
    }
    let f = run(seeded(Scenario::OneoverfPanels));
    let z = worst_z(&f.tables[0], 0.02);
    pass &= z[0] <= 3.0 && z[1] <= 3.0;
    parts.push(format!("1/f (2% allowance): Γ+ {:.2}, Γ- {:.2}", z[0], z[1]));
    pass &= start.elapsed().as_secs_f64() < 600.0;
    r.record(6, pass, format!("max |z| (tol 3): {}", parts.join("; ")), start);
}

fn criterion_7(r: &mut Report) {
    let start = Instant::now();
    let times: Vec<f64> = (1..=40).map(|k| 0.5 * k as f64).collect();
    let rk = RkOptions::with_rtol(1e-12);
    let gen = GeneratorOptions::default();
    let sigma = 0.1f64;
    let maps = plme_maps(&quasistatic(sigma), &DriveProfile::constant(0.0), Order::Second, &times, &gen, &rk).unwrap();
    let pure_dephasing = maps
        .iter()
        .map(|m| (m.superop.bloch_parts().0 .0[0][0] - (-2.0 * sigma * sigma * m.t * m.t).exp()).abs())
        .fold(0.0, f64::max);

    // Lab-frame Lindblad solution, rotated into the interaction frame.
    let d = 0.02;
    let maps = plme_maps(&NoiseModel::White { diffusion: d }, &DriveProfile::constant(1.0), Order::Second, &times, &gen, &rk).unwrap();
    let lab = hamiltonian_superop(&(pauli::X * 0.5)).add(&dissipator(&pauli::Z).scale(d));
    let white = maps
        .iter()
        .map(|m| {
            let v = expm(&lab.column_stacking(), m.t).unwrap();
            let u = Rotor::exp([-0.5 * m.t, 0.0, 0.0]).to_operator();
            let back = Superoperator::sandwich(&u, &u.dagger()).column_stacking();
            (back * v - m.superop.matrix).max_abs()
        })
        .fold(0.0, f64::max);
    let pass = pure_dephasing <= 1e-8 && white <= 1e-8;
    r.record(7, pass, format!("Ω=0 coherence gap {pure_dephasing:.1e} (tol 1e-8); white noise vs Lindblad {white:.1e} (tol 1e-8)"), start);
}

fn criterion_8(r: &mut Report) {
    let start = Instant::now();
    let out = run(Scenario::PositivityMap.defaults());
    let intervals: Vec<[f64; 2]> = serde_json::from_value(out.summary["negative_intervals"].clone()).unwrap();
    let ratio = out.summary["max_negativity_over_diamond"].as_f64().unwrap();
    let (detail, pass) = match intervals.first() {
        Some(&[a, b]) => {
            let onset = (2.0 * PI..=2.0 * PI + 0.5).contains(&a);
            let back = b < 3.0 * PI;
            (
                format!(
                    "χ_min < 0 on Ωt ∈ [{a:.3}, {b:.3}] = [{:.3}π, {:.3}π]; onset in [2π, 2π+0.5]: {onset}; ends before 3π: {back}; max negativity / ε {ratio:.3} (tol 1)",
                    a / PI,
                    b / PI
                ),
                onset && back && ratio <= 1.0,
            )
        }
        None => ("χ_min never negative".into(), false),
    };
    r.record(8, pass, detail, start);
}

fn criterion_9(r: &mut Report) {
    let start = Instant::now();
    let base = ExperimentConfig { seed: Some(SEED), ..Scenario::Expvals.defaults() };
    let cases = [
        ("quasistatic", base.clone()),
        ("OU τ_c=10", ExperimentConfig { noise: ou(0.05, 10.0), ..base.clone() }),
        ("OU τ_c=1", ExperimentConfig { noise: ou(0.05, 1.0), ..base.clone() }),
        ("OU τ_c=0.2", ExperimentConfig { noise: ou(0.05, 0.2), ..base.clone() }),
        ("1/f", ExperimentConfig { noise: one_over_f(), sigma_over_omega: 0.01, ..base.clone() }),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, cfg) in cases {
        let out = run(cfg);
        let t = &out.tables[0];
        // Deviation beyond three standard errors; the errors vanish for quasistatic noise.
        let excess = |m: &str| {
            ["sy", "sz"]
                .iter()
                .flat_map(|a| {
                    let (x, e, s) = (col(t, &format!("{a}_{m}")), col(t, &format!("{a}_exact")), col(t, &format!("{a}_exact_se")));
                    (0..x.len()).map(move |k| ((x[k] - e[k]).abs() - 3.0 * s[k], (x[k] - e[k]).abs()))
                })
                .fold((0.0f64, 0.0f64), |acc, v| (acc.0.max(v.0), acc.1.max(v.1)))
        };
        let (ex2, dev2) = excess("plme2");
        let (_, dev0) = excess("zeroth");
        pass &= ex2 <= 0.02;
        let mut line = format!("{name}: PLME2 {dev2:.4} (beyond 3 s.e. {ex2:.4}), 0th {dev0:.4}");
        if name == "OU τ_c=10" {
            let ratio_ok = dev0 >= 2.0 * dev2;
            pass &= ratio_ok;
            line += &format!(", 0th ≥ 2×PLME2: {ratio_ok}");
        }
        parts.push(line);
    }
    r.record(9, pass, format!("max |Δ⟨σy,z⟩| (tol 0.02): {}", parts.join("; ")), start);
}

#[test]
fn acceptance_criteria() {
    let mut r = Report { lines: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    let passed = r.lines.iter().filter(|l| l.1).count();
    println!("acceptance: {passed}/{} criteria pass", r.lines.len());
    if std::env::var("PLME_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        let failed: Vec<usize> = r.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
        assert!(failed.is_empty(), "failing criteria: {failed:?}");
    }
}

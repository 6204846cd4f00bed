// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::Command;

use plme_lab::cli::{exit_code, list_scenarios, run, run_scenario, validate, ConfigFile, EnsembleStore, ExperimentConfig, Overrides, Scenario};
use plme_lab::Error;

const RATES: &[&str] = &["gamma_1_exact", "gamma_2_exact", "gamma_3_exact", "gamma_1_se", "gamma_2_se", "gamma_3_se"];
const PROJ: &[&str] = &["proj_plus_exact", "proj_minus_exact", "proj_x_exact", "proj_plus_se", "proj_minus_se", "proj_x_se"];

const OU_EXPVALS: &str = "scenario = \"expvals\"\n[noise]\nkind = \"ornstein_uhlenbeck\"\ntau_c = 1.0\n";
const SMALL_RUN: &str = "scenario = \"expvals\"\nn_traj = 100\ngrid_points = 5\nt_max = 3.0\n[noise]\nkind = \"ornstein_uhlenbeck\"\ntau_c = 1.0\n";

/// Small versions of the defaults, quick enough for a test run.
fn reduced(s: Scenario) -> ExperimentConfig {
    let d = s.defaults();
    ExperimentConfig {
        n_traj: 200,
        grid_points: d.grid_points.min(12),
        seed: Some(1),
        sigma_values: d.sigma_values.iter().copied().take(3).collect(),
        tau_c_values: d.tau_c_values.iter().copied().take(2).collect(),
        scan_resolution: 8,
        ..d
    }
}

fn cat(parts: &[&[&str]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().map(|s| s.to_string())).collect()
}

#[test]
fn golden_headers() {
    let cases: Vec<(Scenario, Vec<(&str, Vec<String>, usize)>)> = vec![
        (
            Scenario::RatesQuasistatic,
            vec![("", cat(&[&["omega_t", "gamma_plus_plme", "gamma_minus_plme", "gamma_x_plme4"], &RATES[..3]]), 12)],
        ),
        (
            Scenario::ErrorQuasistatic,
            vec![("", cat(&[&["omega_t", "eps_zeroth", "eps_plme2", "eps_plme4", "one_norm_zeroth", "one_norm_plme2", "one_norm_plme4"]]), 12)],
        ),
        (Scenario::ShorttimeScaling, vec![("", cat(&[&["omega_t", "one_norm_zeroth", "one_norm_plme2", "eps_zeroth", "eps_plme2"]]), 12)]),
        (
            Scenario::LorentzianPanels,
            vec![
                ("", cat(&[&["tau_c", "omega_t", "gamma_plus_plme", "gamma_minus_plme", "gamma_x_plme4", "phi_plme"], RATES, PROJ]), 24),
                ("errors", cat(&[&["tau_c", "omega_t", "eps_zeroth", "eps_plme2"]]), 24),
            ],
        ),
        (
            Scenario::OneoverfPanels,
            vec![
                ("", cat(&[&["omega_t", "gamma_plus_plme", "gamma_minus_plme", "phi_plme"], RATES, PROJ]), 12),
                ("errors", cat(&[&["omega_t", "eps_zeroth", "eps_plme2"]]), 12),
            ],
        ),
        (
            Scenario::Expvals,
            vec![(
                "",
                cat(&[&[
                    "omega_t", "sy_exact", "sz_exact", "sy_exact_se", "sz_exact_se", "sy_plme2", "sz_plme2", "sy_zeroth", "sz_zeroth",
                    "sy_plme4", "sz_plme4",
                ]]),
                12,
            )],
        ),
        (
            Scenario::PositivityMap,
            vec![
                ("", cat(&[&["sigma", "omega_t", "chi_min_plme2"]]), 36),
                (
                    "diagnostics",
                    cat(&[&["omega_t"], &RATES[..3], &["diamond", "one_norm", "chi_min_plme2", "chi_min_exact"]]),
                    12,
                ),
            ],
        ),
    ];
    assert_eq!(cases.len(), Scenario::ALL.len());
    for (s, tables) in cases {
        let out = run_scenario(&reduced(s), &EnsembleStore::new(None)).unwrap();
        assert_eq!(out.tables.len(), tables.len(), "{s}");
        for (t, (name, cols, rows)) in out.tables.iter().zip(tables) {
            assert_eq!(t.name, name, "{s}");
            assert_eq!(t.columns, cols, "{s} {name}");
            assert_eq!(t.rows.len(), rows, "{s} {name}");
            assert!(t.rows.iter().flatten().all(|x| x.is_finite()), "{s} {name}");
        }
    }
}

fn read_dir_csv(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical() {
    for s in [Scenario::ErrorQuasistatic, Scenario::OneoverfPanels] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ra = run(&ExperimentConfig { output_dir: a.path().into(), ..reduced(s) }, Some(&a.path().join("c"))).unwrap();
        let rb = run(&ExperimentConfig { output_dir: b.path().into(), ..reduced(s) }, Some(&b.path().join("c"))).unwrap();
        assert_eq!(ra.hash, rb.hash);
        let (fa, fb) = (read_dir_csv(a.path()), read_dir_csv(b.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{s}");
        let side: serde_json::Value = serde_json::from_slice(&std::fs::read(&ra.sidecar).unwrap()).unwrap();
        assert_eq!(side["scenario"], s.name());
        assert_eq!(side["seed"], 1);
    }
}

#[test]
fn validation_errors() {
    let f = ConfigFile::parse("scenario = \"expvals\"\nn_traj = 0\nseed = 1\n").unwrap();
    let r = validate(&f, &Overrides::default());
    assert!(r.errors.iter().any(|e| e.contains("n_traj")), "{:?}", r.errors);
    assert!(matches!(r.into_result(), Err(Error::Config(_))));

    let f = ConfigFile::parse("scenario = \"oneoverf_panels\"\n[noise]\nkind = \"one_over_f\"\nomega_l = 2000.0\nomega_h = 1000.0\n").unwrap();
    let r = validate(&f, &Overrides::default());
    assert!(!r.errors.is_empty());

    assert!(ConfigFile::parse("scenario = \"expvals\"\nbogus = 1\n").is_err());
    let r = validate(&ConfigFile::parse("scenario = \"nope\"\n").unwrap(), &Overrides::default());
    assert!(!r.errors.is_empty());
    // Monte Carlo runs need a seed; quasistatic expectation values do not.
    assert!(!validate(&ConfigFile::parse("scenario = \"expvals\"\n").unwrap(), &Overrides::default()).missing_seed);
    let r = validate(&ConfigFile::parse(OU_EXPVALS).unwrap(), &Overrides::default());
    assert!(r.errors.is_empty() && r.missing_seed);
    assert!(r.into_result().is_err());
    let r = validate(&ConfigFile::parse(OU_EXPVALS).unwrap(), &Overrides { seed: Some(4), output_dir: None });
    assert_eq!(r.into_result().unwrap().seed, Some(4));
}

#[test]
fn one_over_f_defaults_described() {
    let f = ConfigFile::parse("scenario = \"oneoverf_panels\"\nseed = 2\n").unwrap();
    let text = validate(&f, &Overrides::default()).to_string();
    assert!(text.contains("sigma = 0.01"), "{text}");
    assert!(text.contains("omega_l = 0.001"), "{text}");
    assert!(text.contains("configuration is valid"));
}

#[test]
fn scenario_listing() {
    let list = list_scenarios();
    assert_eq!(list.len(), 7);
    let names: Vec<&str> = list.iter().map(|s| s.name).collect();
    for s in Scenario::ALL {
        assert!(names.contains(&s.name()));
        assert_eq!(Scenario::from_name(s.name()), Some(s));
    }
    assert!(list.iter().all(|s| !s.description.is_empty() && !s.parameters.is_empty()));
}

#[test]
fn exit_codes_by_error_kind() {
    assert_eq!(exit_code(&Error::Config(vec!["x".into()])), 2);
    assert_eq!(exit_code(&Error::Singular { condition: 1e9 }), 3);
    assert_eq!(exit_code(&Error::NonFinite("x")), 3);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plme-lab"))
}

#[test]
fn binary_commands() {
    let out = bin().arg("scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in Scenario::ALL {
        assert!(text.contains(s.name()));
    }

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "scenario = \"expvals\"\nn_traj = 0\n").unwrap();
    assert_eq!(bin().arg("validate").arg(&bad).status().unwrap().code(), Some(2));
    assert_eq!(bin().arg("run").arg(&bad).arg("--seed").arg("1").status().unwrap().code(), Some(2));
    assert_eq!(bin().arg("validate").arg(dir.path().join("missing.toml")).status().unwrap().code(), Some(2));

    let good = dir.path().join("good.toml");
    std::fs::write(&good, SMALL_RUN).unwrap();
    assert_eq!(bin().arg("validate").arg(&good).status().unwrap().code(), Some(0));
    // No seed anywhere.
    assert_eq!(bin().arg("run").arg(&good).arg("--out").arg(dir.path()).status().unwrap().code(), Some(2));
}

#[test]
fn binary_run_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, SMALL_RUN).unwrap();
    let cache = dir.path().join("cache");
    let go = || {
        let out = bin()
            .env("PLME_CACHE_DIR", &cache)
            .args(["run", cfg.to_str().unwrap(), "--seed", "3", "--threads", "2", "--out", dir.path().to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let paths = String::from_utf8(out.stdout).unwrap();
        let sidecar = paths.lines().find(|l| l.ends_with(".json")).unwrap().to_string();
        let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(sidecar).unwrap()).unwrap();
        let reused: Vec<bool> = doc["ensembles"].as_array().unwrap().iter().map(|e| e["reused"].as_bool().unwrap()).collect();
        (reused, read_dir_csv(dir.path()))
    };
    let (first, csv_a) = go();
    let (second, csv_b) = go();
    assert!(!first.is_empty() && first.iter().all(|r| !r));
    assert!(second.iter().all(|&r| r));
    assert_eq!(csv_a, csv_b);
    assert!(std::fs::read_dir(&cache).unwrap().count() >= 1);
}

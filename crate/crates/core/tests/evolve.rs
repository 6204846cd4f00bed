// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use plme_lab::evolve::cache::{read_ensemble, read_maps, write_ensemble, write_maps};
use plme_lab::evolve::{
    evolve_state, exact_ensemble, exact_trajectory, interaction_rotor, plme_maps, propagate_generator, quasistatic_exact_map,
    EnsembleConfig, GeneratorOptions, Provenance, QuantumMap, RkOptions, DEFAULT_DT,
};
use plme_lab::noise::{NoiseModel, NoiseTrajectory, SampleKind};
use plme_lab::plme::{DriveProfile, Order};
use plme_lab::qmath::{density_from_bloch, dissipator, expm, hamiltonian_superop, pauli};
use proptest::prelude::*;

const QS: NoiseModel = NoiseModel::Quasistatic { sigma: 0.05 };

fn bits(m: &QuantumMap) -> Vec<u64> {
    m.deviation.matrix.0.iter().flatten().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect()
}

fn point_trajectory(grid: Vec<f64>, f: impl Fn(f64) -> f64) -> NoiseTrajectory {
    let values = grid.iter().map(|&t| f(t)).collect();
    NoiseTrajectory { grid, values, kind: SampleKind::Point }
}

#[test]
fn constant_generator_matches_exponential() {
    let l = hamiltonian_superop(&(pauli::X * 0.4 + pauli::Y * 0.1)).add(&dissipator(&pauli::Z).scale(0.03));
    for t in [0.5, 3.0, 12.0] {
        let v = propagate_generator(&|_| Ok(l), 0.0, t, &RkOptions::with_rtol(1e-12), Provenance::Plme2).unwrap();
        let want = expm(&l.matrix, t).unwrap();
        assert!((v.superop.matrix - want).max_abs() < 1e-11, "t = {t}");
    }
}

#[test]
fn plme_maps_converge_and_preserve_trace() {
    let drive = DriveProfile::constant(1.0);
    let gen = GeneratorOptions::default();
    let times: Vec<f64> = (1..=20).map(|k| k as f64).collect();
    for order in [Order::Zeroth, Order::Second] {
        let coarse = plme_maps(&QS, &drive, order, &times, &gen, &RkOptions::with_rtol(1e-7)).unwrap();
        let fine = plme_maps(&QS, &drive, order, &times, &gen, &RkOptions::with_rtol(1e-11)).unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            let scale = b.deviation.matrix.max_abs();
            assert!((a.deviation.matrix - b.deviation.matrix).max_abs() < 1e-5 * scale, "{order:?} t = {}", a.t);
            assert!(b.trace_defect() < 1e-14);
        }
        let rho = evolve_state(fine.last().unwrap(), &density_from_bloch([0.6, 0.0, 0.8])).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
    }
}

#[test]
fn zero_noise_trajectory_is_identity() {
    let drive = DriveProfile::constant(1.0);
    let grid: Vec<f64> = (0..=400).map(|k| k as f64 * DEFAULT_DT).collect();
    let m = exact_trajectory(&point_trajectory(grid, |_| 0.0), &drive).unwrap();
    assert!(m.deviation.matrix.max_abs() < 1e-13);
}

#[test]
fn constant_noise_trajectory_matches_rotor() {
    let drive = DriveProfile::constant(1.0);
    for eta in [0.02, -0.1, 0.3] {
        let grid: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.01).collect();
        let m = exact_trajectory(&point_trajectory(grid, |_| eta), &drive).unwrap();
        let want = QuantumMap::from_rotor(&interaction_rotor(1.0, eta, 10.0), 10.0, Provenance::ExactEnsemble);
        assert!((m.deviation.matrix - want.deviation.matrix).max_abs() < 1e-10, "η = {eta}");
    }
}

#[test]
fn trajectory_step_halving() {
    let drive = DriveProfile::constant(1.0);
    let eta = |t: f64| 0.2 * (0.7 * t).sin() + 0.1;
    let at = |n: usize| {
        let grid: Vec<f64> = (0..=n).map(|k| 8.0 * k as f64 / n as f64).collect();
        exact_trajectory(&point_trajectory(grid, eta), &drive).unwrap().deviation.matrix
    };
    let reference = at(12_800);
    let e1 = (at(200) - reference).max_abs();
    let e2 = (at(400) - reference).max_abs();
    // Second order in the step.
    assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "{e1:e} / {e2:e}");
}

#[test]
fn ensemble_without_noise_is_identity() {
    let drive = DriveProfile::constant(1.0);
    let cfg = EnsembleConfig::new(50, DEFAULT_DT, 1, vec![0.0, 1.0, 5.0]);
    for m in [NoiseModel::Quasistatic { sigma: 0.0 }, NoiseModel::OrnsteinUhlenbeck { sigma: 0.0, tau_c: 1.0 }] {
        let e = exact_ensemble(&m, &drive, &cfg).unwrap();
        for map in &e.maps {
            assert!(map.deviation.matrix.max_abs() < 1e-13);
        }
    }
}

#[test]
fn ensemble_reproducible() {
    let drive = DriveProfile::constant(1.0);
    let grid = vec![0.5, 2.0, 6.0];
    let noises = [
        QS,
        NoiseModel::OrnsteinUhlenbeck { sigma: 0.05, tau_c: 1.0 },
        NoiseModel::OneOverF { sigma: 0.01, omega_l: 1e-3, omega_h: 1e3 },
        NoiseModel::White { diffusion: 0.01 },
    ];
    for noise in noises {
        let a = exact_ensemble(&noise, &drive, &EnsembleConfig::new(200, DEFAULT_DT, 3, grid.clone())).unwrap();
        let b = exact_ensemble(&noise, &drive, &EnsembleConfig::new(200, DEFAULT_DT, 3, grid.clone())).unwrap();
        let c = exact_ensemble(&noise, &drive, &EnsembleConfig::new(200, DEFAULT_DT, 4, grid.clone())).unwrap();
        for ((x, y), z) in a.maps.iter().zip(&b.maps).zip(&c.maps) {
            assert_eq!(bits(x), bits(y), "{}", noise.name());
            assert_ne!(bits(x), bits(z), "{}", noise.name());
        }
    }
}

#[test]
fn standard_error_scaling() {
    let drive = DriveProfile::constant(1.0);
    let se = |n: usize| {
        let e = exact_ensemble(&QS, &drive, &EnsembleConfig::new(n, DEFAULT_DT, 9, vec![3.0])).unwrap();
        e.std_err[0].0[2][2]
    };
    let ratio = se(1000) / se(4000);
    assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
}

#[test]
fn quasistatic_exact_map_examples() {
    let m = quasistatic_exact_map(0.0, 1.0, 4.0, 40).unwrap();
    assert!(m.deviation.matrix.max_abs() < 1e-15);
    // Ω = 0: ⟨σx⟩ decays as exp(−2σ²t²).
    let sigma = 0.05f64;
    for t in [1.0, 5.0, 20.0] {
        let m = quasistatic_exact_map(sigma, 0.0, t, 60).unwrap();
        let x = m.apply(&pauli::X);
        let want = (-2.0 * sigma * sigma * t * t).exp();
        assert!((x - pauli::X * want).max_abs() < 1e-12, "t = {t}");
    }
    for t in [0.5, 5.0, 17.0] {
        let a = quasistatic_exact_map(sigma, 1.0, t, 40).unwrap();
        let b = quasistatic_exact_map(sigma, 1.0, t, 80).unwrap();
        assert!((a.deviation.matrix - b.deviation.matrix).max_abs() < 1e-12);
    }
    assert!(quasistatic_exact_map(-1.0, 1.0, 1.0, 40).is_err());
    assert!(quasistatic_exact_map(0.1, 1.0, 1.0, 5).is_err());
}

#[test]
fn undriven_plme_is_exact() {
    let drive = DriveProfile::constant(0.0);
    let times = [0.5, 2.0, 8.0, 20.0];
    let maps = plme_maps(&QS, &drive, Order::Second, &times, &GeneratorOptions::default(), &RkOptions::with_rtol(1e-11)).unwrap();
    for m in &maps {
        let exact = quasistatic_exact_map(0.05, 0.0, m.t, 60).unwrap();
        assert!((m.deviation.matrix - exact.deviation.matrix).max_abs() < 1e-8, "t = {}", m.t);
    }
}

#[test]
fn evolve_state_identity() {
    let rho = density_from_bloch([0.1, -0.4, 0.3]);
    let out = evolve_state(&QuantumMap::identity(2.0, Provenance::Plme2), &rho).unwrap();
    assert_eq!(out, rho);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let drive = DriveProfile::constant(1.0);
    let times = [0.0, 1.0, 3.5];
    let maps = plme_maps(&QS, &drive, Order::Second, &times, &GeneratorOptions::default(), &RkOptions::default()).unwrap();
    let path = dir.path().join("m.bin");
    write_maps(&path, &maps, serde_json::json!({"note": "test"})).unwrap();
    let (header, back) = read_maps(&path).unwrap();
    assert_eq!(header.times, times);
    assert_eq!(header.provenance, Provenance::Plme2);
    for (a, b) in maps.iter().zip(&back) {
        assert_eq!(bits(a), bits(b));
    }

    let ens = exact_ensemble(&QS, &drive, &EnsembleConfig::new(100, DEFAULT_DT, 5, times.to_vec())).unwrap();
    let path = dir.path().join("sub/e.bin");
    write_ensemble(&path, &ens, serde_json::Value::Null).unwrap();
    let (header, back) = read_ensemble(&path).unwrap();
    assert_eq!((header.seed, header.n_traj), (Some(5), Some(100)));
    assert_eq!(back.batch_counts, ens.batch_counts);
    for (a, b) in ens.maps.iter().zip(&back.maps) {
        assert_eq!(bits(a), bits(b));
    }
    assert_eq!(back.std_err, ens.std_err);

    std::fs::write(dir.path().join("bad.bin"), b"not a cache").unwrap();
    assert!(read_maps(&dir.path().join("bad.bin")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trajectories_are_unitary(values in prop::collection::vec(-0.5f64..0.5, 2..60), dt in 1e-3f64..0.2) {
        let grid: Vec<f64> = (0..values.len()).map(|k| k as f64 * dt).collect();
        let traj = NoiseTrajectory { grid, values, kind: SampleKind::Point };
        let m = exact_trajectory(&traj, &DriveProfile::constant(1.0)).unwrap();
        prop_assert!(m.trace_defect() < 1e-14);
        // Unital and norm preserving on the Bloch ball.
        let out = m.apply(&density_from_bloch([0.0, 0.6, 0.8]));
        prop_assert!(((out * out).trace().re - 1.0).abs() < 1e-12);
        prop_assert!((m.apply(&pauli::ID) - pauli::ID).max_abs() < 1e-14);
    }
}

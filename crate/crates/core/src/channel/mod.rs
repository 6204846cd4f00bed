// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Channel diagnostics: instantaneous generators and their canonical
//! Lindblad-like form, Choi and process matrices, channel distances and
//! scans for initial states mapped outside the state space.

mod diamond;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::QuantumMap;
use crate::plme::PlmeParams;
use crate::qmath::{dissipator, hamiltonian_superop, herm_eig, kron, pauli, Basis, Mat, Operator2, Superoperator, C64};

pub use diamond::{diamond_distance, diamond_norm, DiamondOptions};

/// Default finite-difference step for [`instantaneous_generator`].
pub fn default_generator_dt(omega: f64) -> f64 {
    1e-3 * std::f64::consts::TAU / omega
}

/// Largest condition number of `V(t)` accepted when inverting it.
pub const MAX_CONDITION: f64 = 1e8;

/// Generator estimate with the size of its Richardson correction.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorEstimate {
    pub generator: Superoperator,
    /// `max |L(dt/2) − L(dt)|`, an estimate of the error before extrapolation.
    pub correction: f64,
}

fn find_map<'a>(maps: &'a [QuantumMap], t: f64) -> Result<&'a QuantumMap> {
    let tol = 1e-9 * t.abs().max(1.0);
    maps.iter()
        .find(|m| (m.t - t).abs() <= tol)
        .ok_or_else(|| Error::InvalidParameter(format!("no map at t = {t} in the series")))
}

/// `L(t) ≈ (V(t+dt) V(t)⁻¹ − I)/dt`, extrapolated from `dt` and `dt/2`.
/// The series must contain `t`, `t + dt/2` and `t + dt`.
pub fn instantaneous_generator(maps: &[QuantumMap], t: f64, dt: f64) -> Result<Superoperator> {
    let v0 = find_map(maps, t)?;
    let vh = find_map(maps, t + 0.5 * dt)?;
    let v1 = find_map(maps, t + dt)?;
    Ok(generator_from_maps(v0, vh, v1, dt)?.generator)
}

/// As [`instantaneous_generator`], computing maps on demand.
pub fn instantaneous_generator_with<F>(map_at: F, t: f64, dt: f64) -> Result<GeneratorEstimate>
where
    F: Fn(f64) -> Result<QuantumMap>,
{
    let v0 = map_at(t)?;
    let vh = map_at(t + 0.5 * dt)?;
    let v1 = map_at(t + dt)?;
    generator_from_maps(&v0, &vh, &v1, dt)
}

/// Richardson-extrapolated forward difference from maps at `t`, `t + dt/2`
/// and `t + dt`.
pub fn generator_from_maps(v0: &QuantumMap, vh: &QuantumMap, v1: &QuantumMap, dt: f64) -> Result<GeneratorEstimate> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be finite and > 0, got {dt}")));
    }
    let (inv, cond) = v0.superop.column_stacking().inverse_with_cond()?;
    if !(cond < MAX_CONDITION) {
        return Err(Error::Singular { condition: cond });
    }
    let w0 = v0.deviation.column_stacking();
    // V(t+h)V(t)⁻¹ − I = (W(t+h) − W(t)) V(t)⁻¹
    let l_full = (v1.deviation.column_stacking() - w0) * inv * (1.0 / dt);
    let l_half = (vh.deviation.column_stacking() - w0) * inv * (2.0 / dt);
    let generator = l_half * 2.0 - l_full;
    Ok(GeneratorEstimate {
        generator: Superoperator::new(generator, Basis::ColumnStacking),
        correction: (l_half - l_full).max_abs(),
    })
}

/// Coefficients `c_μν` of `S = Σ c_μν P_μ · P_ν` over `{I, σx, σy, σz}`.
pub fn pauli_coefficients(s: &Superoperator) -> Mat<4> {
    let m = s.column_stacking();
    Mat::from_fn(|mu, nu| {
        // vec(P_μ X P_ν) = (P_νᵀ ⊗ P_μ) vec X
        let b = kron(&pauli::ALL[nu].transpose(), &pauli::ALL[mu]);
        b.hs_inner(&m) * 0.25
    })
}

/// `−i[H, ·] + Σ_k rate_k D[√2 J_k]` with HS-orthonormal `J_k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalGenerator {
    /// Traceless Hermitian Hamiltonian.
    #[serde(with = "op_serde")]
    pub hamiltonian: Operator2,
    /// Kossakowski matrix in the basis `σ/√2`.
    #[serde(with = "mat3c_serde")]
    pub kossakowski: [[C64; 3]; 3],
    /// Rates, ordered by decreasing magnitude; each multiplies the
    /// dissipator of a Pauli-normalized jump operator `√2 J_k`.
    pub rates: [f64; 3],
    /// Jump operators `J_k = Σ_i u_ik σ_i/√2`, orthonormal under `Tr(A†B)`.
    #[serde(with = "ops_serde")]
    pub jump_ops: [Operator2; 3],
    /// Eigenvector components `u_ik` along `(σx, σy, σz)`, per rate.
    #[serde(with = "vecs_serde")]
    pub jump_vectors: [[C64; 3]; 3],
}

impl CanonicalGenerator {
    pub fn reassemble(&self) -> Superoperator {
        let mut l = hamiltonian_superop(&self.hamiltonian);
        for (r, j) in self.rates.iter().zip(&self.jump_ops) {
            l = l.add(&dissipator(&(*j * std::f64::consts::SQRT_2)).scale(*r));
        }
        l
    }

    /// `H = Σ h_i σ_i`, returns `(h_x, h_y, h_z)`.
    pub fn hamiltonian_coefficients(&self) -> [f64; 3] {
        pauli::components(&self.hamiltonian)
    }
}

/// Unique decomposition of a trace- and Hermiticity-preserving generator.
pub fn canonical_decompose(l: &Superoperator) -> Result<CanonicalGenerator> {
    if !l.is_finite() {
        return Err(Error::NonFinite("generator"));
    }
    let scale = l.matrix.max_abs().max(1.0);
    let tdef = l.trace_defect(0.0);
    if tdef > 1e-8 * scale {
        return Err(Error::InvalidParameter(format!("generator is not trace-preserving (defect {tdef:.3e})")));
    }
    let hdef = l.hermiticity_defect();
    if hdef > 1e-8 * scale {
        return Err(Error::NotHermitian { defect: hdef });
    }
    let c = pauli_coefficients(l);
    // H = −Σ Im(c_j0) σ_j, using the Hermitian average of c_j0 and c_0j*.
    let mut hamiltonian = Operator2::zeros();
    for j in 1..4 {
        let cj0 = 0.5 * (c[(j, 0)] + c[(0, j)].conj());
        hamiltonian += pauli::ALL[j] * (-cj0.im);
    }
    let mut block = Mat::<3>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            block[(i, j)] = c[(i + 1, j + 1)];
        }
    }
    let block = block.hermitian_part();
    let eig = herm_eig(&block)?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.values[b].abs().total_cmp(&eig.values[a].abs()));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut rates = [0.0; 3];
    let mut jump_ops = [Operator2::zeros(); 3];
    let mut jump_vectors = [[C64::new(0.0, 0.0); 3]; 3];
    for (k, &idx) in order.iter().enumerate() {
        rates[k] = eig.values[idx];
        // Fix the phase so the largest component is real and positive.
        let col: [C64; 3] = std::array::from_fn(|i| eig.vectors[(i, idx)]);
        let big = col.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(C64::new(1.0, 0.0));
        let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { C64::new(1.0, 0.0) };
        let col = col.map(|x| x * phase);
        jump_vectors[k] = col;
        let mut op = Operator2::zeros();
        for i in 0..3 {
            op += pauli::ALL[i + 1] * (col[i] * r);
        }
        jump_ops[k] = op;
    }
    let kossakowski = std::array::from_fn(|i| std::array::from_fn(|j| block[(i, j)] * 2.0));
    Ok(CanonicalGenerator { hamiltonian, kossakowski, rates, jump_ops, jump_vectors })
}

/// Rates assigned to the labels `(Γ₊, Γ₋, Γₓ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedRates {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_x: f64,
    /// Mean squared overlap of the chosen assignment, in `[0, 1]`.
    pub overlap: f64,
}

/// Unit vectors along `τᵘ`, `τᵛ` and `σx` in `(σx, σy, σz)` components.
pub fn plme_label_directions(p: &PlmeParams) -> [[f64; 3]; 3] {
    let (s, c) = p.theta_tilde().sin_cos();
    [[0.0, s, c], [0.0, c, -s], [1.0, 0.0, 0.0]]
}

/// Assigns rates to labelled directions by the permutation maximizing the
/// total squared overlap of the jump operators with the directions.
pub fn match_rates(g: &CanonicalGenerator, directions: &[[f64; 3]; 3]) -> MatchedRates {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let overlap = |label: usize, k: usize| -> f64 {
        let v = &g.jump_vectors[k];
        let d = &directions[label];
        (0..3).map(|i| v[i] * d[i]).sum::<C64>().norm_sqr()
    };
    let mut best = (f64::NEG_INFINITY, PERMS[0]);
    for p in PERMS {
        let score: f64 = (0..3).map(|label| overlap(label, p[label])).sum();
        if score > best.0 {
            best = (score, p);
        }
    }
    let p = best.1;
    MatchedRates { gamma_plus: g.rates[p[0]], gamma_minus: g.rates[p[1]], gamma_x: g.rates[p[2]], overlap: best.0 / 3.0 }
}

/// Rate of `D[d·σ]` in the generator for each unit direction `d`, i.e.
/// `d·c·d` with `c` the dissipative coefficient block. Equals the canonical
/// rate when a jump operator lies along `d`, and unlike the eigenvalues it is
/// linear in the generator, so it stays well behaved for nearly degenerate
/// rates.
pub fn projected_rates(g: &CanonicalGenerator, directions: &[[f64; 3]; 3]) -> [f64; 3] {
    directions.map(|d| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += d[i] * d[j] * g.kossakowski[i][j].re;
            }
        }
        0.5 * s
    })
}

/// `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
pub fn choi_of(s: &Superoperator) -> Mat<4> {
    let mut j = Mat::<4>::zeros();
    for a in 0..2 {
        for b in 0..2 {
            let mut e = Operator2::zeros();
            e[(a, b)] = C64::new(1.0, 0.0);
            let out = s.apply(&e);
            for x in 0..2 {
                for y in 0..2 {
                    j[(2 * a + x, 2 * b + y)] = out[(x, y)];
                }
            }
        }
    }
    j
}

pub fn choi(map: &QuantumMap) -> Mat<4> {
    choi_of(&map.superop)
}

/// Maximum absolute column sum of a column-stacking superoperator.
pub fn one_norm(s: &Superoperator) -> Result<f64> {
    if s.basis != Basis::ColumnStacking {
        return Err(Error::BasisMismatch);
    }
    Ok(s.matrix.norm_one())
}

/// `‖V_A − V_B‖₁` in the column-stacking basis.
pub fn one_norm_distance(a: &QuantumMap, b: &QuantumMap) -> Result<f64> {
    one_norm(&a.deviation.sub(&b.deviation))
}

/// `‖A − B‖₁` for superoperators written in the same basis.
pub fn superop_one_norm_distance(a: &Superoperator, b: &Superoperator) -> Result<f64> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch);
    }
    one_norm(&Superoperator::new(a.matrix - b.matrix, a.basis).to_basis(Basis::ColumnStacking))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDistance {
    pub t: f64,
    pub diamond: f64,
    pub one_norm: f64,
}

pub fn channel_distance(a: &QuantumMap, b: &QuantumMap, opts: &DiamondOptions) -> Result<ChannelDistance> {
    Ok(ChannelDistance { t: a.t, diamond: diamond_distance(a, b, opts)?, one_norm: one_norm_distance(a, b)? })
}

/// `χ` with `Φ(ρ) = Σ χ_nm P_n ρ P_m` and its smallest eigenvalue.
#[derive(Clone, Copy, Debug)]
pub struct ProcessMatrix {
    pub chi: Mat<4>,
    pub min_eigenvalue: f64,
}

pub fn process_matrix(map: &QuantumMap) -> Result<ProcessMatrix> {
    // Built from the deviation so small eigenvalues keep their precision.
    let mut chi = pauli_coefficients(&map.deviation).hermitian_part();
    chi[(0, 0)] += C64::new(1.0, 0.0);
    let min_eigenvalue = herm_eig(&chi)?.values[0];
    Ok(ProcessMatrix { chi, min_eigenvalue })
}

/// Pure initial states whose image has a negative eigenvalue.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlochScan {
    pub t: f64,
    pub resolution: usize,
    /// Flagged `(θ, φ, λ_min)`.
    pub flagged: Vec<(f64, f64, f64)>,
    /// Flagged solid angle as a fraction of the sphere.
    pub measure: f64,
    /// Smallest output eigenvalue over the whole grid.
    pub min_eigenvalue: f64,
}

/// Threshold below which an output eigenvalue counts as negative.
pub const NEGATIVITY_THRESHOLD: f64 = -1e-12;

/// Smallest eigenvalue of `Φ(|ψ⟩⟨ψ|)` for the pure state with Bloch vector `r`.
fn image_min_eigenvalue(map: &QuantumMap, r: [f64; 3]) -> f64 {
    let (m, t) = map.deviation.bloch_parts();
    let d = m.apply(r);
    let tr_dev = {
        // Trace change; zero for trace-preserving maps.
        let rho = crate::qmath::density_from_bloch(r);
        map.deviation.apply(&rho).trace().re
    };
    let delta = [d[0] + t[0], d[1] + t[1], d[2] + t[2]];
    let rn = [r[0] + delta[0], r[1] + delta[1], r[2] + delta[2]];
    let norm = (rn[0] * rn[0] + rn[1] * rn[1] + rn[2] * rn[2]).sqrt();
    // 1 − |r + δ| without cancellation, |r| = 1.
    let dot = r[0] * delta[0] + r[1] * delta[1] + r[2] * delta[2];
    let dd = delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2];
    let one_minus = -(2.0 * dot + dd) / (1.0 + norm);
    0.5 * (one_minus + tr_dev)
}

/// Scans `resolution` polar × `2·resolution` azimuthal cell centres.
pub fn nonphysical_state_scan(map: &QuantumMap, resolution: usize) -> Result<BlochScan> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be ≥ 1".into()));
    }
    let nt = resolution;
    let np = 2 * resolution;
    let dth = std::f64::consts::PI / nt as f64;
    let dph = std::f64::consts::TAU / np as f64;
    let rows: Vec<(Vec<(f64, f64, f64)>, f64, f64)> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let th = (i as f64 + 0.5) * dth;
            let (st, ct) = th.sin_cos();
            let mut flagged = Vec::new();
            let mut measure = 0.0;
            let mut lmin = f64::INFINITY;
            for k in 0..np {
                let ph = (k as f64 + 0.5) * dph;
                let (sp, cp) = ph.sin_cos();
                let l = image_min_eigenvalue(map, [st * cp, st * sp, ct]);
                lmin = lmin.min(l);
                if l < NEGATIVITY_THRESHOLD {
                    flagged.push((th, ph, l));
                    // Exact cell solid angle.
                    measure += dph * (((i as f64) * dth).cos() - ((i as f64 + 1.0) * dth).cos());
                }
            }
            (flagged, measure, lmin)
        })
        .collect();
    let mut scan = BlochScan { t: map.t, resolution, flagged: Vec::new(), measure: 0.0, min_eigenvalue: f64::INFINITY };
    for (f, m, l) in rows {
        scan.flagged.extend(f);
        scan.measure += m;
        scan.min_eigenvalue = scan.min_eigenvalue.min(l);
    }
    scan.measure /= 4.0 * std::f64::consts::PI;
    Ok(scan)
}

mod op_serde {
    use super::{Operator2, C64};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Operator2, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<(f64, f64)>> = m.0.iter().map(|r| r.iter().map(|c| (c.re, c.im)).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Operator2, D::Error> {
        let rows: [[(f64, f64); 2]; 2] = Deserialize::deserialize(d)?;
        Ok(crate::qmath::Mat(rows.map(|r| r.map(|(re, im)| C64::new(re, im)))))
    }
}

mod ops_serde {
    use super::{op_serde, Operator2};
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    struct Wrap<'a>(&'a Operator2);

    impl serde::Serialize for Wrap<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            op_serde::serialize(self.0, s)
        }
    }

    #[derive(Deserialize)]
    struct Own(#[serde(with = "op_serde")] Operator2);

    pub fn serialize<S: Serializer>(ops: &[Operator2; 3], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        for op in ops {
            seq.serialize_element(&Wrap(op))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Operator2; 3], D::Error> {
        let v: [Own; 3] = Deserialize::deserialize(d)?;
        Ok(v.map(|o| o.0))
    }
}

mod mat3c_serde {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[[C64; 3]; 3], s: S) -> Result<S::Ok, S::Error> {
        m.map(|r| r.map(|c| (c.re, c.im))).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[C64; 3]; 3], D::Error> {
        let rows: [[(f64, f64); 3]; 3] = Deserialize::deserialize(d)?;
        Ok(rows.map(|r| r.map(|(re, im)| C64::new(re, im))))
    }
}

use mat3c_serde as vecs_serde;

// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matrix::{kron, Mat};
use crate::error::{Error, Result};
use super::real3::Mat3;
use super::{pauli, Operator2};

/// Coordinates in which a [`Superoperator`] matrix is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `vec(ρ)` stacks the columns of ρ: `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
    ColumnStacking,
    /// Components along `{I, σx, σy, σz}/√2`.
    NormalizedPauli,
}

/// Linear map on 2×2 operators, as a 4×4 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superoperator {
    pub matrix: Mat<4>,
    pub basis: Basis,
}

/// Column-stacking vectorization.
pub fn vec(x: &Operator2) -> [C64; 4] {
    [x[(0, 0)], x[(1, 0)], x[(0, 1)], x[(1, 1)]]
}

pub fn unvec(v: &[C64; 4]) -> Operator2 {
    Mat([[v[0], v[2]], [v[1], v[3]]])
}

/// Unitary whose columns are `vec(P_μ/√2)`.
fn pauli_change() -> &'static Mat<4> {
    static T: OnceLock<Mat<4>> = OnceLock::new();
    T.get_or_init(|| {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut t = Mat::<4>::zeros();
        for (mu, p) in pauli::ALL.iter().enumerate() {
            let v = vec(p);
            for row in 0..4 {
                t[(row, mu)] = v[row] * r;
            }
        }
        t
    })
}

impl Superoperator {
    pub fn new(matrix: Mat<4>, basis: Basis) -> Self {
        Superoperator { matrix, basis }
    }

    pub fn zero(basis: Basis) -> Self {
        Superoperator { matrix: Mat::zeros(), basis }
    }

    pub fn identity(basis: Basis) -> Self {
        Superoperator { matrix: Mat::identity(), basis }
    }

    /// `ρ ↦ A ρ B`.
    pub fn sandwich(a: &Operator2, b: &Operator2) -> Self {
        Superoperator::new(kron(&b.transpose(), a), Basis::ColumnStacking)
    }

    pub fn to_basis(&self, basis: Basis) -> Superoperator {
        if basis == self.basis {
            return *self;
        }
        let t = pauli_change();
        let matrix = match basis {
            Basis::NormalizedPauli => t.dagger() * self.matrix * *t,
            Basis::ColumnStacking => *t * self.matrix * t.dagger(),
        };
        Superoperator { matrix, basis }
    }

    pub fn column_stacking(&self) -> Mat<4> {
        self.to_basis(Basis::ColumnStacking).matrix
    }

    pub fn apply(&self, x: &Operator2) -> Operator2 {
        let m = self.column_stacking();
        let v = vec(x);
        let out = std::array::from_fn(|i| (0..4).map(|j| m[(i, j)] * v[j]).sum());
        unvec(&out)
    }

    /// `self ∘ rhs`, expressed in this operator's basis.
    pub fn compose(&self, rhs: &Superoperator) -> Superoperator {
        let r = rhs.to_basis(self.basis);
        Superoperator { matrix: self.matrix * r.matrix, basis: self.basis }
    }

    pub fn add(&self, rhs: &Superoperator) -> Superoperator {
        let r = rhs.to_basis(self.basis);
        Superoperator { matrix: self.matrix + r.matrix, basis: self.basis }
    }

    pub fn sub(&self, rhs: &Superoperator) -> Superoperator {
        let r = rhs.to_basis(self.basis);
        Superoperator { matrix: self.matrix - r.matrix, basis: self.basis }
    }

    pub fn scale(&self, s: f64) -> Superoperator {
        Superoperator { matrix: self.matrix * s, basis: self.basis }
    }

    /// Real Pauli transfer matrix `R_μν = ½ Tr(σ_μ Φ(σ_ν))`, returned as the
    /// Bloch block `R_ij` (i, j ≥ 1) and the column `R_i0`.
    ///
    /// Imaginary parts are dropped; they vanish for Hermiticity-preserving maps.
    pub fn bloch_parts(&self) -> (Mat3, [f64; 3]) {
        let p = self.to_basis(Basis::NormalizedPauli).matrix;
        let mut m = Mat3::ZERO;
        let mut t = [0.0; 3];
        for i in 0..3 {
            t[i] = p[(i + 1, 0)].re;
            for j in 0..3 {
                m.0[i][j] = p[(i + 1, j + 1)].re;
            }
        }
        (m, t)
    }

    /// Map acting on Bloch vectors affinely: `I ↦ λ I + t·σ`, `v·σ ↦ (M v)·σ`,
    /// with trace row `(λ, 0, 0, 0)`.
    pub fn from_bloch(m: &Mat3, translation: [f64; 3], trace_row: f64) -> Superoperator {
        let mut p = Mat::<4>::zeros();
        p[(0, 0)] = C64::new(trace_row, 0.0);
        for i in 0..3 {
            p[(i + 1, 0)] = C64::new(translation[i], 0.0);
            for j in 0..3 {
                p[(i + 1, j + 1)] = C64::new(m.0[i][j], 0.0);
            }
        }
        Superoperator::new(p, Basis::NormalizedPauli).to_basis(Basis::ColumnStacking)
    }

    /// Hermiticity-preservation defect: `max |Φ(X†) − Φ(X)†|` over Pauli inputs.
    pub fn hermiticity_defect(&self) -> f64 {
        pauli::ALL
            .iter()
            .map(|p| {
                let y = self.apply(p);
                (y - y.dagger()).max_abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `Tr Φ(X)` from `λ Tr X`.
    pub fn trace_defect(&self, lambda: f64) -> f64 {
        let m = self.column_stacking();
        // Row vector vec(I)† M compared with λ vec(I)†.
        let rows = [0usize, 3];
        (0..4)
            .map(|j| {
                let s: C64 = rows.iter().map(|&r| m[(r, j)]).sum();
                let target = if j == 0 || j == 3 { lambda } else { 0.0 };
                (s - C64::new(target, 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.is_finite()
    }
}

/// `−i[H, ·]`.
pub fn hamiltonian_superop(h: &Operator2) -> Superoperator {
    let id = Mat::<2>::identity();
    let m = kron(&id, h) - kron(&h.transpose(), &id);
    Superoperator::new(m * C64::new(0.0, -1.0), Basis::ColumnStacking)
}

/// [`hamiltonian_superop`] for an `h` that must be Hermitian to `1e-10` of
/// its scale.
pub fn try_hamiltonian_superop(h: &Operator2) -> Result<Superoperator> {
    let defect = h.hermiticity_defect();
    if defect > 1e-10 * h.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(hamiltonian_superop(h))
}

/// `X ↦ [A, X]`.
pub fn commutator_superop(a: &Operator2) -> Superoperator {
    let id = Mat::<2>::identity();
    Superoperator::new(kron(&id, a) - kron(&a.transpose(), &id), Basis::ColumnStacking)
}

/// `D[L]ρ = LρL† − ½{L†L, ρ}`.
pub fn dissipator(l: &Operator2) -> Superoperator {
    let id = Mat::<2>::identity();
    let ldl = l.dagger() * *l;
    let m = kron(&l.conj(), l) - (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * 0.5;
    Superoperator::new(m, Basis::ColumnStacking)
}

impl Default for Superoperator {
    fn default() -> Self {
        Superoperator::zero(Basis::ColumnStacking)
    }
}

// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense linear algebra for a single qubit: 2×2 operators, 4×4
//! superoperators, Hermitian eigensolver, matrix exponential and SU(2)
//! rotors.

mod eig;
mod expm;
mod matrix;
mod real3;
mod rotor;
mod superop;

pub use eig::{herm_eig, min_eigenvalue, trace_norm_hermitian, HermEig};
pub use expm::{expm, unitary_exp};
pub use matrix::{kron, Mat, I, ONE, ZERO};
pub use real3::Mat3;
pub use rotor::Rotor;
pub use superop::{commutator_superop, dissipator, hamiltonian_superop, try_hamiltonian_superop, unvec, vec, Basis, Superoperator};

pub use num_complex::Complex64 as C64;

/// 2×2 complex operator on the qubit Hilbert space.
pub type Operator2 = Mat<2>;

pub mod pauli {
    use super::{Operator2, C64};
    use super::matrix::Mat;

    const fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub const ID: Operator2 = Mat([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
    pub const X: Operator2 = Mat([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
    pub const Y: Operator2 = Mat([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
    pub const Z: Operator2 = Mat([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]);

    /// `[I, X, Y, Z]`.
    pub const ALL: [Operator2; 4] = [ID, X, Y, Z];

    /// `v·σ` for a real 3-vector.
    pub fn dot(v: [f64; 3]) -> Operator2 {
        X * v[0] + Y * v[1] + Z * v[2]
    }

    /// Real Pauli components `(Tr(σx A), Tr(σy A), Tr(σz A)) / 2`.
    pub fn components(a: &Operator2) -> [f64; 3] {
        [
            (X * *a).trace().re / 2.0,
            (Y * *a).trace().re / 2.0,
            (Z * *a).trace().re / 2.0,
        ]
    }
}

/// Density matrix from a Bloch vector.
pub fn density_from_bloch(r: [f64; 3]) -> Operator2 {
    (pauli::ID + pauli::dot(r)) * 0.5
}

/// Bloch vector of a Hermitian operator with unit trace.
pub fn bloch_from_density(rho: &Operator2) -> [f64; 3] {
    let c = pauli::components(rho);
    [2.0 * c[0], 2.0 * c[1], 2.0 * c[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let xy = pauli::X * pauli::Y;
        assert!((xy - pauli::Z * I).max_abs() < 1e-16);
        assert!((pauli::X.commutator(&pauli::Y) - pauli::Z * C64::new(0.0, 2.0)).max_abs() < 1e-16);
        for p in pauli::ALL {
            assert!(((p * p) - pauli::ID).max_abs() < 1e-16);
        }
    }

    #[test]
    fn bloch_roundtrip() {
        let r = [0.1, -0.4, 0.3];
        let b = bloch_from_density(&density_from_bloch(r));
        for k in 0..3 {
            assert!((b[k] - r[k]).abs() < 1e-15);
        }
    }
}

// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;

use super::matrix::Mat;
use super::real3::Mat3;

/// SU(2) element `U = s·I − i v·σ` with `s² + |v|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotor {
    pub s: f64,
    pub v: [f64; 3],
}

impl Default for Rotor {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Rotor {
    pub const IDENTITY: Rotor = Rotor { s: 1.0, v: [0.0; 3] };

    /// `exp(−i b·σ)`.
    pub fn exp(b: [f64; 3]) -> Rotor {
        let n2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        let n = n2.sqrt();
        let (c, sinc) = if n < 1e-4 {
            (1.0 - n2 / 2.0 + n2 * n2 / 24.0, 1.0 - n2 / 6.0 + n2 * n2 / 120.0)
        } else {
            (n.cos(), n.sin() / n)
        };
        Rotor { s: c, v: [b[0] * sinc, b[1] * sinc, b[2] * sinc] }
    }

    /// Group product `self · rhs`.
    #[inline]
    pub fn then_left(&self, rhs: &Rotor) -> Rotor {
        let (s1, v1, s2, v2) = (self.s, self.v, rhs.s, rhs.v);
        Rotor {
            s: s1 * s2 - (v1[0] * v2[0] + v1[1] * v2[1] + v1[2] * v2[2]),
            v: [
                s1 * v2[0] + s2 * v1[0] + v1[1] * v2[2] - v1[2] * v2[1],
                s1 * v2[1] + s2 * v1[1] + v1[2] * v2[0] - v1[0] * v2[2],
                s1 * v2[2] + s2 * v1[2] + v1[0] * v2[1] - v1[1] * v2[0],
            ],
        }
    }

    pub fn dagger(&self) -> Rotor {
        Rotor { s: self.s, v: [-self.v[0], -self.v[1], -self.v[2]] }
    }

    pub fn normalized(&self) -> Rotor {
        let n = (self.s * self.s + self.v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        Rotor { s: self.s / n, v: [self.v[0] / n, self.v[1] / n, self.v[2] / n] }
    }

    pub fn to_operator(&self) -> Mat<2> {
        let [x, y, z] = self.v;
        Mat([
            [C64::new(self.s, -z), C64::new(-y, -x)],
            [C64::new(y, -x), C64::new(self.s, z)],
        ])
    }

    /// Rotation `R` with `U (r·σ) U† = (R r)·σ`, minus the identity.
    ///
    /// Computed as `2s[v]× + 2[v]×²`, which has no cancellation for rotors
    /// near ±I.
    pub fn bloch_deviation(&self) -> Mat3 {
        let k = Mat3::cross(self.v);
        k.scale(2.0 * self.s) + (k * k).scale(2.0)
    }

    pub fn bloch_rotation(&self) -> Mat3 {
        Mat3::IDENTITY + self.bloch_deviation()
    }
}

impl std::ops::Mul for Rotor {
    type Output = Rotor;
    fn mul(self, rhs: Rotor) -> Rotor {
        self.then_left(&rhs)
    }
}

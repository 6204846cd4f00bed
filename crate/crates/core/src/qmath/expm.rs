// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;

use super::matrix::Mat;
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(scale · m)` by scaling and squaring with a degree-13 Padé approximant.
pub fn expm<const N: usize>(m: &Mat<N>, scale: f64) -> Result<Mat<N>> {
    let a = m.scale_re(scale);
    if !a.is_finite() {
        return Err(Error::NonFinite("expm argument"));
    }
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(Mat::identity());
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale_re(0.5f64.powi(s));
    let id = Mat::<N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let b = &PADE13;
    let u_inner = a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] + id * b[1];
    let u = a * u_inner;
    let v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] + id * b[0];
    let q_inv = (v - u).inverse()?;
    let mut r = q_inv * (v + u);
    for _ in 0..s {
        r = r * r;
    }
    if !r.is_finite() {
        return Err(Error::NonFinite("expm result"));
    }
    Ok(r)
}

/// `exp(-i t H)` for a 2×2 Hermitian `H`, from the closed Pauli formula.
pub fn unitary_exp(h: &Mat<2>, t: f64) -> Mat<2> {
    let tr = h.trace().re / 2.0;
    let hx = h[(0, 1)].re;
    let hy = h[(1, 0)].im;
    let hz = (h[(0, 0)].re - h[(1, 1)].re) / 2.0;
    let n = (hx * hx + hy * hy + hz * hz).sqrt();
    let (c, sinc) = if n * t.abs() < 1e-8 {
        let x = n * t;
        (1.0 - x * x / 2.0, t * (1.0 - x * x / 6.0))
    } else {
        ((n * t).cos(), (n * t).sin() / n)
    };
    let phase = C64::from_polar(1.0, -tr * t);
    let mi = C64::new(0.0, -1.0);
    let m = Mat([
        [C64::new(c, 0.0) + mi * sinc * hz, mi * sinc * C64::new(hx, -hy)],
        [mi * sinc * C64::new(hx, hy), C64::new(c, 0.0) - mi * sinc * hz],
    ]);
    m * phase
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::pauli;

    #[test]
    fn matches_pauli_formula() {
        let h = pauli::X * 0.3 + pauli::Y * -1.1 + pauli::Z * 0.7 + Mat::identity() * 0.2;
        for &t in &[0.0, 0.1, 1.0, 7.5, 40.0] {
            let m = h * C64::new(0.0, -1.0);
            let e = expm(&m, t).unwrap();
            let u = unitary_exp(&h, t);
            assert!((e - u).max_abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn nilpotent() {
        let n = Mat::<4>::from_fn(|i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let e = expm(&n, 2.0).unwrap();
        // exp(2N) = I + 2N + 2N² + (4/3)N³
        assert!((e[(0, 3)].re - 4.0 / 3.0).abs() < 1e-14);
        assert!((e[(0, 2)].re - 2.0).abs() < 1e-14);
    }
}

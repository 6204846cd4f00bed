// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64 as C64;

use super::matrix::{Mat, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig<const N: usize> {
    /// Ascending eigenvalues.
    pub values: [f64; N],
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: Mat<N>,
}

const MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi diagonalization.
///
/// The input must be Hermitian to within `1e-10` of its scale, otherwise
/// [`Error::NotHermitian`] is returned.
pub fn herm_eig<const N: usize>(m: &Mat<N>) -> Result<HermEig<N>> {
    let scale = m.max_abs();
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix passed to herm_eig"));
    }
    let defect = m.hermiticity_defect();
    if defect > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { defect });
    }
    let mut a = m.hermitian_part();
    let mut v = Mat::<N>::identity();
    if scale == 0.0 {
        return Ok(HermEig { values: [0.0; N], vectors: v });
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.0[i][j].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.0[p][q];
                let g = apq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let phase = apq / g;
                let tau = (a.0[q][q].re - a.0[p][p].re) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J has J_pp = J_qq = c, J_pq = s·e^{iα}, J_qp = -s·e^{-iα}.
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                // A <- A J (columns p, q)
                for k in 0..N {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * c + akq * jqp;
                    a.0[k][q] = akp * jpq + akq * c;
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * c + vkq * jqp;
                    v.0[k][q] = vkp * jpq + vkq * c;
                }
                // A <- J† A (rows p, q)
                for k in 0..N {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = apk * c + aqk * jqp.conj();
                    a.0[q][k] = apk * jpq.conj() + aqk * c;
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p] = C64::new(a.0[p][p].re, 0.0);
                a.0[q][q] = C64::new(a.0[q][q].re, 0.0);
            }
        }
    }
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let values = std::array::from_fn(|k| a.0[order[k]][order[k]].re);
    let vectors = Mat::from_fn(|i, k| v.0[i][order[k]]);
    Ok(HermEig { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<const N: usize>(m: &Mat<N>) -> Result<f64> {
    Ok(herm_eig(m)?.values[0])
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian<const N: usize>(m: &Mat<N>) -> Result<f64> {
    Ok(herm_eig(m)?.values.iter().map(|x| x.abs()).sum())
}

impl<const N: usize> HermEig<N> {
    pub fn reconstruct(&self) -> Mat<N> {
        let d = Mat::from_fn(|i, j| if i == j { ONE * self.values[i] } else { ZERO });
        self.vectors * d * self.vectors.dagger()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_spectrum() {
        let y = Mat::<2>([[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]]);
        let e = herm_eig(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        assert!((e.reconstruct() - y).max_abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Mat::<2>::from_real([[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_4x4() {
        let m = Mat::<4>::identity() * 3.0;
        let e = herm_eig(&m).unwrap();
        assert!(e.values.iter().all(|&x| (x - 3.0).abs() < 1e-15));
    }
}

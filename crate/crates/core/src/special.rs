// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Cosine and sine integrals.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_MAX: f64 = 2.0;
const EPS: f64 = 1e-17;
const MAX_TERMS: usize = 200;

/// `(Ci(x), Si(x))` for `x > 0`.
///
/// Power series below `x = 2`, continued fraction for `E₁(ix)` above.
pub fn cisi(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("cisi requires finite x > 0, got {x}")));
    }
    if x <= SERIES_MAX {
        series(x)
    } else {
        continued_fraction(x)
    }
}

/// `Ci(x) = γ + ln x + ∫₀ˣ (cos t − 1)/t dt`, for `x > 0`.
pub fn ci(x: f64) -> Result<f64> {
    cisi(x).map(|(c, _)| c)
}

/// `Si(x) = ∫₀ˣ sin t / t dt`, odd in `x`.
pub fn si(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let (_, s) = cisi(x.abs())?;
    Ok(s.copysign(x))
}

/// `Cin(x) = ∫₀ˣ (1 − cos t)/t dt = γ + ln x − Ci(x)`, accurate for small x.
pub fn cin(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let x = x.abs();
    if x <= SERIES_MAX {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..MAX_TERMS {
            let kk = 2 * k;
            term *= -x2 / ((kk - 1) as f64 * kk as f64);
            let add = -term / kk as f64;
            sum += add;
            if add.abs() <= EPS * sum.abs() {
                return Ok(sum);
            }
        }
        Err(Error::NonConvergence("Cin series".into()))
    } else {
        Ok(EULER_GAMMA + x.ln() - ci(x)?)
    }
}

/// `x − sin x` without cancellation for small `x`.
pub fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 1.0 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = 0.0;
        for k in 1..20 {
            term *= -x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum -= term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        x - x.sin()
    }
}

fn series(x: f64) -> Result<(f64, f64)> {
    let x2 = x * x;
    // Si: Σ (−1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    let mut term = x;
    let mut s = x;
    let mut done_s = false;
    // Ci − γ − ln x: Σ_{k≥1} (−1)^k x^{2k} / (2k (2k)!)
    let mut cterm = 1.0;
    let mut c = 0.0;
    let mut done_c = false;
    for k in 1..MAX_TERMS {
        if !done_s {
            let n = (2 * k + 1) as f64;
            term *= -x2 / ((n - 1.0) * n);
            let add = term / n;
            s += add;
            done_s = add.abs() <= EPS * s.abs();
        }
        if !done_c {
            let n = (2 * k) as f64;
            cterm *= -x2 / ((n - 1.0) * n);
            let add = cterm / n;
            c += add;
            done_c = add.abs() <= EPS * c.abs().max(1e-300);
        }
        if done_s && done_c {
            return Ok((EULER_GAMMA + x.ln() + c, s));
        }
    }
    Err(Error::NonConvergence(format!("Ci/Si series at x = {x}")))
}

fn continued_fraction(x: f64) -> Result<(f64, f64)> {
    let tiny = 1e-300;
    let mut b = C64::new(1.0, x);
    let mut c = C64::new(1.0 / tiny, 0.0);
    let mut d = C64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..MAX_TERMS * 10 {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += C64::new(2.0, 0.0);
        d = C64::new(1.0, 0.0) / (d * a + b);
        c = b + C64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            let h = C64::new(x.cos(), -x.sin()) * h;
            return Ok((-h.re, std::f64::consts::FRAC_PI_2 + h.im));
        }
    }
    Err(Error::NonConvergence(format!("Ci/Si continued fraction at x = {x}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Independent tabulated values.
        let cases = [
            (0.5, -0.177_784_078_806_612_1, 0.493_107_418_043_066_7),
            (1.0, 0.337_403_922_900_968_1, 0.946_083_070_367_183_0),
            (2.0, 0.422_980_828_774_864_9, 1.605_412_976_802_694_8),
            (5.0, -0.190_029_749_656_643_9, 1.549_931_244_944_674_1),
            (10.0, -0.045_456_433_004_455_37, 1.658_347_594_218_874_0),
        ];
        for (x, c, s) in cases {
            let (cc, ss) = cisi(x).unwrap();
            assert!((cc - c).abs() < 1e-14 * c.abs().max(1.0), "Ci({x}) = {cc}");
            assert!((ss - s).abs() < 1e-14, "Si({x}) = {ss}");
        }
    }

    #[test]
    fn branch_continuity() {
        let (c1, s1) = series(SERIES_MAX).unwrap();
        let (c2, s2) = continued_fraction(SERIES_MAX).unwrap();
        assert!((c1 - c2).abs() < 1e-14);
        assert!((s1 - s2).abs() < 1e-14);
    }

    #[test]
    fn cin_consistent() {
        for &x in &[1e-3, 0.3, 1.9, 2.1, 7.0] {
            let direct = EULER_GAMMA + f64::ln(x) - ci(x).unwrap();
            assert!((cin(x).unwrap() - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ci(0.0).is_err());
        assert!(ci(-1.0).is_err());
        assert_eq!(si(0.0).unwrap(), 0.0);
    }
}

//! Kummer's confluent hypergeometric function `1F1(a; b; z)` for real
//! parameters and complex argument.
//!
//! Small arguments use the power series summed in double-double arithmetic,
//! which keeps the cancellation along the imaginary axis harmless. Large
//! arguments use the two-sided asymptotic expansion truncated at its smallest
//! term.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::ddouble::{ComplexDd, DoubleDouble};

/// Beyond this modulus the asymptotic expansion replaces the series.
const SERIES_RADIUS: f64 = 35.0;
const MAX_TERMS: usize = 5000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Reciprocal gamma, zero at the poles of the gamma function.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

/// `1F1(a; b; z)`.
///
/// Fails with a domain error when `b` is a non-positive integer and with a
/// numeric error (carrying the partial sum) when neither representation
/// reaches its accuracy target.
pub fn hyp1f1(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    if !(a.is_finite() && b.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("1F1 arguments must be finite"));
    }
    if is_nonpositive_integer(b) {
        return Err(Error::domain(format!("1F1 undefined for b = {b}")));
    }
    if z == Complex64::new(0.0, 0.0) || a == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let value = if is_nonpositive_integer(a) {
        // Terminating polynomial; the series is exact at any argument.
        series(a, b, z)?
    } else if z.norm() <= SERIES_RADIUS {
        if z.re < 0.0 {
            z.exp() * series(b - a, b, -z)?
        } else {
            series(a, b, z)?
        }
    } else {
        asymptotic(a, b, z)?
    };
    Ok(if z.im == 0.0 {
        Complex64::new(value.re, 0.0)
    } else {
        value
    })
}

fn series(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    let mut term = ComplexDd::ONE;
    let mut sum = ComplexDd::ONE;
    let zn = z.norm();
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let num = DoubleDouble::sum(a, kf);
        if num.hi == 0.0 {
            return Ok(sum.to_complex());
        }
        let den = DoubleDouble::sum(b, kf).mul_f64(kf + 1.0);
        term = term.scale(num / den).mul_c64(z);
        sum = sum + term;
        // Only stop once the terms are past their peak and decreasing.
        if kf > zn + a.abs() + b.abs() && term.norm_f64() <= 1e-18 * sum.norm_f64().max(1e-300) {
            return Ok(sum.to_complex());
        }
    }
    Err(Error::numeric(
        format!("1F1 series did not converge in {MAX_TERMS} terms (a={a}, b={b}, z={z})"),
        sum.to_complex(),
        term.norm_f64(),
    ))
}

/// Sum of `prod((p + s)(q + s)) / s! * w^s`, truncated at its smallest term.
/// Returns the sum and the magnitude of the first omitted term.
fn asymptotic_series(p: f64, q: f64, w: Complex64) -> (Complex64, f64) {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0f64;
    for s in 0..MAX_TERMS {
        let sf = s as f64;
        let next = term * ((p + sf) * (q + sf) / (sf + 1.0)) * w;
        let m = next.norm();
        if m == 0.0 {
            return (sum, 0.0);
        }
        if m >= last {
            return (sum, m);
        }
        sum += next;
        term = next;
        last = m;
        if m <= 1e-17 * sum.norm() {
            return (sum, m);
        }
    }
    (sum, last)
}

fn asymptotic(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    let gb = libm::tgamma(b);
    let inv_z = z.inv();
    // e^z z^(a-b) / Gamma(a) * sum (1-a)_s (b-a)_s / s! z^-s
    let (s1, e1) = asymptotic_series(1.0 - a, b - a, inv_z);
    let w1 = rgamma(a) * (z + (a - b) * z.ln()).exp();
    // e^(+-i pi a) z^(-a) / Gamma(b-a) * sum (a)_s (a-b+1)_s / s! (-z)^-s
    let (s2, e2) = asymptotic_series(a, a - b + 1.0, -inv_z);
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, sign * std::f64::consts::PI * a).exp();
    let w2 = rgamma(b - a) * phase * (-a * z.ln()).exp();
    let value = gb * (w1 * s1 + w2 * s2);
    let err = gb.abs() * (w1.norm() * e1 + w2.norm() * e2);
    if !value.re.is_finite() || !value.im.is_finite() || err > 1e-7 * value.norm() {
        return Err(Error::numeric(
            format!("1F1 asymptotic expansion not accurate enough (a={a}, b={b}, z={z})"),
            value,
            err,
        ));
    }
    Ok(value)
}

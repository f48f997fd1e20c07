//! Few-BS approximation: the strongest interferer is kept exactly and the
//! rest is replaced by its conditional mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, Tolerance};
use crate::point_process::unit_sphere_measure;

use super::inversion::TailPoint;

/// Length of the finite integration range for `G`; the remainder is bounded
/// by `int_b^inf v e^-v dv`.
const G_SPAN: f64 = 60.0;

/// `G(a) = int_a^inf v e^-v (1 + v / (ratio - 1))^(-1/ratio) dv` with
/// `ratio = eps / l`.
pub fn few_bs_g(a: f64, ratio: f64) -> Result<TailPoint> {
    if !(ratio > 1.0) || !(a >= 0.0) {
        return Err(Error::domain("need eps / l > 1 and a >= 0"));
    }
    let m = ratio - 1.0;
    let beta = 1.0 / ratio;
    let b = a + G_SPAN;
    let res = integrate(
        |v: f64| v * (-v).exp() * (1.0 + v / m).powf(-beta),
        a,
        b,
        Tolerance::new(1e-15, 1e-13),
    );
    let remainder = (b + 1.0) * (-b).exp();
    Ok(TailPoint {
        p: res.value,
        err: res.error + remainder,
    })
}

/// The constants of the approximation for one ratio `eps / l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FewBsConstants {
    pub ratio: f64,
    /// `C = G(0)`.
    pub c: f64,
    pub c_err: f64,
}

impl FewBsConstants {
    pub fn new(epsilon: f64, l: usize) -> Result<Self> {
        unit_sphere_measure(l)?;
        if !(epsilon > l as f64) {
            return Err(Error::stability(format!(
                "path-loss exponent {epsilon} must exceed the dimension {l}"
            )));
        }
        let ratio = epsilon / l as f64;
        let g0 = few_bs_g(0.0, ratio)?;
        Ok(Self {
            ratio,
            c: g0.p,
            c_err: g0.err,
        })
    }

    /// `u(eta) = (eps/l - 1)(1/eta - 1)`, zero at `eta = 1`.
    pub fn u(&self, eta: f64) -> f64 {
        (self.ratio - 1.0) * (1.0 / eta - 1.0)
    }

    /// `D(eta) = G(u(eta))`.
    pub fn d(&self, eta: f64) -> Result<TailPoint> {
        let u = self.u(eta);
        if u <= 0.0 {
            return Ok(TailPoint {
                p: self.c,
                err: self.c_err,
            });
        }
        few_bs_g(u, self.ratio)
    }

    /// Approximate `P(C/I > eta)`.
    pub fn tail(&self, eta: f64) -> Result<TailPoint> {
        if !(eta > 0.0) {
            return Err(Error::domain("few-BS tail needs eta > 0"));
        }
        let scale = eta.powf(-1.0 / self.ratio);
        if eta >= 1.0 || !eta.is_finite() {
            return Ok(TailPoint {
                p: scale * self.c,
                err: scale * self.c_err,
            });
        }
        let u = self.u(eta);
        let d = self.d(eta)?;
        let p = 1.0 - (-u).exp() * (1.0 + u) + scale * d.p;
        Ok(TailPoint {
            p: p.clamp(0.0, 1.0),
            err: scale * d.err + 4.0 * f64::EPSILON,
        })
    }
}

/// Few-BS approximation of `P(C/I > eta)` for a homogeneous `l`-D field.
pub fn few_bs_tail(eta: f64, epsilon: f64, l: usize) -> Result<TailPoint> {
    FewBsConstants::new(epsilon, l)?.tail(eta)
}

/// Mean interference from all BSs beyond the `k`-th nearest, given its
/// distance `r_k`: `lambda0 b_l K r_k^(l - eps) / (eps - l)`.
pub fn truncated_interference_mean(
    lambda0: f64,
    l: usize,
    k: f64,
    r_k: f64,
    epsilon: f64,
) -> Result<f64> {
    let b = unit_sphere_measure(l)?;
    if !(epsilon > l as f64) {
        return Err(Error::stability(format!(
            "path-loss exponent {epsilon} must exceed the dimension {l}"
        )));
    }
    if !(lambda0 > 0.0 && k > 0.0 && r_k > 0.0) {
        return Err(Error::domain("need lambda0, K and r_k positive"));
    }
    let lf = l as f64;
    Ok(lambda0 * b * k * r_k.powf(lf - epsilon) / (epsilon - lf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_at_zero_for_ratio_two_matches_closed_form() {
        // ratio 2: int_0^inf v e^-v (1+v)^(-1/2) dv, by composite Simpson.
        let n = 200_000;
        let h = 80.0 / n as f64;
        let f = |v: f64| v * (-v).exp() / (1.0 + v).sqrt();
        let mut s = f(0.0) + f(80.0);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let simpson = s * h / 3.0;
        let g = few_bs_g(0.0, 2.0).unwrap();
        assert!((g.p - simpson).abs() < 1e-10, "{} vs {simpson}", g.p);
    }

    #[test]
    fn continuous_at_one() {
        let fb = FewBsConstants::new(4.0, 2).unwrap();
        let left = fb.tail(1.0 - 1e-9).unwrap().p;
        let right = fb.tail(1.0).unwrap().p;
        assert!((left - right).abs() < 1e-8);
        assert_eq!(fb.u(1.0), 0.0);
    }

    #[test]
    fn approaches_one_near_zero() {
        assert!((few_bs_tail(1e-4, 4.0, 2).unwrap().p - 1.0).abs() < 1e-3);
    }

    #[test]
    fn truncated_mean_plane() {
        let m = truncated_interference_mean(1.0, 2, 1.0, 1.0, 4.0).unwrap();
        assert!((m - std::f64::consts::PI).abs() < 1e-15);
        assert!(truncated_interference_mean(1.0, 2, 1.0, 1.0, 2.0).is_err());
    }
}

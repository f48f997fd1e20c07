use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_with_breaks, tanh_sinh, Tolerance};
use crate::point_process::RadialDensity;
use crate::special::hyp1f1;

/// Where a characteristic function comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Numerical quadrature over an arbitrary density.
    GeneralDensity,
    /// Closed form `1 / 1F1(-beta; 1 - beta; i omega)`.
    HomogeneousHypergeometric,
    /// Includes the noise factor.
    WithNoise,
}

type Evaluator = dyn Fn(f64) -> Result<Complex64> + Send + Sync;

/// Characteristic function of the inverse carrier-to-interference (plus
/// noise) ratio.
#[derive(Clone)]
pub struct CharFn {
    provenance: Provenance,
    eval: Arc<Evaluator>,
    min_omega: f64,
}

impl fmt::Debug for CharFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharFn")
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl CharFn {
    pub fn new(
        provenance: Provenance,
        eval: impl Fn(f64) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        let min_omega = match provenance {
            Provenance::HomogeneousHypergeometric => 1000.0,
            Provenance::WithNoise => 200.0,
            Provenance::GeneralDensity => 50.0,
        };
        Self {
            provenance,
            eval: Arc::new(eval),
            min_omega,
        }
    }

    /// Inversion integrates at least up to this frequency. Cheap closed
    /// forms default to a long range; quadrature-based ones to a short one.
    pub fn with_min_omega(mut self, omega: f64) -> Self {
        self.min_omega = omega;
        self
    }

    pub fn min_omega(&self) -> f64 {
        self.min_omega
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `Phi(omega)`, using conjugate symmetry for negative arguments.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        if omega == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if omega < 0.0 {
            return Ok((self.eval)(-omega)?.conj());
        }
        (self.eval)(omega)
    }

    /// Homogeneous `l`-dimensional field with path-loss exponent `epsilon`.
    pub fn homogeneous(epsilon: f64, l: usize) -> Result<Self> {
        charfn_inv_cir_homogeneous_checked(epsilon, l)?;
        let beta = l as f64 / epsilon;
        Ok(Self::power_law(beta))
    }

    /// Field whose mass function grows like `r^(beta epsilon)`; depends on
    /// `beta = (p + 1) / epsilon` only.
    pub fn power_law(beta: f64) -> Self {
        CharFn::new(Provenance::HomogeneousHypergeometric, move |w| {
            Ok(hyp1f1(-beta, 1.0 - beta, Complex64::new(0.0, w))?.inv())
        })
    }

    /// General density through nested quadrature.
    pub fn general(density: RadialDensity, epsilon: f64) -> Result<Self> {
        density.check_stable(epsilon)?;
        Ok(CharFn::new(Provenance::GeneralDensity, move |w| {
            expect_over_r1(&density, epsilon, w, |_| Complex64::new(1.0, 0.0))
        }))
    }

    /// With noise: `N / K` enters through the serving power.
    pub fn with_noise(density: RadialDensity, epsilon: f64, k: f64, n: f64) -> Result<Self> {
        density.check_stable(epsilon)?;
        if !(k > 0.0 && n >= 0.0) {
            return Err(Error::domain("need K > 0 and N >= 0"));
        }
        if n == 0.0 {
            return match density {
                RadialDensity::PowerLaw { p, c } if c > 0.0 => {
                    Ok(Self::power_law((p + 1.0) / epsilon))
                }
                _ => Self::general(density, epsilon),
            };
        }
        let ratio = n / k;
        if let RadialDensity::PowerLaw { c, p } = density {
            if c > 0.0 {
                let beta = (p + 1.0) / epsilon;
                let kappa = ((p + 1.0) / c).powf(1.0 / beta);
                return Ok(CharFn::new(Provenance::WithNoise, move |w| {
                    power_law_cinr(beta, kappa * ratio, w)
                }));
            }
        }
        Ok(CharFn::new(Provenance::WithNoise, move |w| {
            expect_over_r1(&density, epsilon, w, |r1| {
                Complex64::new(0.0, w * ratio * r1.powf(epsilon)).exp()
            })
        }))
    }
}

fn charfn_inv_cir_homogeneous_checked(epsilon: f64, l: usize) -> Result<()> {
    crate::point_process::unit_sphere_measure(l)?;
    if !(epsilon > l as f64) {
        return Err(Error::stability(format!(
            "path-loss exponent {epsilon} must exceed the dimension {l}"
        )));
    }
    Ok(())
}

/// `1 / 1F1(-l/eps; 1 - l/eps; i omega)`; independent of the BS density and
/// of the transmit gain.
pub fn charfn_inv_cir_homogeneous(omega: f64, epsilon: f64, l: usize) -> Result<Complex64> {
    CharFn::homogeneous(epsilon, l)?.eval(omega)
}

/// Characteristic function of the inverse C/I for an arbitrary density.
pub fn charfn_inv_cir(omega: f64, density: &RadialDensity, epsilon: f64) -> Result<Complex64> {
    CharFn::general(density.clone(), epsilon)?.eval(omega)
}

/// Characteristic function of the inverse C/(I+N).
pub fn charfn_inv_cinr(
    omega: f64,
    density: &RadialDensity,
    epsilon: f64,
    k: f64,
    n: f64,
) -> Result<Complex64> {
    CharFn::with_noise(density.clone(), epsilon, k, n)?.eval(omega)
}

/// Characteristic function of the interference power given the nearest BS
/// at `r1`: `exp(int_{r1}^inf lambda(r) (exp(i omega K r^-eps) - 1) dr)`.
///
/// Power laws use the hypergeometric closed form; other densities are
/// integrated numerically.
pub fn charfn_pi_given_r1(
    omega: f64,
    r1: f64,
    density: &RadialDensity,
    epsilon: f64,
    k: f64,
) -> Result<Complex64> {
    if !(r1 > 0.0) {
        return Err(Error::domain("r1 must be positive"));
    }
    density.check_stable(epsilon)?;
    let w = omega * k * r1.powf(-epsilon);
    Ok(log_conditional_charfn(density, epsilon, r1, w)?.exp())
}

/// `int_{r1}^inf lambda(r) (exp(i w (r1/r)^eps) - 1) dr`, the log of the
/// conditional characteristic function with the argument expressed relative
/// to the nearest BS.
pub fn log_conditional_charfn(
    density: &RadialDensity,
    epsilon: f64,
    r1: f64,
    w: f64,
) -> Result<Complex64> {
    if w == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if w < 0.0 {
        return Ok(log_conditional_charfn(density, epsilon, r1, -w)?.conj());
    }
    match density {
        RadialDensity::PowerLaw { c, p } => {
            if *c == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let beta = (p + 1.0) / epsilon;
            let m = hyp1f1(-beta, 1.0 - beta, Complex64::new(0.0, w))?;
            Ok(density.cumulative(r1) * (1.0 - m))
        }
        _ => log_conditional_numeric(density, epsilon, r1, w),
    }
}

/// Quadrature of the conditional log-characteristic function in the
/// variable `t = (r1/r)^eps`, which maps the far field onto a neighbourhood
/// of `t = 0` with an integrable algebraic singularity.
pub fn log_conditional_numeric(
    density: &RadialDensity,
    epsilon: f64,
    r1: f64,
    w: f64,
) -> Result<Complex64> {
    if density.support_end().is_some_and(|e| e <= r1) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let inv = 1.0 / epsilon;
    let f = |t: f64| {
        let r = r1 * t.powf(-inv);
        let lam = density.value(r);
        if lam == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // exp(i w t) - 1 without cancellation for small w t.
        let wt = w * t;
        let half = 0.5 * wt;
        let e = Complex64::new(-2.0 * half.sin().powi(2), wt.sin());
        e * (lam * t.powf(-inv - 1.0) * r1 * inv)
    };
    let tol = Tolerance::new(1e-12, 1e-10).with_max_intervals(20_000);

    let mut cuts: Vec<f64> = {
        let b = density.breakpoints();
        if b.len() <= 64 {
            b.into_iter()
                .filter(|r| *r > r1)
                .map(|r| (r1 / r).powf(epsilon))
                .filter(|t| *t > 0.0 && *t < 1.0)
                .collect()
        } else {
            Vec::new()
        }
    };
    if let Some(end) = density.support_end() {
        let t_end = (r1 / end).powf(epsilon);
        cuts.retain(|t| *t > t_end);
        cuts.push(t_end);
    }
    let t0 = (PI / w).min(1.0);
    cuts.push(t0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let first = cuts[0];
    let head = tanh_sinh(f, 0.0, first, tol);
    let mut sum = head.value;
    let mut err = head.error;
    let mut ok = head.converged;
    let mut panels: Vec<f64> = cuts[1..].iter().cloned().filter(|t| *t < 1.0).collect();
    // Oscillation-length panels on the remainder.
    let step = 2.0 * PI / w;
    if (1.0 - first) / step <= 5000.0 {
        let mut t = first + step;
        while t < 1.0 {
            panels.push(t);
            t += step;
        }
    }
    panels.sort_by(f64::total_cmp);
    panels.dedup();
    if first < 1.0 {
        let rest = integrate_with_breaks(f, first, 1.0, &panels, tol);
        sum += rest.value;
        err += rest.error;
        ok &= rest.converged;
    }
    if !ok && err > 1e-8 * sum.norm().max(1.0) {
        return Err(Error::numeric(
            "conditional characteristic function did not converge",
            sum,
            err,
        ));
    }
    Ok(sum)
}

/// `E[g(R1) exp(J(R1))]` over the nearest-BS distance, conditioned on at
/// least one BS, integrated in the mass coordinate `s = Lambda(r1)`.
fn expect_over_r1(
    density: &RadialDensity,
    epsilon: f64,
    w: f64,
    g: impl Fn(f64) -> Complex64,
) -> Result<Complex64> {
    let total = density.total_mass();
    if total == 0.0 {
        return Err(Error::domain("density has no base stations"));
    }
    let s_max = total.min(40.0);
    let mut failure: Option<Error> = None;
    let integrand = |s: f64| {
        let r1 = match density.inverse_cumulative(s) {
            Some(r) if r > 0.0 => r,
            _ => return Complex64::new(0.0, 0.0),
        };
        match log_conditional_charfn(density, epsilon, r1, w) {
            Ok(j) => (j - s).exp() * g(r1),
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let res = integrate(
        integrand,
        0.0,
        s_max,
        Tolerance::new(1e-11, 1e-9).with_max_intervals(400),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !res.converged {
        return Err(Error::numeric(
            "expectation over the nearest BS did not converge",
            res.value,
            res.error,
        ));
    }
    Ok(res.value / (1.0 - (-total).exp()))
}

/// `int_0^inf exp(-s M + i omega a s^(1/beta)) ds` with
/// `M = 1F1(-beta; 1 - beta; i omega)`.
fn power_law_cinr(beta: f64, a: f64, w: f64) -> Result<Complex64> {
    let m = hyp1f1(-beta, 1.0 - beta, Complex64::new(0.0, w))?;
    if !(m.re > 0.0) {
        return Err(Error::numeric(
            "unexpected non-positive real part of 1F1",
            m,
            f64::NAN,
        ));
    }
    let s_max = 45.0 / m.re;
    let f = |s: f64| (-s * m + Complex64::new(0.0, w * a * s.powf(1.0 / beta))).exp();
    let breaks: Vec<f64> = (1..64).map(|i| s_max * i as f64 / 64.0).collect();
    let res = integrate_with_breaks(
        f,
        0.0,
        s_max,
        &breaks,
        Tolerance::new(1e-13, 1e-11).with_max_intervals(20_000),
    );
    if !res.converged {
        return Err(Error::numeric(
            "noise characteristic function did not converge",
            res.value,
            res.error,
        ));
    }
    Ok(res.value)
}

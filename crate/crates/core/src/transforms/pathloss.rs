use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_process::{PowerTail, RadialDensity};

use super::fading::median_radius;
use super::tabulate::{geometric_grid, tabulate_on, GRID_POINTS};

/// A monotone path-loss function: received power is `K Psi / h(R)`.
pub trait PathLoss: Send + Sync {
    fn h(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    /// `x` with `h(x) = r`, or `None` when `r < h(0)`.
    fn inverse(&self, r: f64) -> Option<f64>;
}

/// Path-loss model of a system.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathLossModel {
    /// `h(x) = x^epsilon`.
    InversePower { epsilon: f64 },
    /// `h(x) = sum coeffs[k] x^k` with non-negative coefficients.
    Polynomial { coeffs: Vec<f64> },
    #[serde(skip)]
    Custom(Arc<dyn PathLoss>),
}

impl fmt::Debug for PathLossModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathLossModel::InversePower { epsilon } => write!(f, "InversePower({epsilon})"),
            PathLossModel::Polynomial { coeffs } => write!(f, "Polynomial({coeffs:?})"),
            PathLossModel::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl PartialEq for PathLossModel {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::InversePower { epsilon: a }, Self::InversePower { epsilon: b }) => a == b,
            (Self::Polynomial { coeffs: a }, Self::Polynomial { coeffs: b }) => a == b,
            (Self::Custom(a), Self::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl PathLossModel {
    pub fn inverse_power(epsilon: f64) -> Self {
        PathLossModel::InversePower { epsilon }
    }

    pub fn custom(h: impl PathLoss + 'static) -> Self {
        PathLossModel::Custom(Arc::new(h))
    }

    /// Exponent of a pure power law.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            PathLossModel::InversePower { epsilon } => Some(*epsilon),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PathLossModel::InversePower { epsilon } => {
                if !(*epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(Error::domain("path-loss exponent must be positive"));
                }
            }
            PathLossModel::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
                    return Err(Error::domain(
                        "polynomial path-loss coefficients must be non-negative",
                    ));
                }
                if coeffs.iter().skip(1).all(|c| *c == 0.0) {
                    return Err(Error::domain(
                        "polynomial path loss must increase with distance",
                    ));
                }
            }
            PathLossModel::Custom(_) => {}
        }
        // Spot-check monotonicity on a grid.
        let xs = geometric_grid(1e-4, 1e4, 161);
        let mut prev = self.h(0.0);
        for &x in &xs {
            let hx = self.h(x);
            if !(hx > prev) || !(self.derivative(x) > 0.0) {
                return Err(Error::domain(format!(
                    "path loss is not strictly increasing near x = {x}"
                )));
            }
            prev = hx;
        }
        Ok(())
    }

    pub fn h(&self, x: f64) -> f64 {
        match self {
            PathLossModel::InversePower { epsilon } => x.powf(*epsilon),
            PathLossModel::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            PathLossModel::Custom(h) => h.h(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            PathLossModel::InversePower { epsilon } => epsilon * x.powf(epsilon - 1.0),
            PathLossModel::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c),
            PathLossModel::Custom(h) => h.derivative(x),
        }
    }

    pub fn inverse(&self, r: f64) -> Option<f64> {
        match self {
            PathLossModel::InversePower { epsilon } => (r >= 0.0).then(|| r.powf(1.0 / epsilon)),
            PathLossModel::Polynomial { .. } => {
                if r < self.h(0.0) {
                    return None;
                }
                let mut hi = 1.0;
                while self.h(hi) < r {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                let mut x = 0.5 * hi;
                for _ in 0..200 {
                    let fx = self.h(x) - r;
                    if fx > 0.0 {
                        hi = x;
                    } else {
                        lo = x;
                    }
                    let newton = x - fx / self.derivative(x);
                    let next = if newton > lo && newton < hi {
                        newton
                    } else {
                        0.5 * (lo + hi)
                    };
                    if (next - x).abs() <= 1e-15 * x.abs() {
                        return Some(next);
                    }
                    x = next;
                }
                Some(x)
            }
            PathLossModel::Custom(h) => h.inverse(r),
        }
    }
}

/// Density in canonical distance `R' = h(R)`, for which the path loss is
/// `1/R'`: `lambda(h^-1(r)) / h'(h^-1(r))`.
pub fn canonicalize_pathloss(
    density: &RadialDensity,
    pathloss: &PathLossModel,
) -> Result<RadialDensity> {
    pathloss.validate()?;
    density.validate()?;
    if let (RadialDensity::PowerLaw { c, p }, PathLossModel::InversePower { epsilon }) =
        (density, pathloss)
    {
        return Ok(RadialDensity::power_law(
            c / epsilon,
            (p + 1.0) / epsilon - 1.0,
        ));
    }
    if pathloss.exponent() == Some(1.0) {
        return Ok(density.clone());
    }
    if density.total_mass() == 0.0 {
        return Ok(RadialDensity::power_law(0.0, 0.0));
    }
    // Grid in the original distance, mapped through h.
    let scale = median_radius(density)?;
    let x_hi = density.support_end().unwrap_or(scale * 1e6);
    let mut xs = vec![0.0];
    xs.extend(geometric_grid(scale * 1e-6, x_hi, GRID_POINTS));
    for b in density.breakpoints().into_iter().filter(|b| *b <= x_hi) {
        // Bracket the break: at `b` itself rounding decides the side.
        xs.push(b * (1.0 - 1e-9));
        xs.push(b * (1.0 + 1e-9));
    }
    let h0 = pathloss.h(0.0);
    let mut rs: Vec<f64> = xs.iter().map(|&x| pathloss.h(x)).collect();
    if h0 > 0.0 {
        rs.push(0.0);
        rs.push(h0 * (1.0 - 1e-12));
    }
    let value = |r: f64| match pathloss.inverse(r) {
        Some(x) if r >= h0 => density.value(x) / pathloss.derivative(x),
        _ => 0.0,
    };
    let tail = if density.support_end().is_some() {
        None
    } else {
        let r_hi = pathloss.h(x_hi);
        let r1 = pathloss.h(x_hi * (1.0 - 1e-3));
        let (v1, v2) = (value(r1), value(r_hi));
        if v1 > 0.0 && v2 > 0.0 {
            let q = (v2 / v1).ln() / (r_hi / r1).ln();
            Some(PowerTail {
                c: v2 / r_hi.powf(q),
                p: q,
            })
        } else {
            None
        }
    };
    if let PathLossModel::InversePower { epsilon } = pathloss {
        if let (RadialDensity::Tabulated(t), Some(_)) = (density, tail) {
            // A declared power tail maps exactly.
            if let Some(tl) = t.tail {
                let exact = PowerTail {
                    c: tl.c / epsilon,
                    p: (tl.p + 1.0) / epsilon - 1.0,
                };
                return tabulate_on(value, rs, Some(exact));
            }
        }
    }
    tabulate_on(value, rs, tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_evaluation_and_inverse() {
        let h = PathLossModel::Polynomial {
            coeffs: vec![0.0, 1.0, 1.0],
        };
        assert_eq!(h.h(2.0), 6.0);
        assert_eq!(h.derivative(2.0), 5.0);
        assert!((h.inverse(6.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decreasing_path_loss_rejected() {
        struct Bad;
        impl PathLoss for Bad {
            fn h(&self, x: f64) -> f64 {
                1.0 / (1.0 + x)
            }
            fn derivative(&self, x: f64) -> f64 {
                -1.0 / (1.0 + x).powi(2)
            }
            fn inverse(&self, r: f64) -> Option<f64> {
                Some(1.0 / r - 1.0)
            }
        }
        assert!(PathLossModel::custom(Bad).validate().is_err());
    }

    #[test]
    fn homogeneous_plane_with_exponent_four() {
        let d = RadialDensity::power_law(2.0 * std::f64::consts::PI, 1.0);
        let out = canonicalize_pathloss(&d, &PathLossModel::inverse_power(4.0)).unwrap();
        assert_eq!(
            out,
            RadialDensity::power_law(std::f64::consts::PI / 2.0, -0.5)
        );
    }
}

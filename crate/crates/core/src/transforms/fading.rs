use std::f64::consts::{LN_10, PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gauss;
use crate::point_process::{scale_density, RadialDensity, TabulatedDensity};

use super::tabulate::{tabulate, TabulationHints};

/// Distribution of the i.i.d. shadow-fading factor `Psi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FadingModel {
    Constant {
        psi0: f64,
    },
    /// `10 log10(Psi)` is normal with mean 0 and standard deviation `sigma_db`.
    LogNormal {
        sigma_db: f64,
    },
    /// `Psi = g` with probability `q`, otherwise 0; models a sectorized
    /// antenna of gain `g` and beam-width `2 pi q`.
    TwoPoint {
        g: f64,
        q: f64,
    },
}

impl Default for FadingModel {
    fn default() -> Self {
        FadingModel::Constant { psi0: 1.0 }
    }
}

/// Natural-log standard deviation of a log-normal specified in decibels.
pub fn db_to_natural(sigma_db: f64) -> f64 {
    sigma_db * LN_10 / 10.0
}

/// Density gain `E[Psi^(l/eps)] = exp(l^2 sigma^2 / (2 eps^2))` of a
/// homogeneous field under log-normal fading with natural-log deviation
/// `sigma`; for `l = 2` this is `exp(2 sigma^2 / eps^2)`.
pub fn lognormal_density_gain(sigma: f64, epsilon: f64, l: usize) -> f64 {
    let m = l as f64 / epsilon;
    (0.5 * m * m * sigma * sigma).exp()
}

/// As [`lognormal_density_gain`] with the deviation given in decibels.
pub fn lognormal_density_gain_db(sigma_db: f64, epsilon: f64, l: usize) -> f64 {
    lognormal_density_gain(db_to_natural(sigma_db), epsilon, l)
}

/// Sectorized-antenna density `lambda0 G^(2/eps) theta / (2 pi)` in 2-D.
pub fn sectorized_density(lambda0: f64, gain: f64, beam_width: f64, epsilon: f64) -> f64 {
    lambda0 * gain.powf(2.0 / epsilon) * beam_width / (2.0 * PI)
}

impl FadingModel {
    pub fn sectorized(gain: f64, beam_width: f64) -> Self {
        FadingModel::TwoPoint {
            g: gain,
            q: beam_width / (2.0 * PI),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::domain(m.to_string()));
        match *self {
            FadingModel::Constant { psi0 } if !(psi0 > 0.0 && psi0.is_finite()) => {
                bad("constant fading factor must be positive")
            }
            FadingModel::LogNormal { sigma_db } if !(sigma_db >= 0.0 && sigma_db.is_finite()) => {
                bad("log-normal deviation must be finite and non-negative")
            }
            FadingModel::TwoPoint { g, q }
                if !(g > 0.0 && g.is_finite() && q > 0.0 && q <= 1.0) =>
            {
                bad("two-point fading needs g > 0 and 0 < q <= 1")
            }
            _ => Ok(()),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, FadingModel::Constant { psi0 } if *psi0 == 1.0)
    }

    /// `E[Psi^m]` for `m > 0`.
    pub fn moment(&self, m: f64) -> Result<f64> {
        let v = match *self {
            FadingModel::Constant { psi0 } => psi0.powf(m),
            FadingModel::LogNormal { sigma_db } => {
                let s = db_to_natural(sigma_db);
                (0.5 * m * m * s * s).exp()
            }
            FadingModel::TwoPoint { g, q } => q * g.powf(m),
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Equivalence(format!(
                "fractional moment E[Psi^{m}] = {v} is not usable"
            )));
        }
        Ok(v)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingModel::Constant { psi0 } => psi0,
            FadingModel::LogNormal { sigma_db } => {
                let z: f64 = StandardNormal.sample(rng);
                (db_to_natural(sigma_db) * z).exp()
            }
            FadingModel::TwoPoint { g, q } => {
                if rng.random::<f64>() < q {
                    g
                } else {
                    0.0
                }
            }
        }
    }

    /// Atoms `(weight, value)` of a discrete representation: exact for
    /// constant and two-point fading, Gauss–Hermite for log-normal.
    fn atoms(&self) -> Vec<(f64, f64)> {
        match *self {
            FadingModel::Constant { psi0 } => vec![(1.0, psi0)],
            FadingModel::TwoPoint { g, q } => vec![(q, g)],
            FadingModel::LogNormal { sigma_db } => {
                let s = db_to_natural(sigma_db);
                let rule = gauss::hermite(GH_ORDER);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| (w / PI.sqrt(), (s * SQRT_2 * x).exp()))
                    .collect()
            }
        }
    }
}

const GH_ORDER: usize = 64;

/// Multiply a density by a constant weight.
pub(crate) fn weighted(density: &RadialDensity, w: f64) -> Result<RadialDensity> {
    Ok(match density {
        RadialDensity::PowerLaw { c, p } => RadialDensity::power_law(c * w, *p),
        RadialDensity::Tabulated(t) => RadialDensity::Tabulated(TabulatedDensity {
            table: t.table.map(|x| x, |v| v * w)?,
            tail: t.tail.map(|mut tl| {
                tl.c *= w;
                tl
            }),
        }),
        RadialDensity::Shifted { base, y } => RadialDensity::Shifted {
            base: weight_line(base, w),
            y: *y,
        },
    })
}

fn weight_line(d: &crate::point_process::LineDensity, w: f64) -> crate::point_process::LineDensity {
    use crate::point_process::LineDensity as L;
    match d {
        L::Constant { value } => L::Constant { value: value * w },
        L::Interval { lo, hi, value } => L::Interval {
            lo: *lo,
            hi: *hi,
            value: value * w,
        },
        L::Tabulated(t) => L::Tabulated(
            t.map(|x| x, |v| v * w)
                .expect("weighting keeps a valid table"),
        ),
        L::Sum { parts } => L::Sum {
            parts: parts.iter().map(|p| weight_line(p, w)).collect(),
        },
    }
}

/// Density of the fading-free system equivalent to `density` with i.i.d.
/// fading: `E[Psi^(1/eps) lambda(Psi^(1/eps) r)]`.
pub fn absorb_fading(
    density: &RadialDensity,
    epsilon: f64,
    fading: &FadingModel,
) -> Result<RadialDensity> {
    fading.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::domain("path-loss exponent must be positive"));
    }
    if fading.is_identity() {
        return Ok(density.clone());
    }
    if let RadialDensity::PowerLaw { c, p } = density {
        let m = fading.moment((p + 1.0) / epsilon)?;
        return Ok(RadialDensity::power_law(c * m, *p));
    }
    let atoms = fading.atoms();
    if let [(w, psi)] = atoms[..] {
        // s lambda(s r) with s = psi^(1/eps) is the density stretched by 1/s.
        let s = psi.powf(1.0 / epsilon);
        return weighted(&scale_density(density, 1.0 / s)?, w);
    }
    let terms: Vec<(f64, f64)> = atoms
        .iter()
        .map(|&(w, psi)| (w, psi.powf(1.0 / epsilon)))
        .filter(|(w, _)| *w > 1e-300)
        .collect();
    let value = |r: f64| {
        terms
            .iter()
            .map(|&(w, s)| w * s * density.value(s * r))
            .sum::<f64>()
    };
    let mut breaks = Vec::new();
    let raw = density.breakpoints();
    if raw.len() * terms.len() <= 20_000 {
        for b in &raw {
            breaks.extend(terms.iter().map(|(_, s)| b / s));
        }
    }
    let s_min = terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let s_max = terms.iter().map(|t| t.1).fold(0.0, f64::max);
    let scale = median_radius(density)?;
    let hints = TabulationHints {
        lo: scale / s_max * 1e-6,
        hi: density.support_end().map(|e| e / s_min),
        scale: scale / s_max,
        far: match density.far_exponent() {
            Some(q) => Some(far_coefficient(density, q, fading, epsilon)?),
            None => None,
        },
        breaks,
    };
    tabulate(value, &hints)
}

/// Coefficient of the absorbed tail `lambda(r) ~ c r^q` when the original
/// density behaves like `c0 r^q`: `c = c0 E[Psi^((q+1)/eps)]`.
fn far_coefficient(
    density: &RadialDensity,
    q: f64,
    fading: &FadingModel,
    epsilon: f64,
) -> Result<(f64, f64)> {
    let c0 = match density {
        RadialDensity::Tabulated(t) => t.tail.map(|tl| tl.c).unwrap_or(0.0),
        _ => {
            let r = 1e12;
            density.value(r) / r.powf(q)
        }
    };
    Ok((c0 * fading.moment((q + 1.0) / epsilon)?, q))
}

/// Radius holding half the probability of at least one point, used as the
/// natural length scale of a density.
pub(crate) fn median_radius(density: &RadialDensity) -> Result<f64> {
    let total = density.total_mass();
    if total == 0.0 {
        return Err(Error::domain("density has no mass"));
    }
    let target = std::f64::consts::LN_2.min(0.5 * total);
    density
        .inverse_cumulative(target)
        .filter(|r| *r > 0.0 && r.is_finite())
        .ok_or_else(|| Error::domain("cannot locate the density's length scale"))
}

//! Choice of the simulation radius and the mean of what lies beyond it.

use crate::error::{Error, Result};
use crate::numerics::{integrate_with_breaks, Tolerance};
use crate::point_process::RadialDensity;
use crate::transforms::{FadingModel, PathLossModel};

/// Relative size of the far-field fluctuation the automatic radius aims for.
pub const FAR_FIELD_TOLERANCE: f64 = 1e-4;
/// Upper bound on the expected number of BSs inside the automatic radius.
pub const MAX_EXPECTED_COUNT: f64 = 50_000.0;

/// `int_r^inf f(s) ds` in the variable `s = r e^t`, split at `breaks` where
/// `f` may kink or jump.
pub(crate) fn tail_integral(f: impl Fn(f64) -> f64, r: f64, breaks: &[f64]) -> Result<f64> {
    const T_MAX: f64 = 80.0;
    let ts: Vec<f64> = breaks
        .iter()
        .filter(|&&b| b > r)
        .map(|&b| (b / r).ln())
        .filter(|&t| t > 0.0 && t < T_MAX)
        .collect();
    let res = integrate_with_breaks(
        |t: f64| {
            let s = r * t.exp();
            f(s) * s
        },
        0.0,
        T_MAX,
        &ts,
        Tolerance::new(0.0, 1e-10).with_max_intervals(4000 + ts.len()),
    );
    if !res.converged || !res.value.is_finite() {
        return Err(Error::numeric(
            "far-field integral did not converge",
            res.value.into(),
            res.error,
        ));
    }
    Ok(res.value)
}

/// Mean received power (unit gain) from BSs beyond `r`:
/// `E[Psi] int_r^inf lambda / h`.
pub fn far_field_mean(
    density: &RadialDensity,
    pathloss: &PathLossModel,
    fading: &FadingModel,
    r: f64,
) -> Result<f64> {
    if density.support_end().is_some_and(|e| e <= r) {
        return Ok(0.0);
    }
    Ok(fading.moment(1.0)?
        * tail_integral(
            |s| density.value(s) / pathloss.h(s),
            r,
            &density.breakpoints(),
        )?)
}

fn far_field_variance(
    density: &RadialDensity,
    pathloss: &PathLossModel,
    fading: &FadingModel,
    r: f64,
) -> Result<f64> {
    if density.support_end().is_some_and(|e| e <= r) {
        return Ok(0.0);
    }
    Ok(fading.moment(2.0)?
        * tail_integral(
            |s| density.value(s) / pathloss.h(s).powi(2),
            r,
            &density.breakpoints(),
        )?)
}

/// Smallest radius at which the standard deviation of the far-field
/// interference falls below `FAR_FIELD_TOLERANCE` times a typical serving
/// power, or the end of the support if that comes first. The expected
/// number of BSs inside is capped at `MAX_EXPECTED_COUNT`.
///
/// The typical serving power is `E[Psi] / h(r_med)` with `r_med` the median
/// nearest distance.
pub fn auto_r_max(
    density: &RadialDensity,
    pathloss: &PathLossModel,
    fading: &FadingModel,
) -> Result<f64> {
    if let Some(end) = density.support_end() {
        return Ok(end);
    }
    let total = density.total_mass();
    if total == 0.0 {
        return Err(Error::Sampling("density has no base stations".into()));
    }
    let median_mass = std::f64::consts::LN_2.min(0.5 * total);
    let r_med = density
        .inverse_cumulative(median_mass)
        .filter(|r| *r > 0.0 && r.is_finite())
        .ok_or_else(|| Error::Sampling("cannot locate the median nearest distance".into()))?;
    let target = (FAR_FIELD_TOLERANCE * fading.moment(1.0)? / pathloss.h(r_med)).powi(2);
    let cap = if total > MAX_EXPECTED_COUNT {
        density
            .inverse_cumulative(MAX_EXPECTED_COUNT)
            .unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    let ok = |r: f64| -> Result<bool> {
        Ok(far_field_variance(density, pathloss, fading, r)? <= target)
    };

    let mut hi = r_med;
    while !ok(hi)? {
        if hi >= cap {
            return Ok(cap);
        }
        hi = (2.0 * hi).min(cap);
    }
    if hi == r_med {
        return Ok(r_med);
    }
    let mut lo = 0.5 * hi;
    for _ in 0..40 {
        let mid = (lo * hi).sqrt();
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo < 1.0 + 1e-6 {
            break;
        }
    }
    Ok(hi)
}

//! Turning a density given as a closure into a tabulated density.

use crate::error::{Error, Result};
use crate::point_process::{PowerTail, RadialDensity, TabulatedDensity};

pub(crate) const GRID_POINTS: usize = 3000;

pub(crate) struct TabulationHints {
    /// Smallest positive grid radius.
    pub lo: f64,
    /// End of the support, if bounded.
    pub hi: Option<f64>,
    /// Typical length scale; unbounded grids extend to `1e6 * scale`.
    pub scale: f64,
    /// Known far-field behaviour `c r^q`.
    pub far: Option<(f64, f64)>,
    /// Radii where the density jumps or kinks.
    pub breaks: Vec<f64>,
}

pub(crate) fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// Sort, drop non-increasing points and tabulate `value` on `grid`.
pub(crate) fn tabulate_on(
    value: impl Fn(f64) -> f64,
    mut grid: Vec<f64>,
    tail: Option<PowerTail>,
) -> Result<RadialDensity> {
    grid.retain(|r| r.is_finite() && *r >= 0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut values: Vec<f64> = grid.iter().map(|&r| value(r)).collect();
    // An integrable singularity at the origin is flattened to the first
    // finite value; the mass involved is negligible at the grid's inner end.
    if let Some(i) = values.iter().position(|v| v.is_finite()) {
        let first = values[i];
        values[..i].iter_mut().for_each(|v| *v = first);
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Equivalence(
            "tabulated density is not finite and non-negative".into(),
        ));
    }
    Ok(RadialDensity::Tabulated(TabulatedDensity::new(
        grid, values, tail,
    )?))
}

pub(crate) fn tabulate(
    value: impl Fn(f64) -> f64,
    hints: &TabulationHints,
) -> Result<RadialDensity> {
    let hi = hints.hi.unwrap_or(hints.scale * 1e6);
    if !(hints.lo > 0.0 && hi > hints.lo) {
        return Err(Error::domain("tabulation range is empty"));
    }
    let mut grid = vec![0.0];
    grid.extend(geometric_grid(hints.lo, hi, GRID_POINTS));
    for &b in hints.breaks.iter().filter(|b| **b > 0.0 && **b <= hi) {
        // Bracket the break: at `b` itself rounding decides the side.
        grid.push(b * (1.0 - 1e-9));
        grid.push(b * (1.0 + 1e-9));
    }
    let tail = match (hints.hi, hints.far) {
        (Some(_), _) => None,
        (None, Some((c, q))) => Some(PowerTail { c, p: q }),
        (None, None) => {
            let (r1, r2) = (hi * (1.0 - 1e-3), hi);
            let (v1, v2) = (value(r1), value(r2));
            if v1 > 0.0 && v2 > 0.0 {
                let q = (v2 / v1).ln() / (r2 / r1).ln();
                Some(PowerTail {
                    c: v2 / r2.powf(q),
                    p: q,
                })
            } else {
                None
            }
        }
    };
    tabulate_on(value, grid, tail)
}

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_with_breaks, Tolerance, WynnEpsilon};

use super::charfn::{CharFn, Provenance};

/// A probability with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub p: f64,
    pub err: f64,
}

/// Error above which an inversion is reported as failed.
pub const MAX_INVERSION_ERROR: f64 = 1e-4;
/// Error at which the block summation stops early.
const TARGET_ERROR: f64 = 1e-10;
const MIN_BLOCKS: usize = 6;
const MAX_BLOCKS: usize = 4000;

/// `P(C/I > eta) = P(X < 1/eta)` for `X` the inverse ratio with
/// characteristic function `phi`.
///
/// Uses the Gil-Pelaez form
/// `1/2 - (1/pi) int_0^inf Im(exp(-i omega / eta) Phi(omega)) / omega d omega`,
/// summed over half-periods of `exp(-i omega / eta)` and accelerated with the
/// epsilon algorithm. An atom of `X` at zero (a lone BS) is handled
/// correctly because `1/eta` is never a point of discontinuity for `eta > 0`.
pub fn tail_from_charfn(phi: &CharFn, eta: f64) -> Result<TailPoint> {
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::domain("threshold must be non-negative"));
    }
    if eta == 0.0 {
        return Ok(TailPoint { p: 1.0, err: 0.0 });
    }
    if eta.is_infinite() {
        return Err(Error::domain("threshold must be finite"));
    }
    let x = 1.0 / eta;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |w: f64| -> f64 {
        match phi.eval(w) {
            Ok(v) => (Complex64::new(0.0, -w * x).exp() * v).im / w,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };

    // Quadrature-based characteristic functions are only accurate to about
    // 1e-9; asking more of the panels and the extrapolation wastes
    // evaluations, so they start from coarser panels and stop earlier.
    let (tol, target, panel_scale) = match phi.provenance() {
        Provenance::HomogeneousHypergeometric => (Tolerance::new(1e-13, 1e-12), TARGET_ERROR, 0.25),
        _ => (Tolerance::new(1e-11, 1e-9), 1e-8, 1.0),
    };
    let block = PI * eta;
    let panel = panel_scale * PI * eta.min(1.0);
    let panels_per_block = ((block / panel).ceil() as usize).max(1);
    let tol = tol.with_max_intervals(4 * panels_per_block + 200);

    let mut wynn = WynnEpsilon::new();
    let mut partial = 0.0;
    let mut quad_err = 0.0;
    let mut estimate = (0.0, f64::INFINITY);
    // A slowly decaying non-oscillating remainder is invisible to the
    // epsilon algorithm; the drift of the limit from a quarter of the range
    // on estimates it.
    let min_omega = phi.min_omega();
    let mut early: Option<f64> = None;
    for k in 0..MAX_BLOCKS {
        let a = k as f64 * block;
        let b = a + block;
        let h = block / panels_per_block as f64;
        let breaks: Vec<f64> = (1..panels_per_block).map(|j| a + j as f64 * h).collect();
        let res = integrate_with_breaks(integrand, a, b, &breaks, tol);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        partial += res.value;
        quad_err += res.error;
        estimate = wynn.push(partial);
        if early.is_none()
            && b >= 0.25 * min_omega
            && k + 1 >= MIN_BLOCKS
            && estimate.1 < 1e3 * target
        {
            early = Some(estimate.0);
        }
        if k + 1 >= MIN_BLOCKS && b >= min_omega && estimate.1 < target {
            break;
        }
    }
    let (limit, extrap_err) = estimate;
    let drift = early.map_or(0.0, |e| (limit - e).abs());
    let err = (extrap_err + quad_err + drift) / PI;
    let raw = 0.5 - limit / PI;
    if !(err <= MAX_INVERSION_ERROR) || !raw.is_finite() {
        return Err(Error::numeric(
            format!("tail inversion at eta = {eta} did not converge"),
            Complex64::new(raw, 0.0),
            err,
        ));
    }
    Ok(TailPoint {
        p: raw.clamp(0.0, 1.0),
        err,
    })
}

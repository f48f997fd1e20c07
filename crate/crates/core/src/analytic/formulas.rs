//! Closed-form tails derived from the constant `K = P(C/I > 1)`.

use crate::error::{Error, Result};

fn check_k(k_const: f64) -> Result<()> {
    if !(k_const > 0.0 && k_const < 1.0) {
        return Err(Error::domain("K constant must lie in (0, 1)"));
    }
    Ok(())
}

fn check_exponent(epsilon: f64, l: usize) -> Result<()> {
    if !(epsilon > l as f64) {
        return Err(Error::stability(format!(
            "path-loss exponent {epsilon} must exceed the dimension {l}"
        )));
    }
    Ok(())
}

/// `K eta^(-l/eps)`, valid for `eta >= 1` in a homogeneous field.
pub fn powerlaw_tail(eta: f64, epsilon: f64, l: usize, k_const: f64) -> Result<f64> {
    if !(eta >= 1.0) {
        return Err(Error::domain("the power-law tail holds only for eta >= 1"));
    }
    check_exponent(epsilon, l)?;
    check_k(k_const)?;
    Ok(k_const * eta.powf(-(l as f64) / epsilon))
}

/// Probability that at least one of `n_groups` independent systems with
/// tail `p_single` exceeds the threshold.
pub fn reuse_groups_tail(p_single: f64, n_groups: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_single) {
        return Err(Error::domain("probability must lie in [0, 1]"));
    }
    if n_groups == 0 {
        return Err(Error::domain("need at least one group"));
    }
    if n_groups == 1 || p_single == 1.0 {
        return Ok(p_single);
    }
    Ok(-(n_groups as f64 * (-p_single).ln_1p()).exp_m1())
}

/// `P(alpha C/I > y) = K (y/alpha)^(-l/eps)` for `y > alpha`, when the
/// serving power is scaled by `alpha`.
pub fn power_control_tail(y: f64, alpha: f64, epsilon: f64, l: usize, k_const: f64) -> Result<f64> {
    if !(alpha > 0.0 && y > alpha) {
        return Err(Error::domain("power-control tail needs y > alpha > 0"));
    }
    check_exponent(epsilon, l)?;
    check_k(k_const)?;
    Ok(k_const * (y / alpha).powf(-(l as f64) / epsilon))
}

//! Characteristic functions of the inverse C/I and C/(I+N), their inversion
//! to tail probabilities, and closed-form approximations.

mod charfn;
mod constants;
mod curve;
mod fewbs;
mod formulas;
mod inversion;

pub use charfn::{
    charfn_inv_cinr, charfn_inv_cir, charfn_inv_cir_homogeneous, charfn_pi_given_r1,
    log_conditional_charfn, log_conditional_numeric, CharFn, Provenance,
};
pub use constants::{
    k_constant, ratio_constants, ratio_key, read_lookup, write_lookup, RatioConstants, LOOKUP_ENV,
};
pub use curve::{
    analytic_tail_curve, few_bs_curve, log_grid, system_charfn, tail_curve, Method, TailCurve,
};
pub use fewbs::{few_bs_g, few_bs_tail, truncated_interference_mean, FewBsConstants};
pub use formulas::{power_control_tail, powerlaw_tail, reuse_groups_tail};
pub use inversion::{tail_from_charfn, TailPoint, MAX_INVERSION_ERROR};

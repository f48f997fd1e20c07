//! Carrier-to-interference analysis for shotgun cellular systems: base
//! stations scattered by a (possibly non-homogeneous) Poisson point process
//! in one, two or three dimensions.
//!
//! Three routes to the tail probability `P(C/I > eta)` are provided and are
//! meant to cross-check each other:
//!
//! * [`analytic`] inverts the characteristic function of the inverse ratio,
//! * [`analytic::few_bs_tail`] evaluates the closed-form few-base-station model,
//! * [`montecarlo`] simulates the field directly.
//!
//! [`transforms`] reduces systems with shadow fading, general path loss and
//! noise to a canonical one-dimensional density on which the other modules
//! operate.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod point_process;
pub mod special;
pub mod transforms;

pub use error::{Error, Result};

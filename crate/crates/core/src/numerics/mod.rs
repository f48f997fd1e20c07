//! Numerical building blocks: quadrature, series acceleration and
//! extended-precision arithmetic.

pub mod ddouble;
pub mod gauss;
pub mod quadrature;
pub mod wynn;

pub use quadrature::{
    integrate, integrate_with_breaks, tanh_sinh, QuadResult, QuadValue, Tolerance,
};
pub use wynn::WynnEpsilon;

//! Equivalences that reduce a system with shadow fading, a general path loss
//! and noise to a canonical one-dimensional system with path loss `1/R`.

mod fading;
mod pathloss;
mod spec;
mod tabulate;

pub use fading::{
    absorb_fading, db_to_natural, lognormal_density_gain, lognormal_density_gain_db,
    sectorized_density, FadingModel,
};
pub use pathloss::{canonicalize_pathloss, PathLoss, PathLossModel};
pub use spec::{canonicalize_noise, reduce, CanonicalSystem, DensitySpec, SystemSpec};

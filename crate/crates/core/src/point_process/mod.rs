//! Poisson BS fields seen from the mobile station: density algebra and exact
//! sampling of ordered distances.

mod density;
mod sampling;
mod spatial;

use std::f64::consts::PI;

pub use density::{LineDensity, PowerTail, RadialDensity, Table, TabulatedDensity};
pub use sampling::{
    pdf_r1, pdf_rk_given_rk1, sample_distances, sample_distances_with, DistanceStream,
    OrderedDistances, ENVELOPE_FACTOR,
};
pub use spatial::{map_to_1d, translate_spatial, SpatialDensity};

use crate::error::{Error, Result};

/// Surface measure of the unit sphere in `l` dimensions, counting both
/// directions on the line: `b_1 = 2`, `b_2 = 2 pi`, `b_3 = 4 pi`.
pub fn unit_sphere_measure(l: usize) -> Result<f64> {
    match l {
        1 => Ok(2.0),
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        _ => Err(Error::domain(format!(
            "dimension must be 1, 2 or 3, got {l}"
        ))),
    }
}

/// Radial density of a homogeneous field of intensity `lambda0` in `l`
/// dimensions: `lambda0 b_l r^(l-1)`.
pub fn homogeneous_equivalent(lambda0: f64, l: usize) -> Result<RadialDensity> {
    let b = unit_sphere_measure(l)?;
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::domain("homogeneous density must be positive"));
    }
    Ok(RadialDensity::power_law(lambda0 * b, (l - 1) as f64))
}

/// Distances from position `y` for BSs on a line with density `d`:
/// `lambda(r) = d(y - r) + d(y + r)`.
pub fn translate_density(d: &LineDensity, y: f64) -> Result<RadialDensity> {
    let out = RadialDensity::Shifted { base: d.clone(), y };
    out.validate()?;
    Ok(out)
}

/// `(1/a) lambda(r/a)`: the density after stretching all distances by `a`.
pub fn scale_density(density: &RadialDensity, a: f64) -> Result<RadialDensity> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("scale factor must be positive"));
    }
    Ok(match density {
        RadialDensity::PowerLaw { c, p } => RadialDensity::power_law(c * a.powf(-p - 1.0), *p),
        RadialDensity::Tabulated(t) => {
            let table = t.table.map(|r| r * a, |v| v / a)?;
            let tail = t.tail.map(|tl| PowerTail {
                c: tl.c * a.powf(-tl.p - 1.0),
                p: tl.p,
            });
            RadialDensity::Tabulated(TabulatedDensity { table, tail })
        }
        RadialDensity::Shifted { base, y } => RadialDensity::Shifted {
            base: base.scaled(a)?,
            y: y * a,
        },
    })
}

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::gauss;

use super::density::{RadialDensity, TabulatedDensity};

type DensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// BS density in the plane or in space, given as a function of Cartesian
/// coordinates (BS per unit area or volume).
#[derive(Clone)]
pub struct SpatialDensity {
    dimension: usize,
    f: Arc<DensityFn>,
}

impl fmt::Debug for SpatialDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialDensity")
            .field("dimension", &self.dimension)
            .finish_non_exhaustive()
    }
}

impl SpatialDensity {
    pub fn new(
        dimension: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(dimension == 2 || dimension == 3) {
            return Err(Error::domain(format!(
                "spatial density dimension must be 2 or 3, got {dimension}"
            )));
        }
        Ok(Self {
            dimension,
            f: Arc::new(f),
        })
    }

    pub fn uniform(dimension: usize, lambda0: f64) -> Result<Self> {
        Self::new(dimension, move |_| lambda0)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

const PANELS: usize = 8;
const NODES: usize = 16;

/// Composite Gauss–Legendre nodes and weights on `[a, b]`.
fn composite(a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = gauss::legendre(NODES);
    let h = (b - a) / PANELS as f64;
    let mut out = Vec::with_capacity(PANELS * NODES);
    for k in 0..PANELS {
        let c = a + (k as f64 + 0.5) * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            out.push((c + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Integral of the density over the circle or sphere of radius `r` about
/// `center`, including the `r^(l-1)` Jacobian.
fn shell_integral(s: &SpatialDensity, center: &[f64], r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    match s.dimension {
        2 => {
            let sum: f64 = composite(0.0, 2.0 * PI)
                .into_iter()
                .map(|(t, w)| {
                    let p = [center[0] + r * t.cos(), center[1] + r * t.sin()];
                    w * s.value(&p)
                })
                .sum();
            sum * r
        }
        _ => {
            let phis = composite(0.0, 2.0 * PI);
            let sum: f64 = composite(0.0, PI)
                .into_iter()
                .map(|(th, wt)| {
                    let (st, ct) = th.sin_cos();
                    let inner: f64 = phis
                        .iter()
                        .map(|&(ph, wp)| {
                            let p = [
                                center[0] + r * st * ph.cos(),
                                center[1] + r * st * ph.sin(),
                                center[2] + r * ct,
                            ];
                            wp * s.value(&p)
                        })
                        .sum();
                    wt * st * inner
                })
                .sum();
            sum * r * r
        }
    }
}

fn tabulate(s: &SpatialDensity, center: &[f64], grid: &[f64]) -> Result<RadialDensity> {
    let mut values = Vec::with_capacity(grid.len());
    for &r in grid {
        let v = shell_integral(s, center, r);
        if !v.is_finite() {
            return Err(Error::stability(format!(
                "angular integral is not finite at r = {r}"
            )));
        }
        if v < 0.0 {
            return Err(Error::domain(format!(
                "spatial density is negative near r = {r}"
            )));
        }
        values.push(v);
    }
    Ok(RadialDensity::Tabulated(TabulatedDensity::new(
        grid.to_vec(),
        values,
        None,
    )?))
}

/// Radial density of distances from the origin,
/// `lambda(r) = int lambda(r, theta) r dtheta` (2-D) or its spherical
/// analogue, tabulated on `grid`.
pub fn map_to_1d(s: &SpatialDensity, grid: &[f64]) -> Result<RadialDensity> {
    tabulate(s, &vec![0.0; s.dimension], grid)
}

/// Radial density of distances from the point `ms`.
pub fn translate_spatial(s: &SpatialDensity, ms: &[f64], grid: &[f64]) -> Result<RadialDensity> {
    if ms.len() != s.dimension {
        return Err(Error::domain(
            "MS position dimension does not match the density",
        ));
    }
    tabulate(s, ms, grid)
}

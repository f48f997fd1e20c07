use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::density::RadialDensity;

/// Safety factor applied to the thinning envelope.
pub const ENVELOPE_FACTOR: f64 = 1.001;

/// BS distances from the MS in non-decreasing order, all within `(0, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedDistances {
    pub distances: Vec<f64>,
    pub r_max: f64,
}

impl OrderedDistances {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Number of points in `[a, b)`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        let lo = self.distances.partition_point(|&r| r < a);
        let hi = self.distances.partition_point(|&r| r < b);
        hi - lo
    }
}

/// Sample the Poisson process on `[0, r_max]` with a fresh generator seeded
/// from `seed`.
pub fn sample_distances(
    density: &RadialDensity,
    r_max: f64,
    seed: u64,
) -> Result<OrderedDistances> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_distances_with(density, r_max, &mut rng)
}

/// Draw `M ~ Poisson(Lambda(r_max))` points, place them i.i.d. with density
/// proportional to `lambda` on `[0, r_max]`, and sort.
///
/// Power laws are placed by inverting the cumulative; other densities by
/// thinning uniform candidates against `ENVELOPE_FACTOR * sup lambda`.
pub fn sample_distances_with<R: Rng + ?Sized>(
    density: &RadialDensity,
    r_max: f64,
    rng: &mut R,
) -> Result<OrderedDistances> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::domain(
            "truncation radius must be positive and finite",
        ));
    }
    density.validate()?;
    let mass = density.cumulative(r_max);
    if !mass.is_finite() {
        return Err(Error::Sampling(format!("infinite mass on [0, {r_max}]")));
    }
    let count = if mass > 0.0 {
        let poisson = Poisson::new(mass).map_err(|e| Error::Sampling(e.to_string()))?;
        poisson.sample(rng) as usize
    } else {
        0
    };
    let mut distances = Vec::with_capacity(count);
    match density {
        RadialDensity::PowerLaw { .. } => {
            for _ in 0..count {
                let u: f64 = rng.random();
                let r = density.inverse_cumulative(u * mass).unwrap_or(r_max);
                distances.push(r.min(r_max));
            }
        }
        _ => {
            let envelope = density.sup_on(r_max) * ENVELOPE_FACTOR;
            if !envelope.is_finite() {
                return Err(Error::Sampling(
                    "density is unbounded on the sampling range".into(),
                ));
            }
            for _ in 0..count {
                loop {
                    let x = r_max * (1.0 - rng.random::<f64>());
                    let lx = density.value(x);
                    if lx > envelope {
                        return Err(Error::Sampling(format!(
                            "density {lx} at r = {x} exceeds thinning envelope {envelope}"
                        )));
                    }
                    if rng.random::<f64>() * envelope < lx {
                        distances.push(x);
                        break;
                    }
                }
            }
        }
    }
    distances.sort_by(f64::total_cmp);
    Ok(OrderedDistances { distances, r_max })
}

/// Generates the points of the process in increasing order of distance.
///
/// Successive points are separated by unit-rate exponential spacings in the
/// mass coordinate `Lambda(r)`, so a stream cut at any radius is an exact
/// sample on that range, and runs cut at two radii share their common
/// prefix. Shifted line densities, whose cumulative has no cheap inverse, are
/// thinned from a homogeneous stream instead.
pub struct DistanceStream<'a> {
    density: &'a RadialDensity,
    mode: StreamMode,
}

enum StreamMode {
    Inverse { mass: f64 },
    Thinning { envelope: f64, r: f64, end: f64 },
}

impl<'a> DistanceStream<'a> {
    pub fn new(density: &'a RadialDensity) -> Result<Self> {
        density.validate()?;
        let mode = match density {
            RadialDensity::Shifted { .. } => {
                let envelope = density.sup_on(f64::INFINITY) * ENVELOPE_FACTOR;
                if !envelope.is_finite() {
                    return Err(Error::Sampling("line density has no finite bound".into()));
                }
                StreamMode::Thinning {
                    envelope,
                    r: 0.0,
                    end: density.support_end().unwrap_or(f64::INFINITY),
                }
            }
            _ => StreamMode::Inverse { mass: 0.0 },
        };
        Ok(Self { density, mode })
    }

    /// Stream of the points beyond `r0` only, which by independence of
    /// disjoint regions is the process conditioned on a point at `r0`.
    pub fn starting_at(density: &'a RadialDensity, r0: f64) -> Result<Self> {
        if !(r0 >= 0.0) {
            return Err(Error::domain("stream start must be non-negative"));
        }
        let mut s = Self::new(density)?;
        match &mut s.mode {
            StreamMode::Inverse { mass } => *mass = density.cumulative(r0),
            StreamMode::Thinning { r, .. } => *r = r0,
        }
        Ok(s)
    }

    /// Next distance, or `None` once the process has no further points.
    pub fn next_distance<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<f64>> {
        match &mut self.mode {
            StreamMode::Inverse { mass } => {
                let e: f64 = Exp1.sample(rng);
                *mass += e;
                Ok(self
                    .density
                    .inverse_cumulative(*mass)
                    .filter(|r| r.is_finite()))
            }
            StreamMode::Thinning { envelope, r, end } => {
                if *envelope == 0.0 {
                    return Ok(None);
                }
                loop {
                    let e: f64 = Exp1.sample(rng);
                    *r += e / *envelope;
                    if *r > *end {
                        return Ok(None);
                    }
                    let lx = self.density.value(*r);
                    if lx > *envelope {
                        return Err(Error::Sampling(format!(
                            "density {lx} at r = {r} exceeds thinning envelope {envelope}"
                        )));
                    }
                    if rng.random::<f64>() * *envelope < lx {
                        return Ok(Some(*r));
                    }
                }
            }
        }
    }
}

/// Density of the nearest distance, `lambda(r) exp(-Lambda(r))`.
pub fn pdf_r1(density: &RadialDensity, r1: f64) -> f64 {
    if r1 < 0.0 {
        return 0.0;
    }
    density.value(r1) * (-density.cumulative(r1)).exp()
}

/// Density of `R_k` given `R_{k-1}`,
/// `lambda(r_k) exp(-(Lambda(r_k) - Lambda(r_{k-1})))`.
pub fn pdf_rk_given_rk1(density: &RadialDensity, rk: f64, rk1: f64) -> f64 {
    if rk < rk1 {
        return 0.0;
    }
    density.value(rk) * (density.cumulative(rk1) - density.cumulative(rk)).exp()
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_process::{DistanceStream, RadialDensity};
use crate::transforms::{FadingModel, PathLossModel, SystemSpec};

use super::truncation::{auto_r_max, far_field_mean};

/// Attempts at drawing a non-empty field before a trial fails.
pub const MAX_EMPTY_RETRIES: u32 = 10;

/// Outcome of one simulated field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    /// `C/I`; infinite when the serving BS is alone.
    pub cir: f64,
    pub cinr: f64,
    /// Rank of the serving BS by distance, 0 for the nearest.
    pub serving_index: usize,
    /// Number of BSs inside the simulation radius.
    pub count: usize,
    /// Empty fields redrawn before this one.
    pub retries: u32,
}

/// Everything a trial needs, resolved once per campaign.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub density: RadialDensity,
    pub pathloss: PathLossModel,
    pub fading: FadingModel,
    /// Noise over transmit gain; powers are simulated with unit gain so
    /// that `K` enters only here.
    pub noise: f64,
    pub r_max: f64,
    /// Mean unit-gain interference from beyond `r_max`, added to every
    /// trial.
    pub far_field: f64,
}

impl TrialSetup {
    /// Resolve a system; `r_max = None` picks the radius automatically.
    pub fn new(spec: &SystemSpec, r_max: Option<f64>, far_field: bool) -> Result<Self> {
        spec.validate()?;
        let density = spec.radial_density()?;
        let r_max = match r_max {
            Some(r) if r > 0.0 => r,
            Some(r) => {
                return Err(Error::domain(format!(
                    "simulation radius {r} must be positive"
                )))
            }
            None => auto_r_max(&density, &spec.pathloss, &spec.fading)?,
        };
        let far = if far_field {
            far_field_mean(&density, &spec.pathloss, &spec.fading, r_max)?
        } else {
            0.0
        };
        Ok(Self {
            density,
            pathloss: spec.pathloss.clone(),
            fading: spec.fading,
            noise: spec.n / spec.k,
            r_max,
            far_field: far,
        })
    }
}

/// Random stream of trial `index` under `seed`; independent of how trials
/// are scheduled.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Ratios for unit-gain received powers listed in order of distance.
/// `None` when no power is positive.
pub fn field_ratios(
    powers: impl IntoIterator<Item = f64>,
    far_field: f64,
    noise: f64,
) -> Option<TrialResult> {
    let mut total = 0.0;
    let mut best = 0.0;
    let mut best_index = 0;
    let mut count = 0;
    for power in powers {
        if power > best {
            best = power;
            best_index = count;
        }
        total += power;
        count += 1;
    }
    if best == 0.0 {
        return None;
    }
    let interference = (total - best).max(0.0) + far_field;
    let cir = if interference == 0.0 {
        f64::INFINITY
    } else {
        best / interference
    };
    Some(TrialResult {
        cir,
        cinr: best / (interference + noise),
        serving_index: best_index,
        count,
        retries: 0,
    })
}

/// One trial: draw the field, pick the strongest BS, form the ratios.
pub fn run_trial(setup: &TrialSetup, seed: u64, index: u64) -> Result<TrialResult> {
    let mut rng = trial_rng(seed, index);
    let mut powers = Vec::new();
    for retries in 0..=MAX_EMPTY_RETRIES {
        powers.clear();
        let mut stream = DistanceStream::new(&setup.density)?;
        while let Some(r) = stream.next_distance(&mut rng)? {
            if r > setup.r_max {
                break;
            }
            powers.push(setup.fading.sample(&mut rng) / setup.pathloss.h(r));
        }
        if let Some(t) = field_ratios(powers.iter().copied(), setup.far_field, setup.noise) {
            return Ok(TrialResult { retries, ..t });
        }
    }
    Err(Error::Trial(format!(
        "trial {index}: no base station with positive power after {MAX_EMPTY_RETRIES} redraws"
    )))
}

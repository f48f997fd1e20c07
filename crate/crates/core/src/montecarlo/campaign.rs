use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{log_grid, Method, TailCurve};
use crate::error::{Error, Result};
use crate::point_process::DistanceStream;
use crate::transforms::SystemSpec;

use super::trial::{run_trial, trial_rng, TrialResult, TrialSetup};
use super::truncation::{auto_r_max, far_field_mean};

/// Smallest sample an empirical tail is computed from.
pub const MIN_SAMPLES: usize = 100;
/// Largest fraction of failed trials a campaign tolerates.
pub const MAX_FAILED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub trials: u64,
    /// Simulation radius; chosen per density when absent.
    pub r_max: Option<f64>,
    pub seed: u64,
    pub eta: Vec<f64>,
    /// Trials per parallel work item. Results do not depend on it.
    pub chunk_size: usize,
    /// Add the mean interference from beyond `r_max` to every trial.
    pub far_field: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 20_000,
            r_max: None,
            seed: 0,
            eta: log_grid(0.1, 50.0, 20).expect("static grid"),
            chunk_size: 1024,
            far_field: true,
        }
    }
}

impl McConfig {
    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_eta(mut self, eta: Vec<f64>) -> Self {
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("need at least one trial"));
        }
        if self.chunk_size == 0 {
            return Err(Error::domain("chunk size must be positive"));
        }
        if self.eta.iter().any(|e| !(*e >= 0.0)) || self.eta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain(
                "thresholds must be non-negative and strictly increasing",
            ));
        }
        Ok(())
    }
}

/// Two-sided Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of samples strictly above each threshold, with binomial
/// standard errors.
pub fn empirical_tail(samples: &[f64], eta: &[f64]) -> Result<TailCurve> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "an empirical tail needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut curve = TailCurve {
        method: Method::MonteCarlo,
        eta: eta.to_vec(),
        p: Vec::with_capacity(eta.len()),
        err: Vec::with_capacity(eta.len()),
        trials: Some(n as u64),
    };
    for &e in eta {
        let above = n - sorted.partition_point(|s| *s <= e);
        let p = above as f64 / n as f64;
        curve.p.push(p);
        curve.err.push((p * (1.0 - p) / n as f64).sqrt());
    }
    Ok(curve)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() {
            a[i]
        } else {
            b[j]
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Sample mean and its standard error.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Result of a campaign; trials are kept in index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub config: McConfig,
    pub r_max: f64,
    pub far_field: f64,
    pub cir: TailCurve,
    pub cinr: TailCurve,
    pub failed: u64,
    pub retries: u64,
    #[serde(skip)]
    pub trials: Vec<TrialResult>,
}

impl CampaignResult {
    /// The C/(I+N) curve, which is the C/I curve when there is no noise.
    pub fn tail(&self) -> &TailCurve {
        &self.cinr
    }

    pub fn cir_samples(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.cir).collect()
    }

    pub fn cinr_samples(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.cinr).collect()
    }
}

/// Run `cfg.trials` independent trials of `spec`.
///
/// Trial `i` draws from its own stream derived from `(cfg.seed, i)`, so the
/// outcome is the same for any chunk size or thread count.
pub fn run_campaign(spec: &SystemSpec, cfg: &McConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let setup = TrialSetup::new(spec, cfg.r_max, cfg.far_field)?;
    run_campaign_with(&setup, cfg)
}

pub fn run_campaign_with(setup: &TrialSetup, cfg: &McConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let chunk = cfg.chunk_size as u64;
    let n_chunks = cfg.trials.div_ceil(chunk);
    let outcomes: Vec<Vec<Result<TrialResult>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(cfg.trials);
            (start..end)
                .map(|i| run_trial(setup, cfg.seed, i))
                .collect()
        })
        .collect();
    let mut trials = Vec::with_capacity(cfg.trials as usize);
    let mut failed = 0u64;
    let mut first_error = None;
    for r in outcomes.into_iter().flatten() {
        match r {
            Ok(t) => trials.push(t),
            Err(e @ Error::Trial(_)) => {
                failed += 1;
                first_error.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if failed as f64 > MAX_FAILED_FRACTION * cfg.trials as f64 {
        return Err(Error::Campaign(format!(
            "{failed} of {} trials failed; first: {}",
            cfg.trials,
            first_error.map(|e| e.to_string()).unwrap_or_default()
        )));
    }
    let retries = trials.iter().map(|t| t.retries as u64).sum();
    let cir: Vec<f64> = trials.iter().map(|t| t.cir).collect();
    let cinr: Vec<f64> = trials.iter().map(|t| t.cinr).collect();
    Ok(CampaignResult {
        config: cfg.clone(),
        r_max: setup.r_max,
        far_field: setup.far_field,
        cir: empirical_tail(&cir, &cfg.eta)?,
        cinr: empirical_tail(&cinr, &cfg.eta)?,
        failed,
        retries,
        trials,
    })
}

/// Interference from all BSs beyond a BS at distance `r_k`, one sample per
/// entry, including the transmit gain `K` and fading.
///
/// Points beyond `r_k` are drawn from the process restricted to
/// `(r_k, r_max]`; the mean of the remainder is added to each sample.
pub fn conditional_interference(
    spec: &SystemSpec,
    r_k: f64,
    samples: u64,
    seed: u64,
    r_max: Option<f64>,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let density = spec.radial_density()?;
    let r_max = match r_max {
        Some(r) => r,
        None => auto_r_max(&density, &spec.pathloss, &spec.fading)?.max(r_k),
    };
    let far = far_field_mean(&density, &spec.pathloss, &spec.fading, r_max)?;
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let mut stream = DistanceStream::starting_at(&density, r_k)?;
            let mut sum = 0.0;
            while let Some(r) = stream.next_distance(&mut rng)? {
                if r > r_max {
                    break;
                }
                sum += spec.fading.sample(&mut rng) / spec.pathloss.h(r);
            }
            Ok(spec.k * (sum + far))
        })
        .collect()
}

/// Files written for a campaign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignSidecar {
    pub spec: SystemSpec,
    pub config: McConfig,
    pub r_max: f64,
    pub far_field: f64,
    pub trials_ok: u64,
    pub failed: u64,
    pub retries: u64,
    /// Which ratio the CSV holds: `cinr` when noise is present, else `cir`.
    pub ratio: String,
}

#[derive(Serialize)]
struct McRow {
    eta: f64,
    p_hat: f64,
    se: f64,
    trials: u64,
}

/// Write a Monte-Carlo curve as `eta,p_hat,se,trials`.
pub fn write_mc_csv(curve: &TailCurve, w: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    for i in 0..curve.eta.len() {
        w.serialize(McRow {
            eta: curve.eta[i],
            p_hat: curve.p[i],
            se: curve.err[i],
            trials: curve.trials.unwrap_or(0),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Write `<stem>.csv` and the `<stem>.json` sidecar into `dir`.
pub fn write_campaign(
    spec: &SystemSpec,
    result: &CampaignResult,
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_mc_csv(result.tail(), std::fs::File::create(&csv_path)?)?;
    let sidecar = CampaignSidecar {
        spec: spec.clone(),
        config: result.config.clone(),
        r_max: result.r_max,
        far_field: result.far_field,
        trials_ok: result.trials.len() as u64,
        failed: result.failed,
        retries: result.retries,
        ratio: if spec.n > 0.0 { "cinr" } else { "cir" }.to_string(),
    };
    std::fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(vec![csv_path, json_path])
}

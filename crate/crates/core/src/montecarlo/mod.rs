//! Direct simulation of the BS field: each trial draws the point process,
//! applies fading and path loss, and records C/I and C/(I+N) at the MS.
//!
//! BSs are generated outward from the MS up to a simulation radius. The
//! interference from beyond that radius is replaced by its mean, and the
//! radius is chosen so that the neglected fluctuation is small against a
//! typical serving power.

mod campaign;
mod trial;
mod truncation;

pub use campaign::{
    conditional_interference, empirical_tail, ks_distance, mean_and_se, run_campaign,
    run_campaign_with, wilson_interval, write_campaign, write_mc_csv, CampaignResult,
    CampaignSidecar, McConfig, MAX_FAILED_FRACTION, MIN_SAMPLES,
};
pub use trial::{field_ratios, run_trial, trial_rng, TrialResult, TrialSetup, MAX_EMPTY_RETRIES};
pub use truncation::{auto_r_max, far_field_mean, FAR_FIELD_TOLERANCE, MAX_EXPECTED_COUNT};

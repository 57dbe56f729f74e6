//! Monte Carlo estimation of fusion performance.

mod calibrate;
mod rng;
mod roc;
mod sweep;
mod trials;

pub use calibrate::{calibrate_threshold, cap_threshold, exceedance};
pub use rng::{substream, Purpose, SHARED_TRIAL};
pub use roc::{
    auc_mann_whitney, estimate_roc, threshold_grid, wilson_halfwidth, wilson_interval, RocCurve,
    RocMeta, RocPoint, Z_95,
};
pub use sweep::{reference_sum_d, sweep_sinr, SweepPoint};
pub use trials::{
    received_vector, run_trials, FadingMode, GainsMode, Scenario, TrialPlan, TrialSamples,
    DEFAULT_MEMORY_BUDGET,
};

//! Fusion statistics, their combining weights and closed-form thresholds.

mod llr;
mod rule;
mod threshold;
mod weights;

pub use llr::{optimum_llr, OptimumDetector, MAX_ENUMERATED_SUS};
pub use rule::{FusionRule, RuleFamily};
pub use threshold::{
    closed_form_threshold, threshold_mrc_family, threshold_wl, ClosedFormThreshold, ThresholdForm,
};
pub use weights::{
    deflection, linear_statistic, mrc_family_weight, weight_for, wl_weight, CombinerWeight,
    StatisticValue, CONDITION_WARN,
};

/// Threshold test; ties decide H1.
#[inline]
pub fn decide_h1(statistic: f64, threshold: f64) -> bool {
    statistic >= threshold
}

use serde::{Deserialize, Serialize};

use super::rule::{FusionRule, RuleFamily};
use crate::analytic::{common_delta, gm_moments, AsymptoticModel};
use crate::error::{Error, Result};
use crate::sensing::{decision_mean_cov, Hypothesis, SensingProfile};
use crate::special::q_inv;

/// Which closed-form expression produces the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdForm {
    /// Exact inversion of the moment-matched H0 tail,
    /// `mean + Q^{-1}(P_F0) sqrt(variance)`.
    #[default]
    Consistent,
    /// The low-SINR large-system expressions as usually printed. Their
    /// offset and spread terms are not expressed in the units of the
    /// statistic, so they are kept for reference only.
    Printed,
}

/// A threshold in raw units and on the normalized statistic `Gamma^WB`.
///
/// Raw units are `Gamma = 2 Re{a'y}` (unit-norm `a`) for the WL family and
/// `Re{a'y} / sqrt(N)` for the MRC family. Decisions compare `Gamma^WB`
/// against `wb`; ties decide H1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormThreshold {
    pub rule: FusionRule,
    pub raw: f64,
    pub wb: f64,
    pub form: ThresholdForm,
}

fn check_target(target_pf0: f64) -> Result<()> {
    if !(target_pf0 > 0.0 && target_pf0 < 1.0) {
        return Err(Error::Config(format!("target false-alarm rate {target_pf0} not in (0, 1)")));
    }
    Ok(())
}

/// Threshold for a WL or TR-WL rule approaching `target_pf0`.
pub fn threshold_wl(
    rule: FusionRule,
    target_pf0: f64,
    model: &AsymptoticModel,
    profile: &SensingProfile,
    l: usize,
    form: ThresholdForm,
) -> Result<ClosedFormThreshold> {
    if rule.family() != RuleFamily::WidelyLinear {
        return Err(Error::Config(format!("{rule} is not a widely linear rule")));
    }
    check_target(target_pf0)?;
    let gm = gm_moments(rule, Hypothesis::H0, model, profile, l)?;
    let raw = match form {
        ThresholdForm::Consistent => gm.mean + q_inv(target_pf0) * gm.variance.sqrt(),
        ThresholdForm::Printed => {
            let delta = common_delta(profile, l, Hypothesis::H0)?;
            let mu = decision_mean_cov(profile, l, Hypothesis::H0)?.mu;
            let (num_c, den_c) = if rule.is_time_reversed() {
                (&model.f, &model.a_tr)
            } else {
                (&model.d, &model.d)
            };
            let num: f64 = num_c.iter().zip(&mu).map(|(c, m)| c * m).sum();
            let den: f64 = den_c.iter().zip(&mu).map(|(c, m)| c * m * m).sum::<f64>().sqrt();
            q_inv(target_pf0) * gm.variance.sqrt()
                + 2.0 * model.num_antennas as f64 * delta * model.rho.sqrt() * num / den
        }
    };
    Ok(ClosedFormThreshold { rule, raw, wb: raw * gm.wb_scale, form })
}

/// Threshold for MRC, TR-MRC or TR-mMRC (and mMRC in the consistent form).
pub fn threshold_mrc_family(
    rule: FusionRule,
    target_pf0: f64,
    model: &AsymptoticModel,
    profile: &SensingProfile,
    l: usize,
    form: ThresholdForm,
) -> Result<ClosedFormThreshold> {
    if rule.family() != RuleFamily::MaximalRatio {
        return Err(Error::Config(format!("{rule} is not an MRC-family rule")));
    }
    check_target(target_pf0)?;
    let gm = gm_moments(rule, Hypothesis::H0, model, profile, l)?;
    let raw = match form {
        ThresholdForm::Consistent => gm.mean + q_inv(target_pf0) * gm.variance.sqrt(),
        ThresholdForm::Printed => {
            let delta = common_delta(profile, l, Hypothesis::H0)?;
            let alpha = (1.0 - delta * delta) * model.num_sus() as f64 + model.sigma_e2;
            let spread = q_inv(target_pf0) * (0.5 * alpha).sqrt();
            let offset = delta * (model.num_antennas as f64 * model.rho).sqrt();
            let sum = |v: &[f64], p: i32| v.iter().map(|x| x.powi(p)).sum::<f64>();
            match rule {
                FusionRule::Mrc => spread * sum(&model.d, 1) + offset * sum(&model.d, 2),
                FusionRule::TrMrc => spread * sum(&model.a_tr, 1) + offset * sum(&model.a_tr, 2),
                FusionRule::TrMmrc => {
                    if model.a_tr.iter().any(|a| !(*a > 0.0)) {
                        return Err(Error::Singular(format!("{rule}: zero time-reversed gain")));
                    }
                    spread * sum(&model.d, 1) + offset * sum(&model.a_tr, -2)
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "no printed closed-form threshold exists for {rule}"
                    )))
                }
            }
        }
    };
    Ok(ClosedFormThreshold { rule, raw, wb: raw * gm.wb_scale, form })
}

/// Dispatches to [`threshold_wl`] or [`threshold_mrc_family`].
pub fn closed_form_threshold(
    rule: FusionRule,
    target_pf0: f64,
    model: &AsymptoticModel,
    profile: &SensingProfile,
    l: usize,
    form: ThresholdForm,
) -> Result<ClosedFormThreshold> {
    match rule.family() {
        RuleFamily::WidelyLinear => threshold_wl(rule, target_pf0, model, profile, l, form),
        RuleFamily::MaximalRatio => threshold_mrc_family(rule, target_pf0, model, profile, l, form),
        RuleFamily::Optimum => Err(Error::Capability(
            "the optimum rule has no closed-form threshold".into(),
        )),
    }
}

//! Large-array closed forms: conditional means of the normalized statistics,
//! Gaussian moment matching of their mixtures, and the channel SINR used as
//! sweep axis.

use serde::Serialize;

use crate::channel::{diagonals, LargeScaleGains, PowerDelayProfile};
use crate::config::{ChannelMode, NetworkConfig};
use crate::error::{Error, Result};
use crate::fusion::{FusionRule, RuleFamily};
use crate::sensing::{decision_mean_cov, Hypothesis, SensingProfile};
use crate::special::q_func;

/// Scenario quantities entering the closed forms for one subcarrier, under
/// the effective-tap convention (`Z = K`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticModel {
    pub num_antennas: usize,
    pub rho: f64,
    pub sigma_e2: f64,
    /// `lambda_k beta(k-1)`.
    pub d: Vec<f64>,
    /// `lambda_k beta(K-k)`.
    pub a_tr: Vec<f64>,
    /// `lambda_k sqrt(beta(K-k) beta(k-1))`.
    pub f: Vec<f64>,
}

impl AsymptoticModel {
    pub fn new(
        config: &NetworkConfig,
        gains: &LargeScaleGains,
        pdp: &PowerDelayProfile,
        sigma_e2: f64,
        l: usize,
    ) -> Result<Self> {
        config.require_paper_faithful()?;
        let mut cfg = config.clone();
        cfg.channel_mode = ChannelMode::PaperFaithful;
        let (d, a_tr, f) = diagonals(&cfg, gains, pdp, l)?;
        Ok(AsymptoticModel {
            num_antennas: config.num_antennas,
            rho: config.reporting_energy[l],
            sigma_e2,
            d,
            a_tr,
            f,
        })
    }

    pub fn num_sus(&self) -> usize {
        self.d.len()
    }

    pub fn sigma_e(&self) -> f64 {
        self.sigma_e2.sqrt()
    }

    fn n(&self) -> f64 {
        self.num_antennas as f64
    }

    /// `sum_k 1/v_k` for the rule's equalizing diagonal, failing on zeros.
    fn inverse_sum(rule: FusionRule, v: &[f64]) -> Result<f64> {
        if let Some(k) = v.iter().position(|x| !(*x > 0.0)) {
            return Err(Error::Singular(format!("{rule}: diagonal entry {k} is zero")));
        }
        Ok(v.iter().map(|x| 1.0 / x).sum())
    }

    /// `sum_k` of the squared combining coefficients weighted by the
    /// reference-channel power, i.e. `||a||^2 / N` for the MRC family.
    fn mrc_energy(&self, rule: FusionRule) -> Result<f64> {
        Ok(match rule {
            FusionRule::Mrc => self.d.iter().sum(),
            FusionRule::Mmrc => Self::inverse_sum(rule, &self.d)?,
            FusionRule::TrMrc => self.a_tr.iter().sum(),
            FusionRule::TrMmrc => Self::inverse_sum(rule, &self.a_tr)?,
            _ => return Err(Error::Config(format!("{rule} is not an MRC-family rule"))),
        })
    }
}

/// Large-array mean of `Gamma^WB` conditioned on the decision vector `x`.
///
/// The WL forms use `c_k = mu_k / (sigma_e^2 + 2 N rho d_k Sigma_{x,k})` with
/// the decision variance of hypothesis `i` (the rule's deflection index);
/// the TR forms replace `d` by `a_tr` in `c` and in the norm, and by `f` in
/// the cross term.
pub fn asymptotic_mean(
    rule: FusionRule,
    x: &[f64],
    model: &AsymptoticModel,
    profile: &SensingProfile,
    l: usize,
) -> Result<f64> {
    let k = model.num_sus();
    if x.len() != k {
        return Err(Error::Dimension(format!("decision vector of length {}, K = {k}", x.len())));
    }
    let n = model.n();
    let sigma = model.sigma_e();
    match rule.family() {
        RuleFamily::Optimum => Err(Error::Capability(
            "the optimum rule has no closed-form mean".into(),
        )),
        RuleFamily::MaximalRatio => {
            // Effective per-SU gain of a'G, divided by N.
            let gain: Vec<f64> = match rule {
                FusionRule::Mrc => model.d.clone(),
                FusionRule::Mmrc => {
                    AsymptoticModel::inverse_sum(rule, &model.d)?;
                    vec![1.0; k]
                }
                FusionRule::TrMrc => model.f.clone(),
                _ => {
                    AsymptoticModel::inverse_sum(rule, &model.a_tr)?;
                    model.f.iter().zip(&model.a_tr).map(|(f, a)| f / a).collect()
                }
            };
            let energy = model.mrc_energy(rule)?;
            let proj: f64 = gain.iter().zip(x).map(|(g, x)| g * x).sum();
            Ok((2.0 * n * model.rho).sqrt() * proj / (sigma * energy.sqrt()))
        }
        RuleFamily::WidelyLinear => {
            let i = rule.deflection_index().expect("WL rules carry an index");
            let h = if i == 0 { Hypothesis::H0 } else { Hypothesis::H1 };
            let mom = decision_mean_cov(profile, l, h)?;
            if mom.mu.len() != k {
                return Err(Error::Dimension("profile and model disagree on K".into()));
            }
            let (reference, cross) = if rule.is_time_reversed() {
                (&model.a_tr, &model.f)
            } else {
                (&model.d, &model.d)
            };
            let c: Vec<f64> = (0..k)
                .map(|j| {
                    mom.mu[j] / (model.sigma_e2 + 2.0 * n * model.rho * reference[j] * mom.cov_diag[j])
                })
                .collect();
            let norm2: f64 = (0..k).map(|j| reference[j] * c[j] * c[j]).sum();
            if norm2 <= 0.0 {
                return Err(Error::DegenerateWeight(format!("{rule}: combiner vanishes")));
            }
            let proj: f64 = (0..k).map(|j| cross[j] * c[j] * x[j]).sum();
            Ok(2.0 * (n * model.rho).sqrt() * proj / (sigma * norm2.sqrt()))
        }
    }
}

/// Moment-matched Gaussian for a statistic under one hypothesis.
///
/// `mean` and `variance` refer to the rule's raw units: `Gamma = 2 Re{a'y}`
/// with `||a|| = 1` for the WL family and `Re{a'y} / sqrt(N)` for the MRC
/// family. `wb_scale` converts a raw value to the normalized `Gamma^WB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmApprox {
    pub mean: f64,
    pub variance: f64,
    pub wb_scale: f64,
}

impl GmApprox {
    /// `Q((gamma - mean) / sqrt(variance))` for a raw threshold.
    pub fn approx_pf(&self, gamma: f64) -> f64 {
        q_func((gamma - self.mean) / self.variance.sqrt())
    }

    /// Same as [`GmApprox::approx_pf`] for a threshold on `Gamma^WB`.
    pub fn approx_pf_wb(&self, gamma_wb: f64) -> f64 {
        self.approx_pf(gamma_wb / self.wb_scale)
    }

    pub fn mean_wb(&self) -> f64 {
        self.mean * self.wb_scale
    }

    pub fn variance_wb(&self) -> f64 {
        self.variance * self.wb_scale * self.wb_scale
    }
}

/// Common `2P - 1` of all SUs, or an unsupported-configuration error.
pub(crate) fn common_delta(profile: &SensingProfile, l: usize, h: Hypothesis) -> Result<f64> {
    profile
        .common_prob(l, h)?
        .map(|p| 2.0 * p - 1.0)
        .ok_or_else(|| {
            Error::Unsupported(format!(
                "closed forms need identical local probabilities under {h:?} on subcarrier {l}"
            ))
        })
}

pub fn gm_moments(
    rule: FusionRule,
    h: Hypothesis,
    model: &AsymptoticModel,
    profile: &SensingProfile,
    l: usize,
) -> Result<GmApprox> {
    let delta = common_delta(profile, l, h)?;
    let k = model.num_sus();
    let alpha = (1.0 - delta * delta) * k as f64 + model.sigma_e2;
    let mean_wb = asymptotic_mean(rule, &vec![delta; k], model, profile, l)?;
    let (variance, wb_scale) = match rule.family() {
        RuleFamily::WidelyLinear => (2.0 * alpha, 1.0 / model.sigma_e()),
        RuleFamily::MaximalRatio => {
            let energy = model.mrc_energy(rule)?;
            (
                0.5 * alpha * energy,
                std::f64::consts::SQRT_2 / (model.sigma_e() * energy.sqrt()),
            )
        }
        RuleFamily::Optimum => unreachable!("rejected by asymptotic_mean"),
    };
    Ok(GmApprox {
        mean: mean_wb / wb_scale,
        variance,
        wb_scale,
    })
}

/// `10 log10(rho N sum_k d_k / (K sigma_e^2))`.
pub fn sinr_db(rho: f64, num_antennas: usize, sum_d: f64, num_sus: usize, sigma_e2: f64) -> f64 {
    10.0 * (rho * num_antennas as f64 * sum_d / (num_sus as f64 * sigma_e2)).log10()
}

/// Reporting energy that places the scenario at `target_db`.
pub fn rho_for_sinr(target_db: f64, num_antennas: usize, sum_d: f64, num_sus: usize, sigma_e2: f64) -> f64 {
    10f64.powf(target_db / 10.0) * num_sus as f64 * sigma_e2 / (num_antennas as f64 * sum_d)
}

pub fn channel_sinr(model: &AsymptoticModel) -> f64 {
    sinr_db(
        model.rho,
        model.num_antennas,
        model.d.iter().sum(),
        model.num_sus(),
        model.sigma_e2,
    )
}

use serde::Serialize;

use super::calibrate::cap_threshold;
use super::roc::wilson_halfwidth;
use super::trials::{run_trials, FadingMode, GainsMode, Scenario, TrialPlan};
use crate::analytic::rho_for_sinr;
use crate::channel::{diagonals, mean_gain, LargeScaleGains};
use crate::error::{Error, Result};
use crate::fusion::{decide_h1, FusionRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub rule: FusionRule,
    pub sinr_db: f64,
    pub rho: f64,
    pub pf0_target: f64,
    pub gamma: f64,
    pub pd0: f64,
    pub halfwidth: f64,
}

/// `sum_k d_k` used to convert SINR to reporting energy: the given gains
/// when fixed, otherwise every SU at the mean large-scale gain.
pub fn reference_sum_d(scenario: &Scenario, fading: &FadingMode) -> Result<f64> {
    let cfg = &scenario.config;
    let d = match fading {
        FadingMode::Fixed(ch) => ch.d_g.clone(),
        FadingMode::Redraw(GainsMode::Fixed(g)) => diagonals(cfg, g, &scenario.pdp, scenario.l)?.0,
        FadingMode::Redraw(GainsMode::Redraw) => {
            let mut g = LargeScaleGains::unit(cfg.num_sus, cfg.r_min);
            g.lambda.fill(mean_gain(cfg));
            diagonals(cfg, &g, &scenario.pdp, scenario.l)?.0
        }
    };
    Ok(d.iter().sum())
}

/// Detection probability at a calibrated false-alarm rate over an SINR grid.
///
/// Every grid point reuses the plan's seed, so all points see the same
/// channels, decisions and noise (common random numbers). Each threshold is the
/// smallest one keeping the empirical P_F0 of its rule at or below the target.
pub fn sweep_sinr(
    plan: &TrialPlan,
    scenario: &Scenario,
    sinr_grid_db: &[f64],
    pf0_target: f64,
) -> Result<Vec<SweepPoint>> {
    if sinr_grid_db.is_empty() {
        return Err(Error::config("SINR grid is empty"));
    }
    if sinr_grid_db.windows(2).any(|w| w[1] <= w[0]) || sinr_grid_db.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("SINR grid must be finite and strictly increasing"));
    }
    if plan.rules.contains(&FusionRule::Opt) {
        return Err(Error::Unsupported("SINR sweeps cover the linear rules only".into()));
    }
    let sum_d = reference_sum_d(scenario, &plan.fading)?;
    let cfg = &scenario.config;
    let sigma_e2 = scenario.sigma_e2()?;
    let mut out = Vec::with_capacity(sinr_grid_db.len() * plan.rules.len());
    for &sinr in sinr_grid_db {
        let rho = rho_for_sinr(sinr, cfg.num_antennas, sum_d, cfg.num_sus, sigma_e2);
        let sc = scenario.with_rho(rho);
        let samples = run_trials(plan, &sc)?;
        for (i, &rule) in samples.rules.iter().enumerate() {
            let gamma = cap_threshold(&samples.h0[i], pf0_target)?;
            let h1 = &samples.h1[i];
            let hits = h1.iter().filter(|v| decide_h1(**v, gamma)).count() as u64;
            out.push(SweepPoint {
                rule,
                sinr_db: sinr,
                rho,
                pf0_target,
                gamma,
                pd0: hits as f64 / h1.len() as f64,
                halfwidth: wilson_halfwidth(hits, h1.len() as u64),
            });
        }
    }
    Ok(out)
}

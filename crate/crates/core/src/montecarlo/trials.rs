use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{substream, Purpose};
use crate::channel::{
    build_subcarrier, complex_normal, draw_interference, draw_large_scale, effective_noise_power,
    InterferencePowers, LargeScaleGains, PowerDelayProfile, SubcarrierChannel,
};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::fusion::{linear_statistic, weight_for, CombinerWeight, FusionRule, OptimumDetector, RuleFamily};
use crate::sensing::{decision_mean_cov, draw_local_decisions, DecisionMoments, DecisionVector, Hypothesis, SensingProfile};

/// Default transient-memory budget of one chunk of trials.
pub const DEFAULT_MEMORY_BUDGET: usize = 256 << 20;

/// Everything that defines the sensing and reporting scenario on one
/// subcarrier.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: NetworkConfig,
    pub profile: SensingProfile,
    pub pdp: PowerDelayProfile,
    pub l: usize,
}

impl Scenario {
    pub fn new(
        config: NetworkConfig,
        profile: SensingProfile,
        pdp: PowerDelayProfile,
        l: usize,
    ) -> Result<Self> {
        config.validate()?;
        config.check_subcarrier(l)?;
        pdp.check_shape(config.num_sus, config.num_subcarriers)?;
        if profile.num_sus() != config.num_sus || profile.num_subcarriers() != config.num_subcarriers {
            return Err(Error::Dimension(format!(
                "sensing profile is {}x{}, scenario has K = {}, L = {}",
                profile.num_sus(),
                profile.num_subcarriers(),
                config.num_sus,
                config.num_subcarriers
            )));
        }
        Ok(Scenario { config, profile, pdp, l })
    }

    pub fn interference(&self) -> Result<InterferencePowers> {
        InterferencePowers::for_config(&self.config, &self.pdp)
    }

    /// `sigma_e^2` of the scenario's subcarrier.
    pub fn sigma_e2(&self) -> Result<f64> {
        Ok(effective_noise_power(&self.config, &self.interference()?, self.l))
    }

    pub fn rho(&self) -> f64 {
        self.config.reporting_energy[self.l]
    }

    /// Copy with the reporting energy of the active subcarrier replaced.
    pub fn with_rho(&self, rho: f64) -> Self {
        Scenario {
            config: self.config.with_reporting_energy(self.l, rho),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainsMode {
    /// The same large-scale gains in every trial.
    Fixed(LargeScaleGains),
    /// New SU positions and shadowing in every trial.
    Redraw,
}

#[derive(Debug, Clone)]
pub enum FadingMode {
    /// One channel for all trials (instantaneous probabilities).
    Fixed(SubcarrierChannel),
    /// A new channel per trial (subcarrier-averaged probabilities).
    Redraw(GainsMode),
}

#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub num_trials: u64,
    pub master_seed: u64,
    pub rules: Vec<FusionRule>,
    pub fading: FadingMode,
    /// Worker threads; `None` uses the global rayon default.
    pub workers: Option<usize>,
    /// Upper bound on the transient memory of trials in flight.
    pub memory_budget: usize,
}

impl TrialPlan {
    pub fn new(num_trials: u64, master_seed: u64, rules: Vec<FusionRule>, fading: FadingMode) -> Self {
        TrialPlan {
            num_trials,
            master_seed,
            rules,
            fading,
            workers: None,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

/// Statistic values of every rule under both hypotheses, in trial order.
/// Linear rules report `Gamma^WB`; the optimum rule reports its LLR.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSamples {
    pub rules: Vec<FusionRule>,
    /// `h0[r][t]`: rule `r`, trial `t`.
    pub h0: Vec<Vec<f64>>,
    pub h1: Vec<Vec<f64>>,
}

impl TrialSamples {
    pub fn get(&self, rule: FusionRule) -> Option<(&[f64], &[f64])> {
        let i = self.rules.iter().position(|r| *r == rule)?;
        Some((&self.h0[i], &self.h1[i]))
    }

    pub fn num_trials(&self) -> usize {
        self.h0.first().map_or(0, Vec::len)
    }
}

/// `sqrt(rho) G x + w + psi` with `w ~ CN(0, sigma_w^2 I)` and
/// `psi ~ CN(0, psi2 I)` drawn in that order from `rng`.
pub fn received_vector<R: rand::Rng + ?Sized>(
    ch: &SubcarrierChannel,
    x: &DecisionVector,
    rho: f64,
    sigma_w2: f64,
    psi2: f64,
    rng: &mut R,
) -> DVector<Complex64> {
    let xs = DVector::from_iterator(x.len(), x.as_slice().iter().map(|v| Complex64::new(*v, 0.0)));
    let mut y = &ch.g * xs * Complex64::new(rho.sqrt(), 0.0);
    for v in y.iter_mut() {
        *v += complex_normal(rng, sigma_w2);
    }
    y += draw_interference(psi2, ch.num_antennas(), rng);
    y
}

/// Combiners of one channel realization.
struct Evaluator {
    weights: Vec<Option<CombinerWeight>>,
    optimum: Option<OptimumDetector>,
}

struct Shared<'a> {
    plan: &'a TrialPlan,
    scenario: &'a Scenario,
    rho: f64,
    sigma_w2: f64,
    psi2: f64,
    sigma_e2: f64,
    moments: [DecisionMoments; 2],
}

impl Shared<'_> {
    fn evaluator(&self, ch: &SubcarrierChannel, trial: u64) -> Result<Evaluator> {
        let mut weights = Vec::with_capacity(self.plan.rules.len());
        let mut optimum = None;
        for &rule in &self.plan.rules {
            match rule.family() {
                RuleFamily::Optimum => {
                    optimum = Some(OptimumDetector::new(
                        &ch.g,
                        self.rho,
                        self.sigma_e2,
                        &self.scenario.profile,
                        self.scenario.l,
                    )?);
                    weights.push(None);
                }
                _ => {
                    let m = &self.moments[rule.deflection_index().unwrap_or(0)];
                    let w = weight_for(rule, ch, self.rho, self.sigma_e2, &m.cov_diag, &m.mu)
                        .map_err(|e| numeric(rule, trial, e))?;
                    weights.push(Some(w));
                }
            }
        }
        Ok(Evaluator { weights, optimum })
    }

    fn channel(&self, trial: u64) -> Result<Option<SubcarrierChannel>> {
        let sc = self.scenario;
        match &self.plan.fading {
            FadingMode::Fixed(_) => Ok(None),
            FadingMode::Redraw(gains) => {
                let drawn;
                let gains = match gains {
                    GainsMode::Fixed(g) => g,
                    GainsMode::Redraw => {
                        let mut rng = substream(self.plan.master_seed, trial, Purpose::Gains);
                        drawn = draw_large_scale(&sc.config, &mut rng);
                        &drawn
                    }
                };
                let mut rng = substream(self.plan.master_seed, trial, Purpose::Channel);
                build_subcarrier(&sc.config, gains, &sc.pdp, sc.l, &mut rng).map(Some)
            }
        }
    }

    fn run(&self, trial: u64, fixed: Option<(&SubcarrierChannel, &Evaluator)>) -> Result<[Vec<f64>; 2]> {
        let owned;
        let (ch, ev) = match fixed {
            Some(pair) => pair,
            None => {
                let ch = self.channel(trial)?.expect("redraw mode yields a channel");
                let ev = self.evaluator(&ch, trial)?;
                owned = (ch, ev);
                (&owned.0, &owned.1)
            }
        };
        let sigma_e = self.sigma_e2.sqrt();
        let mut out = [Vec::new(), Vec::new()];
        for h in Hypothesis::BOTH {
            let mut rng = substream(self.plan.master_seed, trial, Purpose::decisions(h));
            let x = draw_local_decisions(&self.scenario.profile, self.scenario.l, h, &mut rng)?;
            let mut rng = substream(self.plan.master_seed, trial, Purpose::noise(h));
            let y = received_vector(ch, &x, self.rho, self.sigma_w2, self.psi2, &mut rng);
            let values = &mut out[h.index()];
            for (&rule, w) in self.plan.rules.iter().zip(&ev.weights) {
                let v = match w {
                    Some(w) => linear_statistic(w, &y, sigma_e)?.gamma_wb,
                    None => ev.optimum.as_ref().expect("built with the rule").llr(&y)?,
                };
                if !v.is_finite() {
                    return Err(Error::Numeric {
                        rule: rule.to_string(),
                        trial,
                        detail: format!("statistic evaluated to {v}"),
                    });
                }
                values.push(v);
            }
        }
        Ok(out)
    }
}

fn numeric(rule: FusionRule, trial: u64, e: Error) -> Error {
    match e {
        Error::DegenerateWeight(detail) => Error::Numeric {
            rule: rule.to_string(),
            trial,
            detail,
        },
        other => other,
    }
}

/// Runs the plan on `scenario`, evaluating every rule on the same received
/// vectors.
///
/// Each trial draws its channel (in redraw mode), its decisions and its noise
/// from substreams keyed by the trial index, so results do not depend on the
/// worker count. Trials are processed in chunks sized so that the transient
/// state of one chunk fits `plan.memory_budget`; only the per-rule statistic
/// values are kept.
pub fn run_trials(plan: &TrialPlan, scenario: &Scenario) -> Result<TrialSamples> {
    if plan.num_trials == 0 {
        return Err(Error::config("num_trials must be >= 1"));
    }
    if plan.rules.is_empty() {
        return Err(Error::config("at least one fusion rule is required"));
    }
    let cfg = &scenario.config;
    let l = scenario.l;
    let powers = scenario.interference()?;
    let moments = [
        decision_mean_cov(&scenario.profile, l, Hypothesis::H0)?,
        decision_mean_cov(&scenario.profile, l, Hypothesis::H1)?,
    ];
    if plan.rules.iter().any(|r| r.family() == RuleFamily::WidelyLinear)
        && moments[0].mu.iter().all(|m| *m == 0.0)
    {
        return Err(Error::DegenerateWeight(
            "WL rules need P_D != P_F for at least one SU".into(),
        ));
    }
    let shared = Shared {
        plan,
        scenario,
        rho: cfg.reporting_energy[l],
        sigma_w2: cfg.noise_power[l],
        psi2: powers.total(l),
        sigma_e2: effective_noise_power(cfg, &powers, l),
        moments,
    };
    let fixed = match &plan.fading {
        FadingMode::Fixed(ch) => {
            if ch.num_antennas() != cfg.num_antennas || ch.num_sus() != cfg.num_sus {
                return Err(Error::Dimension("fixed channel does not match the scenario".into()));
            }
            Some((ch, shared.evaluator(ch, 0)?))
        }
        FadingMode::Redraw(_) => None,
    };

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = plan.workers {
            b = b.num_threads(w.max(1));
        }
        b.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
    };
    let per_trial = 64 * cfg.num_antennas * (cfg.num_sus + cfg.num_taps + 4)
        + 16 * plan.rules.len()
        + if plan.rules.contains(&FusionRule::Opt) { 24 << cfg.num_sus.min(30) } else { 0 };
    let chunk = (plan.memory_budget / per_trial.max(1)).clamp(pool.current_num_threads().max(1), 1 << 16) as u64;

    let n_rules = plan.rules.len();
    let cap = plan.num_trials as usize;
    let mut h0 = vec![Vec::with_capacity(cap); n_rules];
    let mut h1 = vec![Vec::with_capacity(cap); n_rules];
    let mut start = 0;
    while start < plan.num_trials {
        let end = (start + chunk).min(plan.num_trials);
        let fixed_ref = fixed.as_ref().map(|(c, e)| (*c, e));
        let results: Vec<Result<[Vec<f64>; 2]>> =
            pool.install(|| (start..end).into_par_iter().map(|t| shared.run(t, fixed_ref)).collect());
        for r in results {
            let [a, b] = r?;
            for i in 0..n_rules {
                h0[i].push(a[i]);
                h1[i].push(b[i]);
            }
        }
        start = end;
    }
    Ok(TrialSamples {
        rules: plan.rules.clone(),
        h0,
        h1,
    })
}

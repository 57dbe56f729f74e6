use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::spec::{ExperimentKind, ExperimentSpec, FadingSpec, GainsSpec};
use crate::analytic::{gm_moments, rho_for_sinr, sinr_db, AsymptoticModel};
use crate::channel::{build_subcarrier, draw_large_scale, LargeScaleGains, SubcarrierChannel};
use crate::error::{Error, Result};
use crate::fusion::{closed_form_threshold, decide_h1, FusionRule};
use crate::montecarlo::{
    calibrate_threshold, estimate_roc, reference_sum_d, run_trials, substream, sweep_sinr,
    threshold_grid, wilson_halfwidth, FadingMode, GainsMode, Purpose, RocMeta, Scenario,
    TrialPlan, SHARED_TRIAL,
};
use crate::sensing::Hypothesis;

/// SINR definition written into every provenance record.
pub const SINR_DEFINITION: &str = "10*log10(rho * N * sum_k d_k / (K * sigma_e^2)) on the active subcarrier";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
}

/// Files written by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
}

/// Large-scale gains shared by every trial of a run.
pub fn shared_gains(spec: &ExperimentSpec) -> LargeScaleGains {
    let mut rng = substream(spec.seed, SHARED_TRIAL, Purpose::Gains);
    draw_large_scale(&spec.network, &mut rng)
}

/// Fading channel shared by every trial of an instantaneous run.
pub fn shared_channel(spec: &ExperimentSpec, scenario: &Scenario) -> Result<SubcarrierChannel> {
    let gains = shared_gains(spec);
    let mut rng = substream(spec.seed, SHARED_TRIAL, Purpose::Channel);
    build_subcarrier(&scenario.config, &gains, &scenario.pdp, scenario.l, &mut rng)
}

fn fading_mode(spec: &ExperimentSpec, scenario: &Scenario, force_fixed_gains: bool) -> Result<FadingMode> {
    Ok(match spec.fading {
        FadingSpec::Instantaneous => FadingMode::Fixed(shared_channel(spec, scenario)?),
        FadingSpec::Averaged if force_fixed_gains || spec.gains == GainsSpec::Fixed => {
            FadingMode::Redraw(GainsMode::Fixed(shared_gains(spec)))
        }
        FadingSpec::Averaged => FadingMode::Redraw(GainsMode::Redraw),
    })
}

/// Scenario of the spec with `sinr_db` (when given) converted to a reporting
/// energy, and the SINR the run actually sits at.
fn resolved_scenario(spec: &ExperimentSpec, fading: &FadingMode) -> Result<(Scenario, f64)> {
    let base = spec.scenario()?;
    let sum_d = reference_sum_d(&base, fading)?;
    let cfg = &base.config;
    let sigma_e2 = base.sigma_e2()?;
    match spec.sinr_db {
        Some(target) => {
            let rho = rho_for_sinr(target, cfg.num_antennas, sum_d, cfg.num_sus, sigma_e2);
            Ok((base.with_rho(rho), target))
        }
        None => {
            let sinr = sinr_db(base.rho(), cfg.num_antennas, sum_d, cfg.num_sus, sigma_e2);
            Ok((base, sinr))
        }
    }
}

fn plan(spec: &ExperimentSpec, opts: &RunOptions, fading: FadingMode) -> TrialPlan {
    let mut p = TrialPlan::new(spec.trials.unwrap_or(0), spec.seed, spec.rules.clone(), fading);
    p.workers = opts.workers;
    p
}

#[derive(Serialize)]
struct RocRow {
    rule: FusionRule,
    l: usize,
    gamma: f64,
    pf0: f64,
    pd0: f64,
    pf0_halfwidth: f64,
    pd0_halfwidth: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    big_l: usize,
    #[serde(rename = "Z")]
    z: usize,
    seed: u64,
}

#[derive(Serialize)]
struct AucRow {
    rule: FusionRule,
    auc: f64,
    auc_se: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    seed: u64,
}

#[derive(Serialize)]
struct SinrRow {
    rule: FusionRule,
    sinr_db: f64,
    pf0_target: f64,
    pd0: f64,
    halfwidth: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    seed: u64,
}

/// Closed-form threshold checked against simulation.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationRow {
    pub rule: FusionRule,
    pub form: crate::fusion::ThresholdForm,
    pub pf0_target: f64,
    pub gamma_closed: Option<f64>,
    pub pf0: Option<f64>,
    pub pf0_halfwidth: Option<f64>,
    pub pd0: Option<f64>,
    pub pd0_halfwidth: Option<f64>,
    pub gamma_empirical: Option<f64>,
    pub sinr_db: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
}

/// Large-array approximation of one rule.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticRow {
    pub rule: FusionRule,
    pub form: crate::fusion::ThresholdForm,
    pub pf0_target: f64,
    pub gamma_wb: Option<f64>,
    pub mean_h0: f64,
    pub var_h0: f64,
    pub mean_h1: f64,
    pub var_h1: f64,
    pub pd0_approx: Option<f64>,
    pub sinr_db: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn reject_optimum(spec: &ExperimentSpec) -> Result<()> {
    if spec.rules.contains(&FusionRule::Opt) {
        return Err(Error::Unsupported(format!(
            "kind `{}` covers the linear rules only",
            spec.kind.name()
        )));
    }
    Ok(())
}

fn asymptotic_model(spec: &ExperimentSpec, scenario: &Scenario) -> Result<AsymptoticModel> {
    AsymptoticModel::new(
        &scenario.config,
        &shared_gains(spec),
        &scenario.pdp,
        scenario.sigma_e2()?,
        scenario.l,
    )
}

/// Rows of a threshold-calibration experiment.
pub fn calibration_rows(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Vec<CalibrationRow>> {
    reject_optimum(spec)?;
    let target = spec.pf0_target.ok_or_else(|| Error::config("pf0_target is required"))?;
    let fading = fading_mode(spec, &spec.scenario()?, true)?;
    let (scenario, sinr) = resolved_scenario(spec, &fading)?;
    let model = asymptotic_model(spec, &scenario)?;
    let samples = run_trials(&plan(spec, opts, fading), &scenario)?;
    let cfg = &scenario.config;
    let mut rows = Vec::new();
    for (i, &rule) in samples.rules.iter().enumerate() {
        let (h0, h1) = (&samples.h0[i], &samples.h1[i]);
        let closed = match closed_form_threshold(rule, target, &model, &scenario.profile, scenario.l, spec.threshold_form) {
            Ok(t) => Some(t.wb),
            Err(Error::Unsupported(msg)) | Err(Error::Singular(msg)) => {
                log::warn!("{rule}: no closed-form threshold ({msg})");
                None
            }
            Err(e) => return Err(e),
        };
        let rate = |s: &[f64], g: f64| {
            let hits = s.iter().filter(|v| decide_h1(**v, g)).count() as u64;
            (hits as f64 / s.len() as f64, wilson_halfwidth(hits, s.len() as u64))
        };
        let f = closed.map(|g| rate(h0, g));
        let d = closed.map(|g| rate(h1, g));
        rows.push(CalibrationRow {
            rule,
            form: spec.threshold_form,
            pf0_target: target,
            gamma_closed: closed,
            pf0: f.map(|v| v.0),
            pf0_halfwidth: f.map(|v| v.1),
            pd0: d.map(|v| v.0),
            pd0_halfwidth: d.map(|v| v.1),
            gamma_empirical: calibrate_threshold(h0, target).ok(),
            sinr_db: sinr,
            n: cfg.num_antennas,
            k: cfg.num_sus,
            seed: spec.seed,
        });
    }
    Ok(rows)
}

/// Rows of an analytic-table experiment.
pub fn analytic_rows(spec: &ExperimentSpec) -> Result<Vec<AnalyticRow>> {
    reject_optimum(spec)?;
    let target = spec.pf0_target.ok_or_else(|| Error::config("pf0_target is required"))?;
    let fading = FadingMode::Redraw(GainsMode::Fixed(shared_gains(spec)));
    let (scenario, sinr) = resolved_scenario(spec, &fading)?;
    let model = asymptotic_model(spec, &scenario)?;
    let cfg = &scenario.config;
    let mut rows = Vec::new();
    for &rule in &spec.rules {
        let m0 = gm_moments(rule, Hypothesis::H0, &model, &scenario.profile, scenario.l)?;
        let m1 = gm_moments(rule, Hypothesis::H1, &model, &scenario.profile, scenario.l)?;
        let thr = match closed_form_threshold(rule, target, &model, &scenario.profile, scenario.l, spec.threshold_form) {
            Ok(t) => Some(t),
            Err(Error::Unsupported(_)) | Err(Error::Singular(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(AnalyticRow {
            rule,
            form: spec.threshold_form,
            pf0_target: target,
            gamma_wb: thr.map(|t| t.wb),
            mean_h0: m0.mean_wb(),
            var_h0: m0.variance_wb(),
            mean_h1: m1.mean_wb(),
            var_h1: m1.variance_wb(),
            pd0_approx: thr.map(|t| m1.approx_pf(t.raw)),
            sinr_db: sinr,
            n: cfg.num_antennas,
            k: cfg.num_sus,
            seed: spec.seed,
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    kind: &'static str,
    seed: u64,
    sinr_definition: &'static str,
    sinr_db: Option<f64>,
    files: Vec<String>,
    notes: &'a [String],
    spec: &'a ExperimentSpec,
}

/// Runs one experiment and writes its CSV files and `meta.json` into
/// `opts.out_dir`.
pub fn run(spec: &ExperimentSpec, opts: &RunOptions) -> Result<RunReport> {
    spec.validate()?;
    fs::create_dir_all(&opts.out_dir)?;
    let file = |name: &str| opts.out_dir.join(format!("{}{name}", spec.output_prefix));
    let mut files = Vec::new();
    let mut run_sinr = None;
    match spec.kind {
        ExperimentKind::Roc => {
            let fading = fading_mode(spec, &spec.scenario()?, false)?;
            let (scenario, sinr) = resolved_scenario(spec, &fading)?;
            run_sinr = Some(sinr);
            let samples = run_trials(&plan(spec, opts, fading), &scenario)?;
            let cfg = &scenario.config;
            let meta = RocMeta {
                l: scenario.l,
                num_antennas: cfg.num_antennas,
                num_sus: cfg.num_sus,
                num_subcarriers: cfg.num_subcarriers,
                num_taps: cfg.num_taps,
                seed: spec.seed,
            };
            let mut rows = Vec::new();
            let mut aucs = Vec::new();
            for (i, &rule) in samples.rules.iter().enumerate() {
                let (h0, h1) = (&samples.h0[i], &samples.h1[i]);
                let grid = threshold_grid(h0, h1, spec.roc_points, &[]);
                let curve = estimate_roc(rule, meta, h0, h1, &grid)?;
                aucs.push(AucRow { rule, auc: curve.auc, auc_se: curve.auc_se, n: meta.num_antennas, k: meta.num_sus, seed: spec.seed });
                rows.extend(curve.points.iter().map(|p| RocRow {
                    rule,
                    l: meta.l,
                    gamma: p.gamma,
                    pf0: p.pf0,
                    pd0: p.pd0,
                    pf0_halfwidth: p.pf0_halfwidth,
                    pd0_halfwidth: p.pd0_halfwidth,
                    n: meta.num_antennas,
                    k: meta.num_sus,
                    big_l: meta.num_subcarriers,
                    z: meta.num_taps,
                    seed: spec.seed,
                }));
            }
            write_csv(&file("roc.csv"), &rows)?;
            write_csv(&file("auc.csv"), &aucs)?;
            files.extend([file("roc.csv"), file("auc.csv")]);
        }
        ExperimentKind::SinrSweep => {
            let fading = fading_mode(spec, &spec.scenario()?, false)?;
            let scenario = spec.scenario()?;
            let grid = spec.sinr_grid_db.as_deref().unwrap_or_default();
            let target = spec.pf0_target.unwrap_or_default();
            let points = sweep_sinr(&plan(spec, opts, fading), &scenario, grid, target)?;
            let cfg = &scenario.config;
            let rows: Vec<SinrRow> = points
                .iter()
                .map(|p| SinrRow {
                    rule: p.rule,
                    sinr_db: p.sinr_db,
                    pf0_target: p.pf0_target,
                    pd0: p.pd0,
                    halfwidth: p.halfwidth,
                    n: cfg.num_antennas,
                    k: cfg.num_sus,
                    seed: spec.seed,
                })
                .collect();
            write_csv(&file("sinr.csv"), &rows)?;
            files.push(file("sinr.csv"));
        }
        ExperimentKind::ThresholdCalibration => {
            let rows = calibration_rows(spec, opts)?;
            run_sinr = rows.first().map(|r| r.sinr_db);
            write_csv(&file("calibration.csv"), &rows)?;
            files.push(file("calibration.csv"));
        }
        ExperimentKind::AnalyticTable => {
            let rows = analytic_rows(spec)?;
            run_sinr = rows.first().map(|r| r.sinr_db);
            write_csv(&file("analytic.csv"), &rows)?;
            files.push(file("analytic.csv"));
        }
    }
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        kind: spec.kind.name(),
        seed: spec.seed,
        sinr_definition: SINR_DEFINITION,
        sinr_db: run_sinr,
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        notes: &spec.notes,
        spec,
    };
    let meta_path = file("meta.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    files.push(meta_path);
    Ok(RunReport { files })
}

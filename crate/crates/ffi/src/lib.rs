//! C ABI for the `wbfusion` simulator.
//!
//! Every entry point returns a [`WbStatus`]; results come back through out
//! pointers. On failure the message of the last error on the calling thread
//! is available from [`wb_last_error_message`]. Objects are opaque handles
//! released with their `_free` function. Strings returned to the caller are
//! released with [`wb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use num_complex::Complex64;
use wbfusion::channel::{ici_power, isi_power};
use wbfusion::experiment::{preset, run, ExperimentSpec, RunOptions};
use wbfusion::fusion::optimum_llr;
use wbfusion::montecarlo::{auc_mann_whitney, run_trials, FadingMode, GainsMode, Scenario, TrialPlan, TrialSamples};
use nalgebra::{DMatrix, DVector};
use wbfusion::special::q_inv;
use wbfusion::{Error, FusionRule, SensingProfile};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Index = 3,
    Dimension = 4,
    Config = 5,
    Schema = 6,
    Unsupported = 7,
    Capability = 8,
    Numeric = 9,
    DegenerateWeight = 10,
    Singular = 11,
    Precision = 12,
    Io = 13,
    Panic = 14,
}

impl From<&Error> for WbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Index { .. } => WbStatus::Index,
            Error::Dimension(_) => WbStatus::Dimension,
            Error::Config(_) => WbStatus::Config,
            Error::Unsupported(_) => WbStatus::Unsupported,
            Error::Capability(_) => WbStatus::Capability,
            Error::DegenerateWeight(_) => WbStatus::DegenerateWeight,
            Error::Singular(_) => WbStatus::Singular,
            Error::Precision(_) => WbStatus::Precision,
            Error::Numeric { .. } => WbStatus::Numeric,
            Error::Schema { .. } | Error::Json(_) => WbStatus::Schema,
            Error::Io(_) | Error::Csv(_) => WbStatus::Io,
        }
    }
}

/// Hypothesis selector for sample access.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WbHypothesis {
    H0 = 0,
    H1 = 1,
}

/// A validated experiment spec and its scenario.
pub struct WbScenario {
    spec: ExperimentSpec,
    scenario: Scenario,
}

/// Per-rule statistic samples under both hypotheses.
pub struct WbSamples {
    inner: TrialSamples,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Lib(Error),
    Status(WbStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WbStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            let status = WbStatus::from(&e);
            set_error(e.to_string());
            status
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            WbStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(WbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(WbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn parse_rule(name: &str) -> Result<FusionRule, Failure> {
    name.parse::<FusionRule>()
        .map_err(|_| Failure::Status(WbStatus::Config, format!("unknown fusion rule `{name}`")))
}

/// Message of the last failed call on this thread, or null. Release with
/// [`wb_string_free`].
#[no_mangle]
pub extern "C" fn wb_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, released once.
#[no_mangle]
pub unsafe extern "C" fn wb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_q_inv(p: f64, out: *mut f64) -> WbStatus {
    guard(|| {
        if !(p > 0.0 && p < 1.0) {
            return Err(Failure::Status(WbStatus::Config, format!("probability {p} not in (0, 1)")));
        }
        *out_ptr(out)? = q_inv(p);
        Ok(())
    })
}

unsafe fn out_ptr<'a>(p: *mut f64) -> Result<&'a mut f64, Failure> {
    out(p, "out")
}

fn new_scenario(spec: ExperimentSpec) -> Result<Box<WbScenario>, Failure> {
    let scenario = spec.scenario()?;
    Ok(Box::new(WbScenario { spec, scenario }))
}

/// Builds a scenario from experiment-spec JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_scenario_from_json(json: *const c_char, out_handle: *mut *mut WbScenario) -> WbStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let slot = out(out_handle, "out")?;
        *slot = Box::into_raw(new_scenario(ExperimentSpec::from_json(text)?)?);
        Ok(())
    })
}

/// Builds the scenario of a built-in preset.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out_handle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_scenario_from_preset(name: *const c_char, out_handle: *mut *mut WbScenario) -> WbStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let slot = out(out_handle, "out")?;
        *slot = Box::into_raw(new_scenario(preset(name)?)?);
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library, released once.
#[no_mangle]
pub unsafe extern "C" fn wb_scenario_free(s: *mut WbScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Antennas, SUs, subcarriers and taps of a scenario.
///
/// # Safety
/// `s` must be a live handle; the out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_scenario_dims(
    s: *const WbScenario,
    n: *mut usize,
    k: *mut usize,
    l: *mut usize,
    z: *mut usize,
) -> WbStatus {
    guard(|| {
        let c = &handle(s, "scenario")?.scenario.config;
        *out(n, "n")? = c.num_antennas;
        *out(k, "k")? = c.num_sus;
        *out(l, "l")? = c.num_subcarriers;
        *out(z, "z")? = c.num_taps;
        Ok(())
    })
}

/// Effective noise power `sigma_e^2` of the scenario's active subcarrier.
///
/// # Safety
/// `s` must be a live handle and `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_scenario_sigma_e2(s: *const WbScenario, out_value: *mut f64) -> WbStatus {
    guard(|| {
        *out_ptr(out_value)? = handle(s, "scenario")?.scenario.sigma_e2()?;
        Ok(())
    })
}

/// ISI power of subcarrier `l`.
///
/// # Safety
/// `s` must be a live handle and `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_isi_power(s: *const WbScenario, l: usize, out_value: *mut f64) -> WbStatus {
    guard(|| {
        let sc = &handle(s, "scenario")?.scenario;
        sc.config.check_subcarrier(l)?;
        *out_ptr(out_value)? = isi_power(&sc.pdp, l);
        Ok(())
    })
}

/// ICI power of subcarrier `l`.
///
/// # Safety
/// `s` must be a live handle and `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_ici_power(s: *const WbScenario, l: usize, out_value: *mut f64) -> WbStatus {
    guard(|| {
        let sc = &handle(s, "scenario")?.scenario;
        sc.config.check_subcarrier(l)?;
        *out_ptr(out_value)? = ici_power(&sc.pdp, l);
        Ok(())
    })
}

/// Optimum fusion LLR for homogeneous local probabilities.
///
/// `y` holds `n` complex values and `g` an `n x k` row-major matrix, both as
/// interleaved (re, im) pairs.
///
/// # Safety
/// `y` must point to `2n` doubles, `g` to `2nk` doubles and `out_value` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_optimum_llr(
    y: *const f64,
    g: *const f64,
    n: usize,
    k: usize,
    rho: f64,
    sigma_e2: f64,
    pd: f64,
    pf: f64,
    out_value: *mut f64,
) -> WbStatus {
    guard(|| {
        if y.is_null() || g.is_null() {
            return Err(null("input array"));
        }
        let ys = std::slice::from_raw_parts(y, 2 * n);
        let gs = std::slice::from_raw_parts(g, 2 * n * k);
        let yv = DVector::from_fn(n, |i, _| Complex64::new(ys[2 * i], ys[2 * i + 1]));
        let gm = DMatrix::from_fn(n, k, |r, c| {
            let i = 2 * (r * k + c);
            Complex64::new(gs[i], gs[i + 1])
        });
        let profile = SensingProfile::homogeneous(k, 1, pd, pf)?;
        *out_ptr(out_value)? = optimum_llr(&yv, &gm, rho, sigma_e2, &profile, 0)?;
        Ok(())
    })
}

/// Runs `trials` paired trials of the comma-separated `rules` on the
/// scenario with per-trial fading and large-scale gains. `workers = 0` uses
/// all cores.
///
/// # Safety
/// `s` must be a live handle, `rules` a NUL-terminated string and `out_handle`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_run_trials(
    s: *const WbScenario,
    rules: *const c_char,
    trials: u64,
    seed: u64,
    workers: usize,
    out_handle: *mut *mut WbSamples,
) -> WbStatus {
    guard(|| {
        let sc = handle(s, "scenario")?;
        let rules = str_arg(rules, "rules")?
            .split(',')
            .map(|r| parse_rule(r.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        let slot = out(out_handle, "out")?;
        let mut plan = TrialPlan::new(trials, seed, rules, FadingMode::Redraw(GainsMode::Redraw));
        plan.workers = (workers > 0).then_some(workers);
        let inner = run_trials(&plan, &sc.scenario)?;
        *slot = Box::into_raw(Box::new(WbSamples { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library, released once.
#[no_mangle]
pub unsafe extern "C" fn wb_samples_free(p: *mut WbSamples) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of trials held by `p`.
///
/// # Safety
/// `p` must be a live handle and `out_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_samples_len(p: *const WbSamples, out_len: *mut usize) -> WbStatus {
    guard(|| {
        *out(out_len, "out")? = handle(p, "samples")?.inner.num_trials();
        Ok(())
    })
}

fn rule_samples<'a>(p: &'a WbSamples, rule: &str) -> Result<(&'a [f64], &'a [f64]), Failure> {
    let r = parse_rule(rule)?;
    p.inner
        .get(r)
        .ok_or_else(|| Failure::Status(WbStatus::Config, format!("rule `{rule}` was not simulated")))
}

/// Copies the samples of one rule and hypothesis into `buf`, which must hold
/// at least [`wb_samples_len`] values.
///
/// # Safety
/// `p` must be a live handle, `rule` a NUL-terminated string and `buf` valid
/// for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn wb_samples_copy(
    p: *const WbSamples,
    rule: *const c_char,
    hypothesis: WbHypothesis,
    buf: *mut f64,
    buf_len: usize,
) -> WbStatus {
    guard(|| {
        let (h0, h1) = rule_samples(handle(p, "samples")?, str_arg(rule, "rule")?)?;
        let src = if hypothesis == WbHypothesis::H0 { h0 } else { h1 };
        if buf.is_null() {
            return Err(null("buf"));
        }
        if buf_len < src.len() {
            return Err(Failure::Lib(Error::Index { what: "buffer length", index: buf_len, limit: src.len() }));
        }
        std::slice::from_raw_parts_mut(buf, src.len()).copy_from_slice(src);
        Ok(())
    })
}

/// Area under the empirical ROC of one rule and its standard error.
///
/// # Safety
/// `p` must be a live handle, `rule` a NUL-terminated string and the out
/// pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wb_samples_auc(
    p: *const WbSamples,
    rule: *const c_char,
    auc: *mut f64,
    auc_se: *mut f64,
) -> WbStatus {
    guard(|| {
        let (h0, h1) = rule_samples(handle(p, "samples")?, str_arg(rule, "rule")?)?;
        let (a, se) = auc_mann_whitney(h0, h1);
        *out(auc, "auc")? = a;
        *out(auc_se, "auc_se")? = se;
        Ok(())
    })
}

/// Runs the scenario's experiment and writes its CSV files into `out_dir`.
/// `workers = 0` uses all cores.
///
/// # Safety
/// `s` must be a live handle and `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wb_run_experiment(s: *const WbScenario, out_dir: *const c_char, workers: usize) -> WbStatus {
    guard(|| {
        let sc = handle(s, "scenario")?;
        let opts = RunOptions {
            out_dir: PathBuf::from(str_arg(out_dir, "out_dir")?),
            workers: (workers > 0).then_some(workers),
        };
        run(&sc.spec, &opts)?;
        Ok(())
    })
}

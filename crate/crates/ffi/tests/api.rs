use std::ffi::{CStr, CString};
use std::ptr;

use wbfusion::channel::{ici_power, isi_power};
use wbfusion::experiment::preset;
use wbfusion_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = wb_last_error_message();
    assert!(!p.is_null());
    let msg = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { wb_string_free(p) };
    msg
}

fn scenario(name: &str) -> *mut WbScenario {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { wb_scenario_from_preset(c(name).as_ptr(), &mut s) }, WbStatus::Ok);
    s
}

#[test]
fn q_inv_and_range_errors() {
    let mut v = 0.0;
    assert_eq!(unsafe { wb_q_inv(0.05, &mut v) }, WbStatus::Ok);
    assert!((v - 1.6448536269514722).abs() < 1e-9);
    assert_eq!(unsafe { wb_q_inv(1.5, &mut v) }, WbStatus::Config);
    assert!(last_error().contains("1.5"));
    assert_eq!(unsafe { wb_q_inv(0.5, ptr::null_mut()) }, WbStatus::NullPointer);
}

#[test]
fn preset_handle_matches_library() {
    let s = scenario("fig2a");
    let (mut n, mut k, mut l, mut z) = (0, 0, 0, 0);
    assert_eq!(unsafe { wb_scenario_dims(s, &mut n, &mut k, &mut l, &mut z) }, WbStatus::Ok);
    let spec = preset("fig2a").unwrap();
    let sc = spec.scenario().unwrap();
    assert_eq!((n, k, l, z), (sc.config.num_antennas, sc.config.num_sus, sc.config.num_subcarriers, sc.config.num_taps));

    let (mut isi, mut ici, mut se2) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(wb_isi_power(s, 3, &mut isi), WbStatus::Ok);
        assert_eq!(wb_ici_power(s, 3, &mut ici), WbStatus::Ok);
        assert_eq!(wb_scenario_sigma_e2(s, &mut se2), WbStatus::Ok);
        assert_eq!(wb_isi_power(s, l, &mut 0.0), WbStatus::Index);
    }
    assert_eq!(isi, isi_power(&sc.pdp, 3));
    assert_eq!(ici, ici_power(&sc.pdp, 3));
    assert_eq!(se2, sc.sigma_e2().unwrap());
    unsafe { wb_scenario_free(s) };
}

#[test]
fn bad_inputs_report_status_and_message() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { wb_scenario_from_preset(c("fig99").as_ptr(), &mut s) }, WbStatus::Config);
    assert!(s.is_null());
    assert!(last_error().contains("fig99"));

    let json = c(r#"{"kind": "roc", "seed": 1, "trials": 10,
        "network": {"num_sus": 2, "num_subcarriers": 2},
        "sensing": {"pd": 0.5, "pf": 0.05}, "pdp": {"shape": "uniform"}}"#);
    assert_eq!(unsafe { wb_scenario_from_json(json.as_ptr(), &mut s) }, WbStatus::Schema);
    assert!(last_error().contains("num_antennas"));

    assert_eq!(unsafe { wb_scenario_from_json(ptr::null(), &mut s) }, WbStatus::NullPointer);
    let bad_utf8 = [0xffu8, 0];
    assert_eq!(unsafe { wb_scenario_from_json(bad_utf8.as_ptr().cast(), &mut s) }, WbStatus::InvalidUtf8);
    unsafe {
        wb_scenario_free(ptr::null_mut());
        wb_samples_free(ptr::null_mut());
        wb_string_free(ptr::null_mut());
    }
}

#[test]
fn trials_through_handles() {
    let s = scenario("fig1a");
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { wb_run_trials(s, c("mrc, wl0").as_ptr(), 300, 5, 2, &mut p) }, WbStatus::Ok);
    let mut len = 0;
    assert_eq!(unsafe { wb_samples_len(p, &mut len) }, WbStatus::Ok);
    assert_eq!(len, 300);

    let mut h0 = vec![0.0; len];
    let mut h1 = vec![0.0; len];
    unsafe {
        assert_eq!(wb_samples_copy(p, c("wl0").as_ptr(), WbHypothesis::H0, h0.as_mut_ptr(), len), WbStatus::Ok);
        assert_eq!(wb_samples_copy(p, c("wl0").as_ptr(), WbHypothesis::H1, h1.as_mut_ptr(), len), WbStatus::Ok);
        assert_eq!(wb_samples_copy(p, c("wl0").as_ptr(), WbHypothesis::H1, h1.as_mut_ptr(), len - 1), WbStatus::Index);
        assert_eq!(wb_samples_copy(p, c("trmrc").as_ptr(), WbHypothesis::H1, h1.as_mut_ptr(), len), WbStatus::Config);
    }
    assert!(h0.iter().chain(&h1).all(|v| v.is_finite()));
    assert_ne!(h0, h1);

    let (mut auc, mut se) = (0.0, 0.0);
    assert_eq!(unsafe { wb_samples_auc(p, c("mrc").as_ptr(), &mut auc, &mut se) }, WbStatus::Ok);
    assert!((0.0..=1.0).contains(&auc) && se > 0.0);

    let mut q = ptr::null_mut();
    assert_eq!(unsafe { wb_run_trials(s, c("mrc,bogus").as_ptr(), 10, 5, 1, &mut q) }, WbStatus::Config);
    assert!(last_error().contains("bogus"));
    unsafe {
        wb_samples_free(p);
        wb_scenario_free(s);
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let s = scenario("fig9");
    let draw = |workers| {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { wb_run_trials(s, c("trmmrc").as_ptr(), 200, 42, workers, &mut p) }, WbStatus::Ok);
        let mut v = vec![0.0; 200];
        unsafe {
            wb_samples_copy(p, c("trmmrc").as_ptr(), WbHypothesis::H1, v.as_mut_ptr(), 200);
            wb_samples_free(p);
        }
        v
    };
    assert_eq!(draw(1), draw(4));
    unsafe { wb_scenario_free(s) };
}

#[test]
fn optimum_llr_single_user() {
    // One SU, one antenna, unit gain: closed form over x in {-1, +1}.
    let (rho, s2, pd, pf) = (1.0, 0.5, 0.8, 0.1);
    let y = [0.3, -0.2];
    let g = [1.0, 0.0];
    let mut got = 0.0;
    assert_eq!(
        unsafe { wb_optimum_llr(y.as_ptr(), g.as_ptr(), 1, 1, rho, s2, pd, pf, &mut got) },
        WbStatus::Ok
    );
    let lik = |x: f64| (-((y[0] - x).powi(2) + y[1].powi(2)) / s2).exp();
    let want = ((pd * lik(1.0) + (1.0 - pd) * lik(-1.0)) / (pf * lik(1.0) + (1.0 - pf) * lik(-1.0))).ln();
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    assert_eq!(
        unsafe { wb_optimum_llr(ptr::null(), g.as_ptr(), 1, 1, rho, s2, pd, pf, &mut got) },
        WbStatus::NullPointer
    );
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = c(r#"{"kind": "roc", "seed": 3, "trials": 200, "rules": ["mrc"], "roc_points": 20,
        "network": {"num_antennas": 8, "num_sus": 2, "num_subcarriers": 4},
        "sensing": {"pd": 0.6, "pf": 0.05}, "pdp": {"shape": "uniform"}}"#);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { wb_scenario_from_json(json.as_ptr(), &mut s) }, WbStatus::Ok);
    let out = c(dir.path().to_str().unwrap());
    assert_eq!(unsafe { wb_run_experiment(s, out.as_ptr(), 1) }, WbStatus::Ok);
    assert!(dir.path().join("roc.csv").exists());
    unsafe { wb_scenario_free(s) };
}

#[test]
fn version_matches_manifest() {
    let v = unsafe { CStr::from_ptr(wb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

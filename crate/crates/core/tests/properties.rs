use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wbfusion::analytic::GmApprox;
use wbfusion::channel::{
    complex_normal, effective_noise_power, ici_power, isi_power, InterferencePowers, PowerDelayProfile,
};
use wbfusion::fusion::{linear_statistic, optimum_llr, wl_weight, CombinerWeight};
use wbfusion::sensing::{decision_mean_cov, DecisionVector};
use wbfusion::{FusionRule, Hypothesis, NetworkConfig, SensingProfile};

fn normalized(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

fn pdp_strategy() -> impl Strategy<Value = PowerDelayProfile> {
    (1usize..4, 1usize..6, 1usize..6).prop_flat_map(|(k, l, z)| {
        prop::collection::vec(prop::collection::vec(prop::collection::vec(0.01f64..1.0, z), l), k)
            .prop_map(|b| {
                let beta = b.into_iter().map(|per_l| per_l.into_iter().map(normalized).collect()).collect();
                PowerDelayProfile::new(beta).unwrap()
            })
    })
}

fn isi_oracle(pdp: &PowerDelayProfile, l: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..pdp.num_sus() {
        let mut tau = 0.0;
        for z in 0..pdp.num_taps() {
            tau += z as f64 * pdp.beta(k, l)[z];
        }
        total += tau * tau;
    }
    total
}

fn ici_oracle(pdp: &PowerDelayProfile, l: usize) -> f64 {
    let big_l = pdp.num_subcarriers();
    let mut total = 0.0;
    for k in 0..pdp.num_sus() {
        for p in 0..big_l {
            if p == l {
                continue;
            }
            let d = ((l + big_l - p) % big_l) as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for z in 0..pdp.num_taps() {
                let angle = -2.0 * std::f64::consts::PI * z as f64 * d / big_l as f64;
                acc += Complex64::from_polar(pdp.beta(k, p)[z], angle);
            }
            total += acc.norm_sqr();
        }
    }
    total
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pdp_reversal_is_an_involution(pdp in pdp_strategy()) {
        let rev = pdp.time_reverse();
        prop_assert_eq!(rev.time_reverse(), pdp.clone());
        for k in 0..pdp.num_sus() {
            for l in 0..pdp.num_subcarriers() {
                prop_assert!((rev.beta(k, l).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn interference_matches_brute_force(pdp in pdp_strategy()) {
        for l in 0..pdp.num_subcarriers() {
            prop_assert!(rel(isi_power(&pdp, l), isi_oracle(&pdp, l)) < 1e-12 || isi_oracle(&pdp, l) == 0.0);
            let (got, want) = (ici_power(&pdp, l), ici_oracle(&pdp, l));
            prop_assert!(rel(got, want) < 1e-12 || want < 1e-300, "{} vs {}", got, want);
        }
    }

    #[test]
    fn effective_noise_dominates_thermal(pdp in pdp_strategy(), sigma_w2 in 1e-3f64..10.0) {
        let mut cfg = NetworkConfig::new(4, pdp.num_sus(), pdp.num_subcarriers()).unwrap();
        cfg.num_taps = pdp.num_taps();
        cfg.noise_power = vec![sigma_w2; pdp.num_subcarriers()];
        let powers = InterferencePowers::for_config(&cfg, &pdp).unwrap();
        for l in 0..pdp.num_subcarriers() {
            prop_assert!(effective_noise_power(&cfg, &powers, l) >= sigma_w2);
        }
    }

    #[test]
    fn llr_matches_direct_distances(seed in any::<u64>(), k in 1usize..5, n in 1usize..6, rho in 0.05f64..4.0, s2 in 0.1f64..4.0, pd in 0.05f64..0.95, pf in 0.01f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, k, |_, _| complex_normal(&mut rng, 1.0));
        let y = DVector::from_fn(n, |_, _| complex_normal(&mut rng, 2.0));
        let profile = SensingProfile::homogeneous(k, 1, pd, pf).unwrap();
        let mut log_terms = [Vec::new(), Vec::new()];
        for bits in 0..1u64 << k {
            let x = DecisionVector::from_bits(bits, k);
            let xs = DVector::from_iterator(k, x.as_slice().iter().map(|v| Complex64::new(*v * rho.sqrt(), 0.0)));
            let dist = (&y - &g * xs).norm_squared();
            for (h, p) in [pf, pd].iter().enumerate() {
                let lp: f64 = x.as_slice().iter().map(|v| if *v > 0.0 { p.ln() } else { (1.0 - p).ln() }).sum();
                log_terms[h].push(-dist / s2 + lp);
            }
        }
        let lse = |v: &[f64]| {
            let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
        };
        let direct = lse(&log_terms[1]) - lse(&log_terms[0]);
        let got = optimum_llr(&y, &g, rho, s2, &profile, 0).unwrap();
        prop_assert!((got - direct).abs() <= 1e-9 * direct.abs().max(1.0), "{} vs {}", got, direct);
    }

    #[test]
    fn joint_scaling_leaves_decisions_unchanged(seed in any::<u64>(), c in 0.01f64..100.0, gamma in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, k) = (6, 3);
        let g = DMatrix::from_fn(n, k, |_, _| complex_normal(&mut rng, 1.0));
        let y = DVector::from_fn(n, |_, _| complex_normal(&mut rng, 1.0));
        let (rho, s2) = (0.7, 1.3);
        let profile = SensingProfile::homogeneous(k, 1, 0.6, 0.1).unwrap();
        let m = decision_mean_cov(&profile, 0, Hypothesis::H0).unwrap();
        let cy = &y * Complex64::new(c, 0.0);
        let mrc = CombinerWeight::new(FusionRule::Mrc, &g * DVector::from_element(k, Complex64::new(1.0, 0.0))).unwrap();
        let wl = wl_weight(FusionRule::Wl0, &g, rho, s2, &m.cov_diag, &m.mu).unwrap();
        let wl_scaled = wl_weight(FusionRule::Wl0, &g, rho * c * c, s2 * c * c, &m.cov_diag, &m.mu).unwrap();
        for (w, ws) in [(&mrc, &mrc), (&wl, &wl_scaled)] {
            let a = linear_statistic(w, &y, s2.sqrt()).unwrap().gamma_wb;
            let b = linear_statistic(ws, &cy, c * s2.sqrt()).unwrap().gamma_wb;
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            if (a - gamma).abs() > 1e-6 {
                prop_assert_eq!(a >= gamma, b >= gamma);
            }
        }
    }

    #[test]
    fn wl_augmented_statistic_is_real(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, k) = (8, 4);
        let g = DMatrix::from_fn(n, k, |_, _| complex_normal(&mut rng, 1.0));
        let y = DVector::from_fn(n, |_, _| complex_normal(&mut rng, 3.0));
        let profile = SensingProfile::homogeneous(k, 1, 0.7, 0.2).unwrap();
        let m = decision_mean_cov(&profile, 0, Hypothesis::H1).unwrap();
        let w = wl_weight(FusionRule::Wl1, &g, 0.5, 1.0, &m.cov_diag, &m.mu).unwrap();
        let ya = DVector::from_iterator(2 * n, y.iter().cloned().chain(y.iter().map(|v| v.conj())));
        let v = w.augmented().dotc(&ya);
        prop_assert!(v.im.abs() < 1e-10);
        prop_assert!((v.re - linear_statistic(&w, &y, 1.0).unwrap().raw).abs() < 1e-10 * v.re.abs().max(1.0));
    }

    #[test]
    fn approx_pf_decreases_in_threshold(mean in -5.0f64..5.0, var in 0.01f64..10.0, g1 in -10.0f64..10.0, step in 1e-3f64..5.0) {
        let gm = GmApprox { mean, variance: var, wb_scale: 1.0 };
        prop_assert!(gm.approx_pf(g1 + step) <= gm.approx_pf(g1));
    }
}

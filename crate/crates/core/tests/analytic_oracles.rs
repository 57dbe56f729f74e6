use wbfusion::analytic::{gm_moments, rho_for_sinr, AsymptoticModel};
use wbfusion::channel::{diagonals, draw_large_scale, PdpShape, PowerDelayProfile};
use wbfusion::montecarlo::{run_trials, substream, FadingMode, GainsMode, Purpose, Scenario, TrialPlan, SHARED_TRIAL};
use wbfusion::{FusionRule, Hypothesis, NetworkConfig, SensingProfile};

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

#[test]
fn h0_variance_matches_moment_approximation() {
    let (n, k, l) = (256, 8, 8);
    let cfg = NetworkConfig::new(n, k, l).unwrap();
    let pdp = PowerDelayProfile::from_shape(&PdpShape::Exponential { decay: 2.0 }, k, l, k).unwrap();
    let profile = SensingProfile::homogeneous(k, l, 0.5, 0.01).unwrap();
    let gains = draw_large_scale(&cfg, &mut substream(11, SHARED_TRIAL, Purpose::Gains));
    let sc = Scenario::new(cfg.clone(), profile.clone(), pdp.clone(), 0).unwrap();
    let sigma_e2 = sc.sigma_e2().unwrap();
    let sum_d: f64 = diagonals(&cfg, &gains, &pdp, 0).unwrap().0.iter().sum();
    let sc = sc.with_rho(rho_for_sinr(-10.0, n, sum_d, k, sigma_e2));
    let model = AsymptoticModel::new(&sc.config, &gains, &pdp, sigma_e2, 0).unwrap();

    let rules = FusionRule::LINEAR.to_vec();
    let plan = TrialPlan::new(20_000, 11, rules.clone(), FadingMode::Redraw(GainsMode::Fixed(gains)));
    let samples = run_trials(&plan, &sc).unwrap();
    for rule in rules {
        let gm = gm_moments(rule, Hypothesis::H0, &model, &profile, 0).unwrap();
        let (h0, _) = samples.get(rule).unwrap();
        let (_, var) = mean_var(h0);
        let err = (var - gm.variance_wb()).abs() / gm.variance_wb();
        assert!(err < 0.10, "{rule}: empirical {var}, approximation {}", gm.variance_wb());
    }
}

use super::spec::{ExperimentKind, ExperimentSpec, FadingSpec, GainsSpec, ProbSpec, SensingSpec};
use crate::channel::PdpShape;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::fusion::{FusionRule, ThresholdForm};

/// Subcarriers used by every preset.
pub const PRESET_SUBCARRIERS: usize = 8;
/// Decay of the shared exponential delay profile of every preset.
pub const PRESET_PDP_DECAY: f64 = 2.0;
pub const PRESET_SEED: u64 = 20240601;
pub const PRESET_ROC_TRIALS: u64 = 20_000;
pub const PRESET_SWEEP_TRIALS: u64 = 20_000;

/// The rules drawn in the ROC and sweep figures.
pub const PRESET_RULES: [FusionRule; 6] = [
    FusionRule::Mrc,
    FusionRule::Mmrc,
    FusionRule::TrMrc,
    FusionRule::TrMmrc,
    FusionRule::Wl0,
    FusionRule::TrWl0,
];

struct Row {
    name: &'static str,
    kind: ExperimentKind,
    n: usize,
    k: usize,
    shadow_mean_db: f64,
    pathloss: f64,
    summary: &'static str,
}

const fn roc(name: &'static str, n: usize, k: usize, mu: f64, pl: f64, summary: &'static str) -> Row {
    Row { name, kind: ExperimentKind::Roc, n, k, shadow_mean_db: mu, pathloss: pl, summary }
}

const fn sweep(name: &'static str, n: usize, k: usize, mu: f64, pl: f64, summary: &'static str) -> Row {
    Row { name, kind: ExperimentKind::SinrSweep, n, k, shadow_mean_db: mu, pathloss: pl, summary }
}

const ROWS: [Row; 14] = [
    roc("fig1a", 8, 8, 4.0, 2.0, "ROC, moderate array"),
    roc("fig1b", 32, 8, 4.0, 2.0, "ROC, large array"),
    roc("fig2a", 64, 2, 4.0, 2.0, "ROC, few SUs"),
    roc("fig2b", 64, 10, 4.0, 2.0, "ROC, more SUs"),
    roc("fig3a", 32, 8, 2.0, 2.0, "ROC, indoor shadowing"),
    roc("fig3b", 32, 8, 6.0, 2.0, "ROC, indoor-to-outdoor shadowing"),
    roc("fig4a", 64, 8, 4.0, 5.0, "ROC, high path loss"),
    roc("fig4b", 64, 8, 4.0, 1.0, "ROC, tunnel-like path loss"),
    sweep("fig9", 32, 8, 4.0, 2.0, "P_D0 vs SINR"),
    sweep("fig10", 64, 8, 4.0, 2.0, "P_D0 vs SINR, larger array"),
    sweep("fig11-n1", 64, 8, 4.0, 1.0, "P_D0 vs SINR, tunnel-like path loss"),
    sweep("fig11-n5", 64, 8, 4.0, 5.0, "P_D0 vs SINR, high path loss"),
    sweep("fig12-mu2", 64, 8, 2.0, 2.0, "P_D0 vs SINR, indoor shadowing"),
    sweep("fig12-mu6", 64, 8, 6.0, 2.0, "P_D0 vs SINR, indoor-to-outdoor shadowing"),
];

/// Names of the built-in scenarios, in listing order.
pub fn preset_names() -> Vec<&'static str> {
    ROWS.iter().map(|r| r.name).collect()
}

pub fn sweep_grid_db() -> Vec<f64> {
    (0..=12).map(|i| -20.0 + 2.5 * i as f64).collect()
}

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let row = ROWS.iter().find(|r| r.name == name).ok_or_else(|| {
        Error::Config(format!("unknown preset `{name}`; available: {}", preset_names().join(", ")))
    })?;
    let mut network = NetworkConfig::new(row.n, row.k, PRESET_SUBCARRIERS)?;
    network.shadow_mean_db = row.shadow_mean_db;
    network.pathloss_exponent = row.pathloss;
    network.validate()?;
    let (pd, pf) = match row.kind {
        ExperimentKind::SinrSweep => (0.5, 0.05),
        _ => (0.5, 0.01),
    };
    let mut notes = vec![
        format!("L = {PRESET_SUBCARRIERS} subcarriers, statistics taken on subcarrier 0"),
        format!("shared exponential delay profile, decay {PRESET_PDP_DECAY}, Z = K taps"),
        format!("local (P_D, P_F) = ({pd}, {pf}) for every SU"),
        "WL statistics use the H0 decision covariance".into(),
    ];
    let is_sweep = row.kind == ExperimentKind::SinrSweep;
    if is_sweep {
        notes.push("P_F0 <= 0.01 calibrated on H0 samples at every SINR".into());
    }
    Ok(ExperimentSpec {
        name: Some(row.name.into()),
        kind: row.kind,
        seed: PRESET_SEED,
        network,
        sensing: SensingSpec { pd: ProbSpec::Common(pd), pf: ProbSpec::Common(pf) },
        pdp: PdpShape::Exponential { decay: PRESET_PDP_DECAY },
        subcarrier: 0,
        rules: PRESET_RULES.to_vec(),
        output_prefix: String::new(),
        trials: Some(if is_sweep { PRESET_SWEEP_TRIALS } else { PRESET_ROC_TRIALS }),
        fading: FadingSpec::Averaged,
        gains: GainsSpec::Redraw,
        roc_points: 200,
        sinr_db: None,
        sinr_grid_db: is_sweep.then(sweep_grid_db),
        pf0_target: is_sweep.then_some(0.01),
        threshold_form: ThresholdForm::Consistent,
        notes,
    })
}

/// One line per preset: name, kind and resolved parameters.
pub fn list_presets() -> String {
    let mut out = String::new();
    for r in &ROWS {
        let spec = preset(r.name).expect("built-in presets are valid");
        let s = &spec.sensing;
        let (pd, pf) = match (&s.pd, &s.pf) {
            (ProbSpec::Common(d), ProbSpec::Common(f)) => (*d, *f),
            _ => unreachable!(),
        };
        out.push_str(&format!(
            "{:<10} {:<11} N={:<3} K={:<2} L={} Z={:<2} mu={}dB sigma={}dB n={} P=({pd},{pf}) trials={}  {}\n",
            r.name,
            r.kind.name(),
            r.n,
            r.k,
            PRESET_SUBCARRIERS,
            spec.network.num_taps,
            r.shadow_mean_db,
            spec.network.shadow_std_db,
            r.pathloss,
            spec.trials.unwrap_or(0),
            r.summary,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_round_trips() {
        for name in preset_names() {
            let spec = preset(name).unwrap();
            spec.validate().unwrap();
            assert_eq!(ExperimentSpec::from_json(&spec.to_json()).unwrap(), spec, "{name}");
        }
    }

    #[test]
    fn listing_contains_sweeps() {
        let text = list_presets();
        let line = |n: &str| text.lines().find(|l| l.starts_with(&format!("{n} "))).unwrap().to_string();
        assert!(line("fig9").contains("N=32 ") && line("fig9").contains("K=8 "));
        assert!(line("fig10").contains("N=64 ") && line("fig10").contains("K=8 "));
        assert_eq!(text, list_presets());
        assert!(preset("fig99").is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::channel::{PdpShape, PowerDelayProfile};
use crate::config::{parse_json, NetworkConfig};
use crate::error::{Error, Result};
use crate::fusion::{FusionRule, ThresholdForm};
use crate::montecarlo::Scenario;
use crate::sensing::SensingProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Roc,
    SinrSweep,
    ThresholdCalibration,
    AnalyticTable,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Roc => "roc",
            ExperimentKind::SinrSweep => "sinr-sweep",
            ExperimentKind::ThresholdCalibration => "threshold-calibration",
            ExperimentKind::AnalyticTable => "analytic-table",
        }
    }
}

/// A local probability given once for all SUs and subcarriers or as a
/// `K x L` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbSpec {
    Common(f64),
    Matrix(Vec<Vec<f64>>),
}

impl ProbSpec {
    fn resolve(&self, k: usize, l: usize) -> Vec<Vec<f64>> {
        match self {
            ProbSpec::Common(p) => vec![vec![*p; l]; k],
            ProbSpec::Matrix(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingSpec {
    pub pd: ProbSpec,
    pub pf: ProbSpec,
}

/// Whether each trial draws a new fading channel or all trials share one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingSpec {
    #[default]
    Averaged,
    Instantaneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainsSpec {
    #[default]
    Redraw,
    Fixed,
}

fn default_rules() -> Vec<FusionRule> {
    FusionRule::LINEAR.to_vec()
}

fn default_roc_points() -> usize {
    200
}

/// One experiment read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub network: NetworkConfig,
    pub sensing: SensingSpec,
    pub pdp: PdpShape,
    #[serde(default)]
    pub subcarrier: usize,
    #[serde(default = "default_rules")]
    pub rules: Vec<FusionRule>,
    /// Prepended to every output file name.
    #[serde(default)]
    pub output_prefix: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default)]
    pub fading: FadingSpec,
    #[serde(default)]
    pub gains: GainsSpec,
    #[serde(default = "default_roc_points")]
    pub roc_points: usize,
    /// Channel SINR of the run; overrides the reporting energy of the
    /// active subcarrier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinr_grid_db: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pf0_target: Option<f64>,
    #[serde(default)]
    pub threshold_form: ThresholdForm,
    /// Modelling choices carried into the provenance record.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn missing(field: &str, kind: ExperimentKind) -> Error {
    Error::Schema {
        path: field.to_string(),
        message: format!("required for kind `{}`", kind.name()),
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = parse_json(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs always serialize")
    }

    /// Checks the kind-specific fields.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        if self.rules.is_empty() {
            return Err(Error::Schema {
                path: "rules".into(),
                message: "at least one rule is required".into(),
            });
        }
        if kind != ExperimentKind::AnalyticTable && self.trials.is_none() {
            return Err(missing("trials", kind));
        }
        if self.trials == Some(0) {
            return Err(Error::Schema {
                path: "trials".into(),
                message: "must be >= 1".into(),
            });
        }
        match kind {
            ExperimentKind::Roc => {}
            ExperimentKind::SinrSweep => {
                if self.sinr_grid_db.is_none() {
                    return Err(missing("sinr_grid_db", kind));
                }
                if self.pf0_target.is_none() {
                    return Err(missing("pf0_target", kind));
                }
            }
            ExperimentKind::ThresholdCalibration | ExperimentKind::AnalyticTable => {
                if self.pf0_target.is_none() {
                    return Err(missing("pf0_target", kind));
                }
            }
        }
        if self.output_prefix.contains(['/', '\\']) {
            return Err(Error::Schema {
                path: "output_prefix".into(),
                message: "must be a file-name prefix, not a path".into(),
            });
        }
        self.scenario().map(|_| ())
    }

    pub fn profile(&self) -> Result<SensingProfile> {
        let (k, l) = (self.network.num_sus, self.network.num_subcarriers);
        SensingProfile::new(self.sensing.pd.resolve(k, l), self.sensing.pf.resolve(k, l))
    }

    pub fn delay_profile(&self) -> Result<PowerDelayProfile> {
        let n = &self.network;
        PowerDelayProfile::from_shape(&self.pdp, n.num_sus, n.num_subcarriers, n.num_taps)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.network.clone(), self.profile()?, self.delay_profile()?, self.subcarrier)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "kind": "roc", "seed": 1, "trials": 10,
        "network": {"num_antennas": 4, "num_sus": 2, "num_subcarriers": 2},
        "sensing": {"pd": 0.5, "pf": 0.05},
        "pdp": {"shape": "uniform"}
    }"#;

    #[test]
    fn defaults_and_round_trip() {
        let spec = ExperimentSpec::from_json(MINIMAL).unwrap();
        assert_eq!(spec.rules.len(), 8);
        assert_eq!(spec.fading, FadingSpec::Averaged);
        let again = ExperimentSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn missing_antennas_names_field() {
        let text = MINIMAL.replace(r#""num_antennas": 4, "#, "");
        match ExperimentSpec::from_json(&text).unwrap_err() {
            Error::Schema { path, message } => {
                assert_eq!(path, "network");
                assert!(message.contains("num_antennas"), "{message}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn seed_is_mandatory() {
        let text = MINIMAL.replace(r#""seed": 1, "#, "");
        let err = ExperimentSpec::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn kind_specific_fields() {
        let text = MINIMAL.replace(r#""kind": "roc""#, r#""kind": "sinr-sweep""#);
        match ExperimentSpec::from_json(&text).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "sinr_grid_db"),
            e => panic!("{e:?}"),
        }
        let text = MINIMAL.replace(r#""seed": 1"#, r#""seed": 1, "colour": 3"#);
        assert!(matches!(ExperimentSpec::from_json(&text), Err(Error::Schema { .. })));
    }
}

//! Scenario configuration.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deserializes JSON, reporting failures with the path of the offending field.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// How channel matrices are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMode {
    /// Effective-tap model with `Z = K`: column `k` of `G` carries the power of
    /// tap `k - 1`. All large-array closed forms assume this mode.
    #[default]
    PaperFaithful,
    /// `G` is the subcarrier DFT of explicitly drawn multipath taps.
    Physical,
}

/// A per-subcarrier quantity given either as one value or as one value per
/// subcarrier.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PerSubcarrier {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerSubcarrier {
    fn resolve(self, l: usize, field: &str) -> Result<Vec<f64>> {
        match self {
            PerSubcarrier::Scalar(v) => Ok(vec![v; l]),
            PerSubcarrier::List(v) if v.len() == l => Ok(v),
            PerSubcarrier::List(v) => Err(Error::Schema {
                path: field.to_string(),
                message: format!("expected {l} entries (one per subcarrier), got {}", v.len()),
            }),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkConfigRaw {
    num_antennas: usize,
    num_sus: usize,
    num_subcarriers: usize,
    num_taps: Option<usize>,
    reporting_energy: Option<PerSubcarrier>,
    noise_power: Option<PerSubcarrier>,
    #[serde(default = "defaults::pathloss_exponent")]
    pathloss_exponent: f64,
    #[serde(default = "defaults::shadow_mean_db")]
    shadow_mean_db: f64,
    #[serde(default = "defaults::shadow_std_db")]
    shadow_std_db: f64,
    #[serde(default = "defaults::r_min")]
    r_min: f64,
    #[serde(default = "defaults::r_max")]
    r_max: f64,
    #[serde(default)]
    channel_mode: ChannelMode,
    #[serde(default = "defaults::interference")]
    interference: bool,
}

mod defaults {
    pub fn pathloss_exponent() -> f64 {
        2.0
    }
    pub fn shadow_mean_db() -> f64 {
        4.0
    }
    pub fn shadow_std_db() -> f64 {
        2.0
    }
    pub fn r_min() -> f64 {
        100.0
    }
    pub fn r_max() -> f64 {
        1000.0
    }
    pub fn interference() -> bool {
        true
    }
}

/// All scenario parameters of the reporting channel.
///
/// Loaded from JSON; unknown keys are rejected. When omitted, the reporting
/// energy defaults to `1/sqrt(N)` and the noise power to 1 on every
/// subcarrier, `num_taps` defaults to `num_sus`, and the geometry defaults to
/// SUs between 100 m and 1000 m with path-loss exponent 2 and 4 dB / 2 dB
/// log-normal shadowing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkConfigRaw")]
pub struct NetworkConfig {
    pub num_antennas: usize,
    pub num_sus: usize,
    pub num_subcarriers: usize,
    pub num_taps: usize,
    /// Energy per reported symbol on each subcarrier.
    pub reporting_energy: Vec<f64>,
    /// Thermal noise power on each subcarrier.
    pub noise_power: Vec<f64>,
    pub pathloss_exponent: f64,
    pub shadow_mean_db: f64,
    pub shadow_std_db: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub channel_mode: ChannelMode,
    /// Whether ISI/ICI are added to the received vector (and to the effective
    /// noise power).
    pub interference: bool,
}

impl TryFrom<NetworkConfigRaw> for NetworkConfig {
    type Error = Error;

    fn try_from(raw: NetworkConfigRaw) -> Result<Self> {
        let l = raw.num_subcarriers;
        if l == 0 {
            return Err(Error::config("num_subcarriers must be >= 1"));
        }
        let n = raw.num_antennas;
        let reporting_energy = match raw.reporting_energy {
            Some(v) => v.resolve(l, "reporting_energy")?,
            None => vec![1.0 / (n.max(1) as f64).sqrt(); l],
        };
        let noise_power = match raw.noise_power {
            Some(v) => v.resolve(l, "noise_power")?,
            None => vec![1.0; l],
        };
        let cfg = NetworkConfig {
            num_antennas: n,
            num_sus: raw.num_sus,
            num_subcarriers: l,
            num_taps: raw.num_taps.unwrap_or(raw.num_sus),
            reporting_energy,
            noise_power,
            pathloss_exponent: raw.pathloss_exponent,
            shadow_mean_db: raw.shadow_mean_db,
            shadow_std_db: raw.shadow_std_db,
            r_min: raw.r_min,
            r_max: raw.r_max,
            channel_mode: raw.channel_mode,
            interference: raw.interference,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl NetworkConfig {
    /// Builds a configuration with the default energy, noise and geometry.
    pub fn new(num_antennas: usize, num_sus: usize, num_subcarriers: usize) -> Result<Self> {
        let cfg = NetworkConfig {
            num_antennas,
            num_sus,
            num_subcarriers,
            num_taps: num_sus,
            reporting_energy: vec![1.0 / (num_antennas.max(1) as f64).sqrt(); num_subcarriers],
            noise_power: vec![1.0; num_subcarriers],
            pathloss_exponent: defaults::pathloss_exponent(),
            shadow_mean_db: defaults::shadow_mean_db(),
            shadow_std_db: defaults::shadow_std_db(),
            r_min: defaults::r_min(),
            r_max: defaults::r_max(),
            channel_mode: ChannelMode::PaperFaithful,
            interference: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_antennas == 0 {
            return Err(Error::config("num_antennas must be >= 1"));
        }
        if self.num_sus == 0 {
            return Err(Error::config("num_sus must be >= 1"));
        }
        if self.num_taps == 0 {
            return Err(Error::config("num_taps must be >= 1"));
        }
        if self.num_subcarriers == 0 {
            return Err(Error::config("num_subcarriers must be >= 1"));
        }
        if self.reporting_energy.len() != self.num_subcarriers
            || self.noise_power.len() != self.num_subcarriers
        {
            return Err(Error::config(
                "reporting_energy and noise_power need one entry per subcarrier",
            ));
        }
        if let Some(v) = self.reporting_energy.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::config(format!("reporting_energy must be > 0, got {v}")));
        }
        if let Some(v) = self.noise_power.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::config(format!("noise_power must be > 0, got {v}")));
        }
        if !(self.pathloss_exponent >= 0.0) {
            return Err(Error::config("pathloss_exponent must be >= 0"));
        }
        if !(self.shadow_std_db >= 0.0) {
            return Err(Error::config("shadow_std_db must be >= 0"));
        }
        if !(self.r_min > 0.0 && self.r_min <= self.r_max) {
            return Err(Error::config("need 0 < r_min <= r_max"));
        }
        Ok(())
    }

    /// Checks the `Z = K` precondition of the large-array closed forms.
    pub fn require_paper_faithful(&self) -> Result<()> {
        if self.num_taps != self.num_sus {
            return Err(Error::config(format!(
                "closed forms need num_taps == num_sus (got Z = {}, K = {})",
                self.num_taps, self.num_sus
            )));
        }
        Ok(())
    }

    pub fn check_subcarrier(&self, l: usize) -> Result<()> {
        if l >= self.num_subcarriers {
            return Err(Error::Index {
                what: "subcarrier",
                index: l,
                limit: self.num_subcarriers,
            });
        }
        Ok(())
    }

    /// Returns a copy with the reporting energy of subcarrier `l` replaced.
    pub fn with_reporting_energy(&self, l: usize, rho: f64) -> Self {
        let mut c = self.clone();
        c.reporting_energy[l] = rho;
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_simulation_setup() {
        let cfg = NetworkConfig::from_json(
            r#"{"num_antennas": 16, "num_sus": 4, "num_subcarriers": 2}"#,
        )
        .unwrap();
        assert_eq!(cfg.num_taps, 4);
        assert_eq!(cfg.reporting_energy, vec![0.25, 0.25]);
        assert_eq!(cfg.noise_power, vec![1.0, 1.0]);
        assert_eq!(cfg.r_max, 1000.0);
        assert_eq!(cfg.channel_mode, ChannelMode::PaperFaithful);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = NetworkConfig::from_json(
            r#"{"num_antennas": 16, "num_sus": 4, "num_subcarriers": 2, "bogus": 1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn missing_antenna_count_names_the_field() {
        let err = NetworkConfig::from_json(r#"{"num_sus": 4, "num_subcarriers": 2}"#).unwrap_err();
        assert!(err.to_string().contains("num_antennas"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn per_subcarrier_lists() {
        let cfg = NetworkConfig::from_json(
            r#"{"num_antennas": 4, "num_sus": 2, "num_subcarriers": 2,
                "noise_power": [1.0, 2.0], "reporting_energy": 0.5}"#,
        )
        .unwrap();
        assert_eq!(cfg.noise_power, vec![1.0, 2.0]);
        assert!(NetworkConfig::from_json(
            r#"{"num_antennas": 4, "num_sus": 2, "num_subcarriers": 3, "noise_power": [1.0, 2.0]}"#,
        )
        .is_err());
    }

    #[test]
    fn invalid_values() {
        assert!(NetworkConfig::new(0, 4, 1).is_err());
        assert!(NetworkConfig::new(4, 0, 1).is_err());
        let mut c = NetworkConfig::new(4, 2, 1).unwrap();
        c.r_min = 2000.0;
        assert!(c.validate().is_err());
        c.r_min = 100.0;
        c.noise_power[0] = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn tap_count_guard() {
        let mut c = NetworkConfig::new(4, 3, 1).unwrap();
        assert!(c.require_paper_faithful().is_ok());
        c.num_taps = 2;
        assert!(c.require_paper_faithful().is_err());
    }
}

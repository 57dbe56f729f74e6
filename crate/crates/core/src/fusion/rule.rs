use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Fusion statistics evaluated at the fusion center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionRule {
    /// Log-likelihood ratio over all decision vectors.
    Opt,
    /// Widely linear, normal deflection.
    Wl0,
    /// Widely linear, modified deflection.
    Wl1,
    TrWl0,
    TrWl1,
    Mrc,
    /// MRC with `D_g^{-1}` equalization.
    Mmrc,
    TrMrc,
    TrMmrc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    Optimum,
    WidelyLinear,
    MaximalRatio,
}

impl FusionRule {
    pub const ALL: [FusionRule; 9] = [
        FusionRule::Opt,
        FusionRule::Wl0,
        FusionRule::Wl1,
        FusionRule::TrWl0,
        FusionRule::TrWl1,
        FusionRule::Mrc,
        FusionRule::Mmrc,
        FusionRule::TrMrc,
        FusionRule::TrMmrc,
    ];

    /// Every rule with a linear statistic.
    pub const LINEAR: [FusionRule; 8] = [
        FusionRule::Wl0,
        FusionRule::Wl1,
        FusionRule::TrWl0,
        FusionRule::TrWl1,
        FusionRule::Mrc,
        FusionRule::Mmrc,
        FusionRule::TrMrc,
        FusionRule::TrMmrc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FusionRule::Opt => "opt",
            FusionRule::Wl0 => "wl0",
            FusionRule::Wl1 => "wl1",
            FusionRule::TrWl0 => "trwl0",
            FusionRule::TrWl1 => "trwl1",
            FusionRule::Mrc => "mrc",
            FusionRule::Mmrc => "mmrc",
            FusionRule::TrMrc => "trmrc",
            FusionRule::TrMmrc => "trmmrc",
        }
    }

    pub fn family(self) -> RuleFamily {
        match self {
            FusionRule::Opt => RuleFamily::Optimum,
            FusionRule::Wl0 | FusionRule::Wl1 | FusionRule::TrWl0 | FusionRule::TrWl1 => {
                RuleFamily::WidelyLinear
            }
            _ => RuleFamily::MaximalRatio,
        }
    }

    /// Uses the time-reversed channel as combining reference.
    pub fn is_time_reversed(self) -> bool {
        matches!(
            self,
            FusionRule::TrWl0 | FusionRule::TrWl1 | FusionRule::TrMrc | FusionRule::TrMmrc
        )
    }

    /// Deflection index of the WL rules.
    pub fn deflection_index(self) -> Option<usize> {
        match self {
            FusionRule::Wl0 | FusionRule::TrWl0 => Some(0),
            FusionRule::Wl1 | FusionRule::TrWl1 => Some(1),
            _ => None,
        }
    }
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        FusionRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown fusion rule `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for r in FusionRule::ALL {
            assert_eq!(r.name().parse::<FusionRule>().unwrap(), r);
            let json = serde_json::to_string(&r).unwrap();
            assert_eq!(json, format!("\"{}\"", r.name()));
            assert_eq!(serde_json::from_str::<FusionRule>(&json).unwrap(), r);
        }
        assert!("wl2".parse::<FusionRule>().is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(FusionRule::TrWl1.deflection_index(), Some(1));
        assert_eq!(FusionRule::Mrc.deflection_index(), None);
        assert!(FusionRule::TrMmrc.is_time_reversed());
        assert_eq!(FusionRule::Mmrc.family(), RuleFamily::MaximalRatio);
        assert_eq!(FusionRule::Opt.family(), RuleFamily::Optimum);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Named tap-power shapes used to build a [`PowerDelayProfile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PdpShape {
    Uniform,
    /// `beta(z)` proportional to `exp(-z / decay)`.
    Exponential { decay: f64 },
    SingleTap,
    /// Explicit tap powers, normalized on construction.
    Taps { taps: Vec<f64> },
}

impl PdpShape {
    /// Normalized tap powers for `z = 0..num_taps`.
    pub fn taps(&self, num_taps: usize) -> Result<Vec<f64>> {
        if num_taps == 0 {
            return Err(Error::config("a delay profile needs at least one tap"));
        }
        let raw: Vec<f64> = match self {
            PdpShape::Uniform => vec![1.0; num_taps],
            PdpShape::Exponential { decay } => {
                if !(*decay > 0.0 && decay.is_finite()) {
                    return Err(Error::config(format!("exponential decay must be > 0, got {decay}")));
                }
                (0..num_taps).map(|z| (-(z as f64) / decay).exp()).collect()
            }
            PdpShape::SingleTap => {
                let mut v = vec![0.0; num_taps];
                v[0] = 1.0;
                v
            }
            PdpShape::Taps { taps } => {
                if taps.len() != num_taps {
                    return Err(Error::config(format!(
                        "explicit delay profile has {} taps, scenario expects {num_taps}",
                        taps.len()
                    )));
                }
                taps.clone()
            }
        };
        normalize(raw)
    }
}

fn normalize(mut v: Vec<f64>) -> Result<Vec<f64>> {
    if v.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
        return Err(Error::config("tap powers must be finite and nonnegative"));
    }
    let s: f64 = v.iter().sum();
    if s <= 0.0 {
        return Err(Error::config("tap powers sum to zero"));
    }
    if (s - 1.0).abs() > 1e-12 {
        v.iter_mut().for_each(|b| *b /= s);
    }
    Ok(v)
}

/// Normalized tap powers `beta_k^l(z)` for every SU `k` and subcarrier `l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerDelayProfile {
    beta: Vec<Vec<Vec<f64>>>,
}

impl PowerDelayProfile {
    /// Takes `beta[k][l]` tap vectors, each of which must sum to one.
    pub fn new(beta: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let k = beta.len();
        if k == 0 || beta[0].is_empty() || beta[0][0].is_empty() {
            return Err(Error::Dimension("delay profile must be nonempty".into()));
        }
        let (l, z) = (beta[0].len(), beta[0][0].len());
        for row in &beta {
            if row.len() != l || row.iter().any(|t| t.len() != z) {
                return Err(Error::Dimension("ragged delay profile".into()));
            }
            for t in row {
                if t.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
                    return Err(Error::config("tap powers must be finite and nonnegative"));
                }
                let s: f64 = t.iter().sum();
                if (s - 1.0).abs() > NORM_TOL {
                    return Err(Error::config(format!("delay profile sums to {s}, expected 1")));
                }
            }
        }
        Ok(PowerDelayProfile { beta })
    }

    /// The same normalized taps for every SU and subcarrier.
    pub fn shared(num_sus: usize, num_subcarriers: usize, taps: &[f64]) -> Result<Self> {
        let taps = normalize(taps.to_vec())?;
        PowerDelayProfile::new(vec![vec![taps; num_subcarriers]; num_sus])
    }

    pub fn from_shape(
        shape: &PdpShape,
        num_sus: usize,
        num_subcarriers: usize,
        num_taps: usize,
    ) -> Result<Self> {
        PowerDelayProfile::shared(num_sus, num_subcarriers, &shape.taps(num_taps)?)
    }

    pub fn num_sus(&self) -> usize {
        self.beta.len()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.beta[0].len()
    }

    pub fn num_taps(&self) -> usize {
        self.beta[0][0].len()
    }

    pub fn beta(&self, k: usize, l: usize) -> &[f64] {
        &self.beta[k][l]
    }

    /// `beta(Z - 1 - z)` for every SU and subcarrier.
    pub fn time_reverse(&self) -> Self {
        let beta = self
            .beta
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| t.iter().rev().copied().collect())
                    .collect()
            })
            .collect();
        PowerDelayProfile { beta }
    }

    /// Whether `beta(z) == beta(Z - 1 - z)` everywhere.
    pub fn is_symmetric(&self) -> bool {
        self.beta
            .iter()
            .flatten()
            .all(|t| t.iter().eq(t.iter().rev()))
    }

    pub(crate) fn check_shape(&self, num_sus: usize, num_subcarriers: usize) -> Result<()> {
        if self.num_sus() != num_sus || self.num_subcarriers() != num_subcarriers {
            return Err(Error::Dimension(format!(
                "delay profile is {}x{}, scenario has K = {num_sus}, L = {num_subcarriers}",
                self.num_sus(),
                self.num_subcarriers()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversal_examples() {
        let p = PowerDelayProfile::shared(1, 1, &[0.7, 0.2, 0.1]).unwrap();
        assert_eq!(p.time_reverse().beta(0, 0), &[0.1, 0.2, 0.7]);
        let s = PowerDelayProfile::shared(2, 2, &[0.25, 0.5, 0.25]).unwrap();
        assert!(s.is_symmetric());
        assert_eq!(s.time_reverse(), s);
        assert!(!p.is_symmetric());
    }

    #[test]
    fn shapes_are_normalized() {
        for shape in [
            PdpShape::Uniform,
            PdpShape::Exponential { decay: 2.0 },
            PdpShape::SingleTap,
            PdpShape::Taps { taps: vec![3.0, 1.0, 0.0, 4.0] },
        ] {
            let t = shape.taps(4).unwrap();
            assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
        assert_eq!(PdpShape::Uniform.taps(4).unwrap(), vec![0.25; 4]);
        let e = PdpShape::Exponential { decay: 2.0 }.taps(3).unwrap();
        assert!((e[1] / e[0] - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn shape_json() {
        let s: PdpShape = serde_json::from_str(r#"{"shape": "exponential", "decay": 2.0}"#).unwrap();
        assert_eq!(s, PdpShape::Exponential { decay: 2.0 });
        let s: PdpShape = serde_json::from_str(r#"{"shape": "single-tap"}"#).unwrap();
        assert_eq!(s, PdpShape::SingleTap);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(PowerDelayProfile::new(vec![vec![vec![0.5, 0.4]]]).is_err());
        assert!(PdpShape::Taps { taps: vec![0.0, 0.0] }.taps(2).is_err());
        assert!(PdpShape::Taps { taps: vec![1.0] }.taps(2).is_err());
    }
}

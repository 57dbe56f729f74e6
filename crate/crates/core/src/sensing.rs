//! Local sensing model: per-SU detection/false-alarm probabilities and the
//! BPSK-mapped decisions they produce.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Primary user silent.
    H0,
    /// Primary user active.
    H1,
}

impl Hypothesis {
    pub const BOTH: [Hypothesis; 2] = [Hypothesis::H0, Hypothesis::H1];

    pub fn index(self) -> usize {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }
}

/// Local decisions of all SUs on one subcarrier, each `+1` or `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some(v) = x.iter().find(|v| **v != 1.0 && **v != -1.0) {
            return Err(Error::Dimension(format!("decision entries must be +1 or -1, got {v}")));
        }
        Ok(DecisionVector(x))
    }

    /// Builds a decision vector from bit `k` of `bits` (set means `+1`).
    pub fn from_bits(bits: u64, k: usize) -> Self {
        DecisionVector((0..k).map(|i| if bits >> i & 1 == 1 { 1.0 } else { -1.0 }).collect())
    }

    pub fn ones(k: usize) -> Self {
        DecisionVector(vec![1.0; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `P_D` and `P_F` of every SU on every subcarrier, stored row-major as
/// `K` rows of `L` entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensingProfile {
    pd: Vec<Vec<f64>>,
    pf: Vec<Vec<f64>>,
}

impl SensingProfile {
    pub fn new(pd: Vec<Vec<f64>>, pf: Vec<Vec<f64>>) -> Result<Self> {
        let k = pd.len();
        if k == 0 || pf.len() != k {
            return Err(Error::Dimension("pd and pf need the same nonzero number of SUs".into()));
        }
        let l = pd[0].len();
        if l == 0 || pd.iter().chain(pf.iter()).any(|row| row.len() != l) {
            return Err(Error::Dimension("pd and pf rows need one entry per subcarrier".into()));
        }
        for (name, m) in [("pd", &pd), ("pf", &pf)] {
            if let Some(v) = m.iter().flatten().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::config(format!("{name} entries must lie in [0, 1], got {v}")));
            }
        }
        Ok(SensingProfile { pd, pf })
    }

    pub fn homogeneous(num_sus: usize, num_subcarriers: usize, pd: f64, pf: f64) -> Result<Self> {
        SensingProfile::new(
            vec![vec![pd; num_subcarriers]; num_sus],
            vec![vec![pf; num_subcarriers]; num_sus],
        )
    }

    pub fn num_sus(&self) -> usize {
        self.pd.len()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.pd[0].len()
    }

    pub fn pd(&self, k: usize, l: usize) -> f64 {
        self.pd[k][l]
    }

    pub fn pf(&self, k: usize, l: usize) -> f64 {
        self.pf[k][l]
    }

    fn check(&self, l: usize) -> Result<()> {
        if l >= self.num_subcarriers() {
            return Err(Error::Index {
                what: "subcarrier",
                index: l,
                limit: self.num_subcarriers(),
            });
        }
        Ok(())
    }

    /// `P(x_k = +1 | h)` for every SU on subcarrier `l`.
    pub fn probs(&self, l: usize, h: Hypothesis) -> Result<Vec<f64>> {
        self.check(l)?;
        let m = match h {
            Hypothesis::H0 => &self.pf,
            Hypothesis::H1 => &self.pd,
        };
        Ok(m.iter().map(|row| row[l]).collect())
    }

    /// The common probability on subcarrier `l` if every SU shares it.
    pub fn common_prob(&self, l: usize, h: Hypothesis) -> Result<Option<f64>> {
        let p = self.probs(l, h)?;
        Ok(p.iter().all(|v| *v == p[0]).then_some(p[0]))
    }
}

pub fn draw_local_decisions<R: Rng + ?Sized>(
    profile: &SensingProfile,
    l: usize,
    h: Hypothesis,
    rng: &mut R,
) -> Result<DecisionVector> {
    let p = profile.probs(l, h)?;
    Ok(DecisionVector(
        p.iter()
            .map(|&p| if rng.random::<f64>() < p { 1.0 } else { -1.0 })
            .collect(),
    ))
}

/// First and second moments of the decision vector under one hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMoments {
    /// `E{x_k | h} = 2P - 1`.
    pub mean: Vec<f64>,
    /// Diagonal of `Cov{x | h}`, `1 - (2P - 1)^2`.
    pub cov_diag: Vec<f64>,
    /// Mean shift `2(P_D - P_F)`, identical for both hypotheses.
    pub mu: Vec<f64>,
}

pub fn decision_mean_cov(
    profile: &SensingProfile,
    l: usize,
    h: Hypothesis,
) -> Result<DecisionMoments> {
    let p = profile.probs(l, h)?;
    let pd = profile.probs(l, Hypothesis::H1)?;
    let pf = profile.probs(l, Hypothesis::H0)?;
    let mean: Vec<f64> = p.iter().map(|p| 2.0 * p - 1.0).collect();
    Ok(DecisionMoments {
        cov_diag: mean.iter().map(|m| 1.0 - m * m).collect(),
        mean,
        mu: pd.iter().zip(&pf).map(|(d, f)| 2.0 * (d - f)).collect(),
    })
}

/// Log-probability of a decision vector; zero-probability events give `-inf`.
pub fn log_prob(x: &[f64], p_plus: &[f64]) -> f64 {
    x.iter()
        .zip(p_plus)
        .map(|(&x, &p)| if x > 0.0 { p.ln() } else { (1.0 - p).ln() })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = SensingProfile::homogeneous(5, 2, 1.0, 0.0).unwrap();
        let x1 = draw_local_decisions(&p, 1, Hypothesis::H1, &mut rng).unwrap();
        assert!(x1.as_slice().iter().all(|v| *v == 1.0));
        let x0 = draw_local_decisions(&p, 0, Hypothesis::H0, &mut rng).unwrap();
        assert!(x0.as_slice().iter().all(|v| *v == -1.0));
    }

    #[test]
    fn out_of_range_subcarrier() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = SensingProfile::homogeneous(2, 2, 0.5, 0.1).unwrap();
        let err = draw_local_decisions(&p, 2, Hypothesis::H0, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Index { index: 2, limit: 2, .. }));
    }

    #[test]
    fn false_alarm_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = SensingProfile::homogeneous(1, 1, 0.5, 0.01).unwrap();
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| {
                draw_local_decisions(&p, 0, Hypothesis::H0, &mut rng).unwrap().as_slice()[0] > 0.0
            })
            .count();
        assert!((hits as f64 / n as f64 - 0.01).abs() < 3e-4);
    }

    #[test]
    fn moments_examples() {
        let p = SensingProfile::homogeneous(3, 1, 0.5, 0.5).unwrap();
        let m = decision_mean_cov(&p, 0, Hypothesis::H0).unwrap();
        assert_eq!(m.mean, vec![0.0; 3]);
        assert_eq!(m.cov_diag, vec![1.0; 3]);

        let p = SensingProfile::homogeneous(2, 1, 1.0, 1.0).unwrap();
        let m = decision_mean_cov(&p, 0, Hypothesis::H0).unwrap();
        assert_eq!(m.mean, vec![1.0; 2]);
        assert_eq!(m.cov_diag, vec![0.0; 2]);

        let p = SensingProfile::homogeneous(4, 1, 0.5, 0.05).unwrap();
        let m = decision_mean_cov(&p, 0, Hypothesis::H1).unwrap();
        for v in m.mu {
            assert!((v - 0.9).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(SensingProfile::homogeneous(2, 2, 1.5, 0.1).is_err());
        assert!(SensingProfile::new(vec![vec![0.5]], vec![vec![0.1, 0.1]]).is_err());
        assert!(DecisionVector::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn log_prob_zero_probability() {
        assert_eq!(log_prob(&[1.0], &[0.0]), f64::NEG_INFINITY);
        assert_eq!(log_prob(&[-1.0], &[0.0]), 0.0);
    }
}

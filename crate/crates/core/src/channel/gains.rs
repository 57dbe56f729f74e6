use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::{Error, Result};

/// Geometric attenuation and shadowing of each SU, shared by all subcarriers
/// and antennas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeScaleGains {
    pub lambda: Vec<f64>,
    /// SU distances in meters.
    pub positions: Vec<f64>,
}

impl LargeScaleGains {
    /// `lambda_k = psi_k (r_min / r_k)^n` from explicit distances and
    /// shadowing terms (in dB).
    pub fn from_parts(config: &NetworkConfig, positions: Vec<f64>, shadow_db: &[f64]) -> Result<Self> {
        if positions.len() != shadow_db.len() {
            return Err(Error::Dimension("one shadowing term per SU is required".into()));
        }
        let lambda = positions
            .iter()
            .zip(shadow_db)
            .map(|(&r, &s)| 10f64.powf(s / 10.0) * (config.r_min / r).powf(config.pathloss_exponent))
            .collect();
        Ok(LargeScaleGains { lambda, positions })
    }

    /// Unit gains at distance `r_min`.
    pub fn unit(num_sus: usize, r_min: f64) -> Self {
        LargeScaleGains {
            lambda: vec![1.0; num_sus],
            positions: vec![r_min; num_sus],
        }
    }

    pub fn num_sus(&self) -> usize {
        self.lambda.len()
    }
}

pub fn draw_large_scale<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> LargeScaleGains {
    let k = config.num_sus;
    let shadow = Normal::new(config.shadow_mean_db, config.shadow_std_db)
        .expect("shadow_std_db validated nonnegative");
    let mut positions = Vec::with_capacity(k);
    let mut psi_db = Vec::with_capacity(k);
    for _ in 0..k {
        let u: f64 = rng.random();
        positions.push(config.r_min + u * (config.r_max - config.r_min));
        psi_db.push(shadow.sample(rng));
    }
    LargeScaleGains::from_parts(config, positions, &psi_db).expect("lengths match")
}

/// `E{lambda_k}` under the configured geometry and shadowing law.
pub fn mean_gain(config: &NetworkConfig) -> f64 {
    let a = std::f64::consts::LN_10 / 10.0;
    let shadow = (a * config.shadow_mean_db + 0.5 * (a * config.shadow_std_db).powi(2)).exp();
    let (r0, r1, n) = (config.r_min, config.r_max, config.pathloss_exponent);
    let distance = if r1 - r0 <= f64::EPSILON * r1 {
        1.0
    } else if (n - 1.0).abs() < 1e-12 {
        r0 * (r1 / r0).ln() / (r1 - r0)
    } else {
        r0.powf(n) * (r1.powf(1.0 - n) - r0.powf(1.0 - n)) / ((1.0 - n) * (r1 - r0))
    };
    shadow * distance
}

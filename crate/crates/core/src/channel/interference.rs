use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::{complex_normal, PowerDelayProfile};
use crate::config::NetworkConfig;
use crate::error::Result;

/// ISI and ICI powers of every subcarrier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterferencePowers {
    pub isi: Vec<f64>,
    pub ici: Vec<f64>,
}

impl InterferencePowers {
    pub fn from_pdp(pdp: &PowerDelayProfile) -> Self {
        let l_n = pdp.num_subcarriers();
        InterferencePowers {
            isi: (0..l_n).map(|l| isi_power(pdp, l)).collect(),
            ici: (0..l_n).map(|l| ici_power(pdp, l)).collect(),
        }
    }

    pub fn none(num_subcarriers: usize) -> Self {
        InterferencePowers {
            isi: vec![0.0; num_subcarriers],
            ici: vec![0.0; num_subcarriers],
        }
    }

    /// Powers for the scenario, zero when interference is disabled.
    pub fn for_config(config: &NetworkConfig, pdp: &PowerDelayProfile) -> Result<Self> {
        pdp.check_shape(config.num_sus, config.num_subcarriers)?;
        Ok(if config.interference {
            InterferencePowers::from_pdp(pdp)
        } else {
            InterferencePowers::none(config.num_subcarriers)
        })
    }

    /// `psi_l^2 = ISI + ICI`.
    pub fn total(&self, l: usize) -> f64 {
        self.isi[l] + self.ici[l]
    }
}

/// `sum_k (sum_z z beta_k^l(z))^2`.
pub fn isi_power(pdp: &PowerDelayProfile, l: usize) -> f64 {
    (0..pdp.num_sus())
        .map(|k| {
            let tau: f64 = pdp
                .beta(k, l)
                .iter()
                .enumerate()
                .map(|(z, b)| z as f64 * b)
                .sum();
            tau * tau
        })
        .sum()
}

/// `sum_k sum_{p != l} |sum_z beta_k^p(z) exp(-j 2 pi z d / L)|^2` with
/// `d = (l - p) mod L`.
pub fn ici_power(pdp: &PowerDelayProfile, l: usize) -> f64 {
    let l_n = pdp.num_subcarriers();
    let mut total = 0.0;
    for k in 0..pdp.num_sus() {
        for p in (0..l_n).filter(|&p| p != l) {
            let d = (l + l_n - p) % l_n;
            let s: Complex64 = pdp
                .beta(k, p)
                .iter()
                .enumerate()
                .map(|(z, &b)| {
                    // Reduce z * d modulo L before forming the angle.
                    let m = (z * d) % l_n;
                    Complex64::from_polar(b, -2.0 * PI * m as f64 / l_n as f64)
                })
                .sum();
            total += s.norm_sqr();
        }
    }
    total
}

/// `sigma_w^2 + ISI + ICI` on subcarrier `l`.
pub fn effective_noise_power(config: &NetworkConfig, powers: &InterferencePowers, l: usize) -> f64 {
    config.noise_power[l] + powers.total(l)
}

/// `CN(0, psi2 I_N)` vector.
pub fn draw_interference<R: Rng + ?Sized>(psi2: f64, n: usize, rng: &mut R) -> DVector<Complex64> {
    if psi2 == 0.0 {
        return DVector::zeros(n);
    }
    DVector::from_fn(n, |_, _| complex_normal(rng, psi2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PdpShape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isi_examples() {
        let single = PowerDelayProfile::from_shape(&PdpShape::SingleTap, 3, 2, 4).unwrap();
        assert_eq!(isi_power(&single, 1), 0.0);
        let uni = PowerDelayProfile::from_shape(&PdpShape::Uniform, 8, 1, 4).unwrap();
        assert!((isi_power(&uni, 0) - 18.0).abs() < 1e-12);
        let half = PowerDelayProfile::shared(1, 1, &[0.5, 0.5]).unwrap();
        assert!((isi_power(&half, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ici_examples() {
        let one = PowerDelayProfile::from_shape(&PdpShape::Exponential { decay: 1.0 }, 2, 1, 3).unwrap();
        assert_eq!(ici_power(&one, 0), 0.0);
        let flat = PowerDelayProfile::shared(3, 5, &[1.0]).unwrap();
        assert!((ici_power(&flat, 2) - 12.0).abs() < 1e-12);
        let two = PowerDelayProfile::shared(1, 2, &[0.5, 0.5]).unwrap();
        assert!(ici_power(&two, 1).abs() < 1e-15);
    }

    #[test]
    fn effective_noise_examples() {
        let mut cfg = NetworkConfig::new(4, 1, 1).unwrap();
        let flat = PowerDelayProfile::shared(1, 1, &[1.0]).unwrap();
        let p = InterferencePowers::from_pdp(&flat);
        assert_eq!(effective_noise_power(&cfg, &p, 0), 1.0);
        let p = InterferencePowers { isi: vec![18.0], ici: vec![2.0] };
        assert_eq!(effective_noise_power(&cfg, &p, 0), 21.0);
        cfg.interference = false;
        let uni = PowerDelayProfile::from_shape(&PdpShape::Uniform, 1, 1, 4).unwrap();
        assert_eq!(InterferencePowers::for_config(&cfg, &uni).unwrap().total(0), 0.0);
    }

    #[test]
    fn interference_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(draw_interference(0.0, 8, &mut rng).iter().all(|v| v.norm() == 0.0));
        let v = draw_interference(4.0, 1_000_000, &mut rng);
        let n = v.len() as f64;
        let total = v.iter().map(|c| c.norm_sqr()).sum::<f64>() / n;
        let re = v.iter().map(|c| c.re * c.re).sum::<f64>() / n;
        let im = v.iter().map(|c| c.im * c.im).sum::<f64>() / n;
        assert!((total - 4.0).abs() < 0.04);
        assert!((re - 2.0).abs() < 0.02 && (im - 2.0).abs() < 0.02);
    }
}

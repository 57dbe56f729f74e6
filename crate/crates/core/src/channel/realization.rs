use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{complex_normal, LargeScaleGains, PowerDelayProfile};
use crate::config::{ChannelMode, NetworkConfig};
use crate::error::{Error, Result};

/// Multipath taps `h_{n,k}(z)` of one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct Taps {
    num_antennas: usize,
    num_sus: usize,
    num_taps: usize,
    h: Vec<Complex64>,
}

impl Taps {
    pub fn get(&self, n: usize, k: usize, z: usize) -> Complex64 {
        self.h[(n * self.num_sus + k) * self.num_taps + z]
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.num_antennas, self.num_sus, self.num_taps)
    }
}

/// Channel state of one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierChannel {
    pub l: usize,
    /// `N x K` channel matrix `G`.
    pub g: DMatrix<Complex64>,
    /// Time-reversed channel matrix.
    pub g_tr: DMatrix<Complex64>,
    /// Diagonal of `D_g`, the large-array limit of `G'G / N`.
    pub d_g: Vec<f64>,
    /// Diagonal of the time-reversed counterpart of `D_g`.
    pub a_tr: Vec<f64>,
    /// Diagonal of the cross term, the limit of `N * G_tr'G`.
    pub f: Vec<f64>,
    /// Drawn taps (physical mode only).
    pub taps: Option<Taps>,
}

impl SubcarrierChannel {
    pub fn num_antennas(&self) -> usize {
        self.g.nrows()
    }

    pub fn num_sus(&self) -> usize {
        self.g.ncols()
    }
}

/// One draw of the channel on every subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub subcarriers: Vec<SubcarrierChannel>,
}

/// Limits of the Gram and cross-Gram diagonals for subcarrier `l`.
///
/// Paper-faithful mode uses the effective-tap convention
/// `d_k = lambda_k beta(k-1)`, `a_k = lambda_k beta(K-k)`,
/// `f_k = lambda_k sqrt(beta(K-k) beta(k-1))` (one-based `k`). Physical mode
/// returns the limits of the tap-DFT model instead.
pub fn diagonals(
    config: &NetworkConfig,
    gains: &LargeScaleGains,
    pdp: &PowerDelayProfile,
    l: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    check_inputs(config, gains, pdp, l)?;
    let k_n = config.num_sus;
    let mut d = Vec::with_capacity(k_n);
    let mut a = Vec::with_capacity(k_n);
    let mut f = Vec::with_capacity(k_n);
    for (k, &lam) in gains.lambda.iter().enumerate() {
        let beta = pdp.beta(k, l);
        match config.channel_mode {
            ChannelMode::PaperFaithful => {
                let (b, bt) = (beta[k], beta[k_n - 1 - k]);
                d.push(lam * b);
                a.push(lam * bt);
                f.push(lam * (b * bt).sqrt());
            }
            ChannelMode::Physical => {
                let zn = beta.len() as f64;
                let big_l = config.num_subcarriers as f64;
                let cross: f64 = beta
                    .iter()
                    .enumerate()
                    .map(|(z, b)| b * (2.0 * PI * l as f64 * (zn - 1.0 - 2.0 * z as f64) / big_l).cos())
                    .sum();
                d.push(lam);
                a.push(lam);
                f.push(lam * cross);
            }
        }
    }
    Ok((d, a, f))
}

fn check_inputs(
    config: &NetworkConfig,
    gains: &LargeScaleGains,
    pdp: &PowerDelayProfile,
    l: usize,
) -> Result<()> {
    config.check_subcarrier(l)?;
    pdp.check_shape(config.num_sus, config.num_subcarriers)?;
    if gains.num_sus() != config.num_sus {
        return Err(Error::Dimension(format!(
            "{} large-scale gains for K = {}",
            gains.num_sus(),
            config.num_sus
        )));
    }
    if pdp.num_taps() != config.num_taps {
        return Err(Error::Dimension(format!(
            "delay profile has {} taps, scenario has Z = {}",
            pdp.num_taps(),
            config.num_taps
        )));
    }
    if config.channel_mode == ChannelMode::PaperFaithful {
        config.require_paper_faithful()?;
    }
    Ok(())
}

/// Independent taps `h_{n,k}(z) ~ CN(0, beta_k^l(z))`.
pub fn draw_taps<R: Rng + ?Sized>(
    config: &NetworkConfig,
    pdp: &PowerDelayProfile,
    l: usize,
    rng: &mut R,
) -> Result<Taps> {
    config.check_subcarrier(l)?;
    pdp.check_shape(config.num_sus, config.num_subcarriers)?;
    let (n_a, k_n, z_n) = (config.num_antennas, config.num_sus, pdp.num_taps());
    let mut h = Vec::with_capacity(n_a * k_n * z_n);
    for _ in 0..n_a {
        for k in 0..k_n {
            for &b in pdp.beta(k, l) {
                h.push(complex_normal(rng, b));
            }
        }
    }
    Ok(Taps {
        num_antennas: n_a,
        num_sus: k_n,
        num_taps: z_n,
        h,
    })
}

pub fn build_subcarrier<R: Rng + ?Sized>(
    config: &NetworkConfig,
    gains: &LargeScaleGains,
    pdp: &PowerDelayProfile,
    l: usize,
    rng: &mut R,
) -> Result<SubcarrierChannel> {
    let (d_g, a_tr, f) = diagonals(config, gains, pdp, l)?;
    let (n_a, k_n) = (config.num_antennas, config.num_sus);
    match config.channel_mode {
        ChannelMode::PaperFaithful => {
            let sd: Vec<f64> = d_g.iter().map(|v| v.sqrt()).collect();
            let sa: Vec<f64> = a_tr.iter().map(|v| v.sqrt()).collect();
            let mut g = DMatrix::zeros(n_a, k_n);
            let mut g_tr = DMatrix::zeros(n_a, k_n);
            for n in 0..n_a {
                for k in 0..k_n {
                    let u = complex_normal(rng, 1.0);
                    g[(n, k)] = u * sd[k];
                    g_tr[(n, k)] = u * sa[k];
                }
            }
            Ok(SubcarrierChannel { l, g, g_tr, d_g, a_tr, f, taps: None })
        }
        ChannelMode::Physical => {
            let taps = draw_taps(config, pdp, l, rng)?;
            let z_n = taps.num_taps;
            let phase: Vec<Complex64> = (0..z_n)
                .map(|z| Complex64::from_polar(1.0, -2.0 * PI * (l * z) as f64 / config.num_subcarriers as f64))
                .collect();
            let mut g = DMatrix::zeros(n_a, k_n);
            let mut g_tr = DMatrix::zeros(n_a, k_n);
            for n in 0..n_a {
                for k in 0..k_n {
                    let s = gains.lambda[k].sqrt();
                    let mut v = Complex64::new(0.0, 0.0);
                    let mut vt = Complex64::new(0.0, 0.0);
                    for z in 0..z_n {
                        v += taps.get(n, k, z) * phase[z];
                        vt += taps.get(n, k, z_n - 1 - z) * phase[z];
                    }
                    g[(n, k)] = v * s;
                    g_tr[(n, k)] = vt * s;
                }
            }
            Ok(SubcarrierChannel { l, g, g_tr, d_g, a_tr, f, taps: Some(taps) })
        }
    }
}

pub fn build_channel<R: Rng + ?Sized>(
    config: &NetworkConfig,
    gains: &LargeScaleGains,
    pdp: &PowerDelayProfile,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let subcarriers = (0..config.num_subcarriers)
        .map(|l| build_subcarrier(config, gains, pdp, l, rng))
        .collect::<Result<_>>()?;
    Ok(ChannelRealization { subcarriers })
}

/// Row-major text dump, one row per line, entries written as `a+bi`.
pub fn matrix_to_text(m: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(' ');
            }
            let v = m[(r, c)];
            let _ = write!(out, "{}{:+}i", v.re, v.im);
        }
        out.push('\n');
    }
    out
}

/// `||G'G / N - D_g||_F / ||D_g||_F`.
pub fn favorable_propagation_gap(ch: &SubcarrierChannel) -> f64 {
    let n = ch.num_antennas() as f64;
    let gram = ch.g.adjoint() * &ch.g / Complex64::new(n, 0.0);
    let mut num = 0.0;
    for i in 0..ch.num_sus() {
        for j in 0..ch.num_sus() {
            let target = if i == j { ch.d_g[i] } else { 0.0 };
            num += (gram[(i, j)] - target).norm_sqr();
        }
    }
    let den: f64 = ch.d_g.iter().map(|d| d * d).sum();
    (num / den).sqrt()
}

/// `||G_tr'G / N - diag(f)||_F / ||diag(f)||_F`.
pub fn cross_term_gap(ch: &SubcarrierChannel) -> f64 {
    let n = ch.num_antennas() as f64;
    let gram = ch.g_tr.adjoint() * &ch.g / Complex64::new(n, 0.0);
    let mut num = 0.0;
    for i in 0..ch.num_sus() {
        for j in 0..ch.num_sus() {
            let target = if i == j { ch.f[i] } else { 0.0 };
            num += (gram[(i, j)] - target).norm_sqr();
        }
    }
    let den: f64 = ch.f.iter().map(|d| d * d).sum();
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PdpShape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize, k: usize) -> (NetworkConfig, LargeScaleGains, PowerDelayProfile) {
        let cfg = NetworkConfig::new(n, k, 1).unwrap();
        let gains = LargeScaleGains {
            lambda: (0..k).map(|i| 0.5 + i as f64).collect(),
            positions: vec![100.0; k],
        };
        let pdp = PowerDelayProfile::from_shape(&PdpShape::Exponential { decay: 2.0 }, k, 1, k).unwrap();
        (cfg, gains, pdp)
    }

    #[test]
    fn paper_faithful_requires_matching_taps() {
        let (mut cfg, gains, _) = setup(4, 3);
        cfg.num_taps = 2;
        let pdp = PowerDelayProfile::from_shape(&PdpShape::Uniform, 3, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = build_subcarrier(&cfg, &gains, &pdp, 0, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn favorable_propagation_at_large_n() {
        let (cfg, gains, pdp) = setup(2048, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = build_subcarrier(&cfg, &gains, &pdp, 0, &mut rng).unwrap();
        assert!(favorable_propagation_gap(&ch) <= 0.1);
        assert!(cross_term_gap(&ch) <= 0.1);
    }

    #[test]
    fn unit_variance_entries() {
        let cfg = NetworkConfig::new(20_000, 1, 1).unwrap();
        let gains = LargeScaleGains::unit(1, 100.0);
        let pdp = PowerDelayProfile::shared(1, 1, &[1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = build_subcarrier(&cfg, &gains, &pdp, 0, &mut rng).unwrap();
        let var = ch.g.iter().map(|v| v.norm_sqr()).sum::<f64>() / 20_000.0;
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn diagonal_closed_forms() {
        let cfg = NetworkConfig::new(4, 3, 1).unwrap();
        let gains = LargeScaleGains { lambda: vec![2.0, 3.0, 4.0], positions: vec![100.0; 3] };
        let pdp = PowerDelayProfile::shared(3, 1, &[0.5, 0.3, 0.2]).unwrap();
        let (d, a, f) = diagonals(&cfg, &gains, &pdp, 0).unwrap();
        for k in 0..3 {
            assert!((d[k] - [1.0, 0.9, 0.8][k]).abs() < 1e-15);
            assert!((a[k] - [0.4, 0.9, 2.0][k]).abs() < 1e-15);
            assert!((f[k] - (d[k] * a[k]).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn tap_variances() {
        let cfg = NetworkConfig::new(250_000, 1, 1).unwrap();
        let pdp = PowerDelayProfile::shared(1, 1, &[0.25; 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let taps = draw_taps(&cfg, &pdp, 0, &mut rng).unwrap();
        let mut total = 0.0;
        for z in 0..4 {
            let v = (0..250_000).map(|n| taps.get(n, 0, z).norm_sqr()).sum::<f64>() / 250_000.0;
            assert!((v - 0.25).abs() < 0.0025, "tap {z}: {v}");
            total += v;
        }
        assert!((total - 1.0).abs() < 0.01);

        let single = PowerDelayProfile::shared(1, 1, &[1.0, 0.0, 0.0]).unwrap();
        let taps = draw_taps(&cfg, &single, 0, &mut rng).unwrap();
        assert!((0..1000).all(|n| taps.get(n, 0, 1) == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn physical_mode_limits() {
        let mut cfg = NetworkConfig::new(4096, 2, 4).unwrap();
        cfg.channel_mode = ChannelMode::Physical;
        cfg.num_taps = 3;
        let gains = LargeScaleGains { lambda: vec![1.0, 2.0], positions: vec![100.0; 2] };
        let pdp = PowerDelayProfile::shared(2, 4, &[0.6, 0.3, 0.1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for l in [0, 1] {
            let ch = build_subcarrier(&cfg, &gains, &pdp, l, &mut rng).unwrap();
            assert!(favorable_propagation_gap(&ch) < 0.1);
            let cross = ch.g_tr.adjoint() * &ch.g / Complex64::new(4096.0, 0.0);
            for k in 0..2 {
                assert!((cross[(k, k)].re - ch.f[k]).abs() < 0.1 * gains.lambda[k]);
            }
        }
    }

    #[test]
    fn text_dump() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 0.5),
            Complex64::new(-2.0, -1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(3.25, 1.0),
        ]);
        assert_eq!(matrix_to_text(&m), "1+0.5i -2-1i\n0+0i 3.25+1i\n");
    }
}

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sensing::{log_prob, DecisionVector, Hypothesis, SensingProfile};
use crate::special::log_sum_exp;

/// Largest number of SUs for which all `2^K` decision vectors are enumerated.
pub const MAX_ENUMERATED_SUS: usize = 20;

/// Optimum fusion LLR for a fixed channel.
///
/// The terms that do not depend on `y` (quadratic forms and log-priors of
/// all decision vectors) are computed once, so evaluating many received
/// vectors on the same channel costs `O(NK + 2^K K)` each.
#[derive(Debug, Clone)]
pub struct OptimumDetector {
    g: DMatrix<Complex64>,
    k: usize,
    sqrt_rho: f64,
    sigma_e2: f64,
    /// `-rho x'Re{G'G}x / sigma_e^2 + ln P(x|H_i)` per decision vector.
    base: [Vec<f64>; 2],
}

impl OptimumDetector {
    pub fn new(
        g: &DMatrix<Complex64>,
        rho: f64,
        sigma_e2: f64,
        profile: &SensingProfile,
        l: usize,
    ) -> Result<Self> {
        let k = g.ncols();
        if k > MAX_ENUMERATED_SUS {
            return Err(Error::Capability(format!(
                "optimum rule enumerates 2^K decision vectors; K = {k} exceeds {MAX_ENUMERATED_SUS}"
            )));
        }
        if profile.num_sus() != k {
            return Err(Error::Dimension(format!(
                "profile has {} SUs, channel has {k} columns",
                profile.num_sus()
            )));
        }
        let p0 = profile.probs(l, Hypothesis::H0)?;
        let p1 = profile.probs(l, Hypothesis::H1)?;
        let r = (g.adjoint() * g).map(|v| v.re);
        let count = 1usize << k;
        let mut base = [Vec::with_capacity(count), Vec::with_capacity(count)];
        for bits in 0..count as u64 {
            let x = DecisionVector::from_bits(bits, k);
            let x = x.as_slice();
            let mut q = 0.0;
            for i in 0..k {
                let mut row = 0.0;
                for j in 0..k {
                    row += r[(i, j)] * x[j];
                }
                q += x[i] * row;
            }
            let e = -rho * q / sigma_e2;
            base[0].push(e + log_prob(x, &p0));
            base[1].push(e + log_prob(x, &p1));
        }
        Ok(OptimumDetector {
            g: g.clone(),
            k,
            sqrt_rho: rho.sqrt(),
            sigma_e2,
            base,
        })
    }

    pub fn llr(&self, y: &DVector<Complex64>) -> Result<f64> {
        if y.len() != self.g.nrows() {
            return Err(Error::Index {
                what: "received vector length",
                index: y.len(),
                limit: self.g.nrows(),
            });
        }
        let z: Vec<f64> = (self.g.adjoint() * y)
            .iter()
            .map(|v| 2.0 * self.sqrt_rho * v.re / self.sigma_e2)
            .collect();
        let mut work = vec![0.0; self.base[0].len()];
        let mut out = [0.0; 2];
        for (h, base) in self.base.iter().enumerate() {
            for (bits, w) in work.iter_mut().enumerate() {
                let mut lin = 0.0;
                for (i, zi) in z.iter().enumerate().take(self.k) {
                    lin += if bits >> i & 1 == 1 { *zi } else { -*zi };
                }
                *w = base[bits] + lin;
            }
            out[h] = log_sum_exp(&work);
        }
        Ok(out[1] - out[0])
    }
}

/// `ln [sum_x exp(-||y - sqrt(rho) G x||^2 / sigma_e^2) P(x|H1) / (same, H0)]`.
pub fn optimum_llr(
    y: &DVector<Complex64>,
    g: &DMatrix<Complex64>,
    rho: f64,
    sigma_e2: f64,
    profile: &SensingProfile,
    l: usize,
) -> Result<f64> {
    OptimumDetector::new(g, rho, sigma_e2, profile, l)?.llr(y)
}

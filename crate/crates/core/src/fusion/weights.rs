use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::rule::{FusionRule, RuleFamily};
use crate::channel::SubcarrierChannel;
use crate::error::{Error, Result};

/// Condition-number level above which the WL solve logs a warning.
pub const CONDITION_WARN: f64 = 1e12;

static CONDITION_WARNED: AtomicBool = AtomicBool::new(false);

/// Linear combining vector of one rule.
///
/// For the MRC family `a` is the length-`N` combiner applied as
/// `Re{a'y}`. For the WL family `a` is the first half of the augmented
/// combiner `[a; conj(a)]`, normalized so that `||a|| = 1`; the statistic
/// `[a; conj(a)]'[y; conj(y)] = 2 Re{a'y}` then has noise variance
/// `2 sigma_e^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerWeight {
    pub rule: FusionRule,
    pub a: DVector<Complex64>,
    norm: f64,
}

impl CombinerWeight {
    pub fn new(rule: FusionRule, a: DVector<Complex64>) -> Result<Self> {
        if rule.family() == RuleFamily::Optimum {
            return Err(Error::Capability("the optimum rule has no linear combiner".into()));
        }
        let norm = a.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateWeight(format!("{rule}: combiner norm is {norm}")));
        }
        let (a, norm) = if rule.family() == RuleFamily::WidelyLinear {
            (a.unscale(norm), 1.0)
        } else {
            (a, norm)
        };
        Ok(CombinerWeight { rule, a, norm })
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `[a; conj(a)]`, length `2N`.
    pub fn augmented(&self) -> DVector<Complex64> {
        let n = self.a.len();
        DVector::from_fn(2 * n, |i, _| if i < n { self.a[i] } else { self.a[i - n].conj() })
    }
}

/// `2 Re{G'G}`, the Gram matrix of the augmented channel.
fn augmented_gram(g: &DMatrix<Complex64>) -> DMatrix<f64> {
    (g.adjoint() * g).map(|v| 2.0 * v.re)
}

/// Deflection-optimal WL combiner built from `g` (the channel, or its
/// time-reversed version for the TR rules).
///
/// The direction `Sigma^{-1} [G; conj(G)] mu` is evaluated through the
/// `K x K` system `(rho Sigma_x B + sigma_e^2 I) c = mu` with
/// `B = 2 Re{G'G}`, solved in the symmetric form
/// `I + (rho / sigma_e^2) S B S`, `S = Sigma_x^{1/2}`.
pub fn wl_weight(
    rule: FusionRule,
    g: &DMatrix<Complex64>,
    rho: f64,
    sigma_e2: f64,
    sigma_x: &[f64],
    mu: &[f64],
) -> Result<CombinerWeight> {
    if rule.family() != RuleFamily::WidelyLinear {
        return Err(Error::Config(format!("{rule} is not a widely linear rule")));
    }
    let k = g.ncols();
    if sigma_x.len() != k || mu.len() != k {
        return Err(Error::Dimension(format!(
            "{k} channel columns, {} variances, {} mean shifts",
            sigma_x.len(),
            mu.len()
        )));
    }
    if mu.iter().all(|m| *m == 0.0) {
        return Err(Error::DegenerateWeight(format!(
            "{rule}: local detection and false-alarm probabilities coincide"
        )));
    }
    let c = wl_direction(&augmented_gram(g), rho, sigma_e2, sigma_x, mu)?;
    let c = DVector::from_iterator(k, c.iter().map(|v| Complex64::new(*v, 0.0)));
    CombinerWeight::new(rule, g * c)
}

/// Solves `(rho Sigma_x B + sigma2 I) c = mu` for `c`.
pub(crate) fn wl_direction(
    b: &DMatrix<f64>,
    rho: f64,
    sigma2: f64,
    sigma_x: &[f64],
    mu: &[f64],
) -> Result<DVector<f64>> {
    let k = b.nrows();
    let s = DVector::from_iterator(k, sigma_x.iter().map(|v| v.max(0.0).sqrt()));
    let r = rho / sigma2;
    let mut m = DMatrix::from_fn(k, k, |i, j| r * s[i] * b[(i, j)] * s[j]);
    for i in 0..k {
        m[(i, i)] += 1.0;
    }
    // The smallest eigenvalue is at least one, so the trace bounds the
    // condition number.
    if m.trace() > CONDITION_WARN && !CONDITION_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!("WL system condition number may exceed {CONDITION_WARN:e}");
    }
    let mu = DVector::from_column_slice(mu);
    let rhs = (b * &mu).component_mul(&s);
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::DegenerateWeight("WL system is not positive definite".into()))?;
    let t = chol.solve(&rhs);
    Ok((mu - t.component_mul(&s) * r) / sigma2)
}

/// `G 1`, `G D_g^{-1} 1`, `G_tr 1` or `G_tr A_tr^{-1} 1`.
pub fn mrc_family_weight(
    rule: FusionRule,
    g: &DMatrix<Complex64>,
    g_tr: &DMatrix<Complex64>,
    d_g: &[f64],
    a_tr: &[f64],
) -> Result<CombinerWeight> {
    let (m, scale): (&DMatrix<Complex64>, Option<&[f64]>) = match rule {
        FusionRule::Mrc => (g, None),
        FusionRule::Mmrc => (g, Some(d_g)),
        FusionRule::TrMrc => (g_tr, None),
        FusionRule::TrMmrc => (g_tr, Some(a_tr)),
        _ => return Err(Error::Config(format!("{rule} is not an MRC-family rule"))),
    };
    if let Some(d) = scale {
        if d.len() != m.ncols() {
            return Err(Error::Dimension("diagonal length differs from K".into()));
        }
        if let Some(k) = d.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::Config(format!(
                "{rule}: diagonal entry {k} is zero (delay-profile tap at the referenced index vanishes)"
            )));
        }
    }
    let coef = DVector::from_fn(m.ncols(), |k, _| {
        Complex64::new(scale.map_or(1.0, |d| 1.0 / d[k]), 0.0)
    });
    CombinerWeight::new(rule, m * coef)
}

/// Weight of any linear rule for one subcarrier channel.
pub fn weight_for(
    rule: FusionRule,
    ch: &SubcarrierChannel,
    rho: f64,
    sigma_e2: f64,
    sigma_x: &[f64],
    mu: &[f64],
) -> Result<CombinerWeight> {
    match rule.family() {
        RuleFamily::WidelyLinear => {
            let g = if rule.is_time_reversed() { &ch.g_tr } else { &ch.g };
            wl_weight(rule, g, rho, sigma_e2, sigma_x, mu)
        }
        RuleFamily::MaximalRatio => mrc_family_weight(rule, &ch.g, &ch.g_tr, &ch.d_g, &ch.a_tr),
        RuleFamily::Optimum => Err(Error::Capability("the optimum rule has no linear combiner".into())),
    }
}

/// A fusion statistic evaluated on one received vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticValue {
    /// Noise-normalized statistic compared against thresholds.
    pub gamma_wb: f64,
    /// `Re{a'y}` for the MRC family, `2 Re{a'y}` for the WL family.
    pub raw: f64,
    pub sigma_e: f64,
}

pub fn linear_statistic(
    w: &CombinerWeight,
    y: &DVector<Complex64>,
    sigma_e: f64,
) -> Result<StatisticValue> {
    if y.len() != w.a.len() {
        return Err(Error::Index {
            what: "received vector length",
            index: y.len(),
            limit: w.a.len(),
        });
    }
    let re = w.a.dotc(y).re;
    Ok(match w.rule.family() {
        RuleFamily::WidelyLinear => StatisticValue {
            gamma_wb: 2.0 * re / sigma_e,
            raw: 2.0 * re,
            sigma_e,
        },
        _ => StatisticValue {
            gamma_wb: std::f64::consts::SQRT_2 * re / (sigma_e * w.norm),
            raw: re,
            sigma_e,
        },
    })
}

/// Deflection `(E{T|H1} - E{T|H0})^2 / V{T|H_i}` of `T = Re{a'y}` given the
/// channel, with the decision covariance `sigma_x` of hypothesis `i`.
pub fn deflection(
    w: &CombinerWeight,
    g: &DMatrix<Complex64>,
    rho: f64,
    sigma_e2: f64,
    sigma_x: &[f64],
    mu: &[f64],
) -> f64 {
    let b: Vec<f64> = (g.adjoint() * &w.a).iter().map(|v| 2.0 * v.re).collect();
    let shift: f64 = b.iter().zip(mu).map(|(b, m)| b * m).sum();
    if shift == 0.0 {
        return 0.0;
    }
    let signal: f64 = b.iter().zip(sigma_x).map(|(b, s)| b * b * s).sum();
    let noise = 2.0 * sigma_e2 * w.a.norm_squared();
    rho * shift * shift / (rho * signal + noise)
}

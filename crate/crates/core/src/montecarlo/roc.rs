use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::{decide_h1, FusionRule};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub gamma: f64,
    pub pf0: f64,
    pub pd0: f64,
    pub pf0_halfwidth: f64,
    pub pd0_halfwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocMeta {
    pub l: usize,
    pub num_antennas: usize,
    pub num_sus: usize,
    pub num_subcarriers: usize,
    pub num_taps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub rule: FusionRule,
    pub meta: RocMeta,
    /// Sorted by `pf0`, then `pd0`.
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub auc_se: f64,
}

/// Wilson score interval of `successes / n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn wilson_halfwidth(successes: u64, n: u64) -> f64 {
    let (lo, hi) = wilson_interval(successes, n, Z_95);
    0.5 * (hi - lo)
}

/// `num_points` empirical quantiles of the pooled samples plus `extra`
/// thresholds and `+-inf`, sorted and deduplicated.
pub fn threshold_grid(h0: &[f64], h1: &[f64], num_points: usize, extra: &[f64]) -> Vec<f64> {
    let mut pooled: Vec<f64> = h0.iter().chain(h1).copied().filter(|v| v.is_finite()).collect();
    pooled.sort_by(f64::total_cmp);
    let mut grid = vec![f64::NEG_INFINITY, f64::INFINITY];
    grid.extend_from_slice(extra);
    if !pooled.is_empty() && num_points > 0 {
        let last = pooled.len() - 1;
        for i in 0..num_points {
            let q = if num_points == 1 { 0.5 } else { i as f64 / (num_points - 1) as f64 };
            grid.push(pooled[(q * last as f64).round() as usize]);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn count_at_least(sorted: &[f64], gamma: f64) -> u64 {
    (sorted.len() - sorted.partition_point(|v| !decide_h1(*v, gamma))) as u64
}

/// Empirical ROC of one rule over `thresholds`.
pub fn estimate_roc(
    rule: FusionRule,
    meta: RocMeta,
    h0: &[f64],
    h1: &[f64],
    thresholds: &[f64],
) -> Result<RocCurve> {
    if h0.is_empty() || h1.is_empty() {
        return Err(Error::config("ROC estimation needs samples under both hypotheses"));
    }
    let mut s0 = h0.to_vec();
    let mut s1 = h1.to_vec();
    s0.sort_by(f64::total_cmp);
    s1.sort_by(f64::total_cmp);
    let (n0, n1) = (s0.len() as u64, s1.len() as u64);
    let mut points: Vec<RocPoint> = thresholds
        .iter()
        .map(|&gamma| {
            let f = count_at_least(&s0, gamma);
            let d = count_at_least(&s1, gamma);
            RocPoint {
                gamma,
                pf0: f as f64 / n0 as f64,
                pd0: d as f64 / n1 as f64,
                pf0_halfwidth: wilson_halfwidth(f, n0),
                pd0_halfwidth: wilson_halfwidth(d, n1),
            }
        })
        .collect();
    points.sort_by(|a, b| a.pf0.total_cmp(&b.pf0).then(a.pd0.total_cmp(&b.pd0)));
    let (auc, auc_se) = auc_mann_whitney(h0, h1);
    Ok(RocCurve {
        rule,
        meta,
        points,
        auc,
        auc_se,
    })
}

/// `P(T1 > T0) + P(T1 = T0) / 2` from average ranks, with the
/// Hanley-McNeil standard error.
pub fn auc_mann_whitney(h0: &[f64], h1: &[f64]) -> (f64, f64) {
    let (n0, n1) = (h0.len(), h1.len());
    if n0 == 0 || n1 == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut all: Vec<(f64, bool)> = h0.iter().map(|v| (*v, false)).chain(h1.iter().map(|v| (*v, true))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += avg * all[i..=j].iter().filter(|(_, is1)| *is1).count() as f64;
        i = j + 1;
    }
    let (m0, m1) = (n0 as f64, n1 as f64);
    let auc = (rank_sum - m1 * (m1 + 1.0) / 2.0) / (m0 * m1);
    let q1 = auc / (2.0 - auc);
    let q2 = 2.0 * auc * auc / (1.0 + auc);
    let var = (auc * (1.0 - auc) + (m1 - 1.0) * (q1 - auc * auc) + (m0 - 1.0) * (q2 - auc * auc)) / (m0 * m1);
    (auc, var.max(0.0).sqrt())
}

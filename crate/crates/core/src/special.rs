//! Scalar special functions: Gaussian tail and its inverse, log-sum-exp.

use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::SQRT_2;

/// Smallest tail probability accepted by [`q_inv`] before clamping.
pub const Q_INV_MIN: f64 = 1e-8;
/// Largest tail probability accepted by [`q_inv`] before clamping.
pub const Q_INV_MAX: f64 = 1.0 - 1e-8;

/// Standard normal complementary CDF, `Q(x) = P(Z > x)`.
#[inline]
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Standard normal CDF.
#[inline]
pub fn phi(x: f64) -> f64 {
    q_func(-x)
}

/// Inverse of [`q_func`]. Arguments outside `[1e-8, 1 - 1e-8]` are clamped
/// into that range and a warning is logged.
pub fn q_inv(p: f64) -> f64 {
    let clamped = if p.is_nan() {
        log::warn!("q_inv called with NaN, using 0.5");
        0.5
    } else if p < Q_INV_MIN {
        log::warn!("q_inv target {p} below {Q_INV_MIN}, clamped");
        Q_INV_MIN
    } else if p > Q_INV_MAX {
        log::warn!("q_inv target {p} above {Q_INV_MAX}, clamped");
        Q_INV_MAX
    } else {
        p
    };
    let x = SQRT_2 * erfc_inv(2.0 * clamped);
    // One Newton step on Q(x) = p tightens the library inverse.
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    x + (q_func(x) - clamped) / pdf
}

/// `ln(sum(exp(x_i)))` without overflow. Empty input and all `-inf` inputs
/// return `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

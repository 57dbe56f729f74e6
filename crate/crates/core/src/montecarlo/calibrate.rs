use crate::error::{Error, Result};

/// Empirical `(1 - target)`-quantile of the H0 samples: the order statistic
/// at `floor((1 - target)(n - 1))`.
pub fn calibrate_threshold(h0: &[f64], target: f64) -> Result<f64> {
    let s = checked_sorted(h0, target)?;
    Ok(s[((1.0 - target) * (s.len() - 1) as f64).floor() as usize])
}

/// Smallest threshold whose empirical false-alarm rate on `h0` does not
/// exceed `target`.
pub fn cap_threshold(h0: &[f64], target: f64) -> Result<f64> {
    let s = checked_sorted(h0, target)?;
    let n = s.len();
    let allowed = (target * n as f64).floor() as usize;
    if allowed >= n {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(next_up(s[n - allowed - 1]))
}

fn checked_sorted(h0: &[f64], target: f64) -> Result<Vec<f64>> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::config(format!("target P_F0 must lie in (0, 1], got {target}")));
    }
    let n = h0.len();
    if n == 0 || target < 10.0 / n as f64 {
        return Err(Error::Precision(format!(
            "target P_F0 = {target} needs at least {} H0 trials, got {n}",
            (10.0 / target).ceil()
        )));
    }
    let mut s = h0.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

/// Empirical fraction of samples at or above `gamma`.
pub fn exceedance(samples: &[f64], gamma: f64) -> f64 {
    samples.iter().filter(|v| crate::fusion::decide_h1(**v, gamma)).count() as f64 / samples.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_examples() {
        let h0: Vec<f64> = (0..1001).map(f64::from).rev().collect();
        assert_eq!(calibrate_threshold(&h0, 0.5).unwrap(), 500.0);
        assert_eq!(calibrate_threshold(&h0, 1.0).unwrap(), 0.0);
        assert_eq!(calibrate_threshold(&h0, 0.05).unwrap(), 950.0);
    }

    #[test]
    fn cap_respects_target() {
        let h0: Vec<f64> = (0..1000).map(f64::from).collect();
        let g = cap_threshold(&h0, 0.05).unwrap();
        assert_eq!(exceedance(&h0, g), 0.05);
        let ties = vec![1.0; 500];
        assert_eq!(exceedance(&ties, cap_threshold(&ties, 0.1).unwrap()), 0.0);
        assert_eq!(cap_threshold(&ties, 1.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn too_few_trials() {
        assert!(matches!(calibrate_threshold(&[0.0; 100], 0.01), Err(Error::Precision(_))));
        assert!(calibrate_threshold(&[0.0; 100], 0.0).is_err());
    }
}

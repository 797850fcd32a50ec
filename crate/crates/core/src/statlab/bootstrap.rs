use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Percentile bootstrap interval for the mean.
///
/// Resample `i` draws from its own ChaCha stream `(seed, i)`, so the result is
/// independent of thread scheduling.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, level: f64, seed: u64) -> Result<BootstrapResult> {
    if values.is_empty() {
        return Err(Error::validation("bootstrap needs at least one value"));
    }
    if resamples < 100 {
        return Err(Error::validation(format!("bootstrap needs at least 100 resamples, got {resamples}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::validation(format!("confidence level must be in (0, 1), got {level}")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::validation(format!("bootstrap input contains {v}")));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut means: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    let lo = quantile_sorted(&means, alpha);
    let hi = quantile_sorted(&means, 1.0 - alpha);
    Ok(BootstrapResult { mean, ci_low: lo.min(mean), ci_high: hi.max(mean), level, resamples, seed })
}

/// Linear interpolation between order statistics (`(n - 1) q` positions).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_values_give_a_point_interval() {
        let r = bootstrap_mean_ci(&[21.0; 40], 500, 0.95, 1).unwrap();
        assert_eq!((r.mean, r.ci_low, r.ci_high), (21.0, 21.0, 21.0));
    }

    #[test]
    fn deterministic_under_seed() {
        let v: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(bootstrap_mean_ci(&v, 1000, 0.9, 7).unwrap(), bootstrap_mean_ci(&v, 1000, 0.9, 7).unwrap());
        assert_ne!(bootstrap_mean_ci(&v, 1000, 0.9, 7).unwrap(), bootstrap_mean_ci(&v, 1000, 0.9, 8).unwrap());
    }

    #[test]
    fn argument_checks() {
        assert!(bootstrap_mean_ci(&[], 1000, 0.95, 0).is_err());
        assert!(bootstrap_mean_ci(&[1.0], 99, 0.95, 0).is_err());
        assert!(bootstrap_mean_ci(&[1.0], 100, 1.0, 0).is_err());
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [0.0, 10.0, 20.0];
        assert_eq!(quantile_sorted(&s, 0.25), 5.0);
        assert_eq!(quantile_sorted(&s, 1.0), 20.0);
    }
}

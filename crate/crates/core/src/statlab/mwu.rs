use std::cmp::Ordering;

use libm::erfc;

use super::TestResult;
use crate::error::{Error, Result};

/// Largest `n * m` for which the exact null distribution is enumerated.
const EXACT_LIMIT: usize = 400;

/// Two-sided Mann-Whitney U test. The statistic is `U_x`: the number of pairs
/// with `x_i > y_j`, counting ties as one half.
pub fn mann_whitney_u<T: PartialOrd + Copy>(x: &[T], y: &[T]) -> Result<TestResult> {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return Err(Error::validation("Mann-Whitney needs two non-empty samples"));
    }
    let mut pooled: Vec<(T, bool)> = x.iter().map(|&v| (v, true)).chain(y.iter().map(|&v| (v, false))).collect();
    if pooled.iter().any(|(v, _)| v.partial_cmp(v).is_none()) {
        return Err(Error::validation("Mann-Whitney samples contain unordered values (NaN)"));
    }
    pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    let total = n + m;
    let mut rank_sum_x = 0.0;
    let mut tie_term = 0.0;
    let mut ties = false;
    let mut i = 0;
    while i < total {
        let mut j = i + 1;
        while j < total && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i) as f64;
        let midrank = (i + j + 1) as f64 / 2.0;
        if j - i > 1 {
            ties = true;
            tie_term += t * t * t - t;
        }
        rank_sum_x += midrank * pooled[i..j].iter().filter(|p| p.1).count() as f64;
        i = j;
    }
    let (nf, mf) = (n as f64, m as f64);
    let u_x = rank_sum_x - nf * (nf + 1.0) / 2.0;
    let u_y = nf * mf - u_x;
    let mean = nf * mf / 2.0;

    let result = if n * m <= EXACT_LIMIT && !ties {
        let dist = exact_u_distribution(n, m);
        let total: f64 = dist.iter().sum();
        let k = u_x.round() as usize;
        let lower: f64 = dist[..=k].iter().sum::<f64>() / total;
        let upper: f64 = dist[k..].iter().sum::<f64>() / total;
        TestResult::new("mann-whitney-u exact", u_x, (2.0 * lower.min(upper)).min(1.0))
    } else {
        let var = nf * mf / 12.0 * ((total as f64 + 1.0) - tie_term / (total as f64 * (total as f64 - 1.0)));
        let (z, p) = if var > 0.0 {
            let z = ((u_x - mean).abs() - 0.5) / var.sqrt();
            (z, erfc(z / std::f64::consts::SQRT_2))
        } else {
            (0.0, 1.0)
        };
        TestResult::new("mann-whitney-u normal", u_x, p.min(1.0)).detail("z", z)
    };
    Ok(result.detail("u_x", u_x).detail("u_y", u_y).detail("n", nf).detail("m", mf))
}

/// Number of orderings of `n` x-values and `m` y-values giving each `U_x` in `0..=n*m`.
pub fn exact_u_distribution(n: usize, m: usize) -> Vec<f64> {
    // counts[j][u]: arrangements of i x-values and j y-values with U_x = u,
    // built up one x-value at a time.
    let mut counts: Vec<Vec<f64>> = (0..=m).map(|_| vec![1.0]).collect();
    for i in 1..=n {
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        next.push(vec![1.0]);
        for j in 1..=m {
            let mut row = vec![0.0; i * j + 1];
            // largest element is an x: it beats all j y-values
            for (u, &c) in counts[j].iter().enumerate() {
                row[u + j] += c;
            }
            // largest element is a y
            for (u, &c) in next[j - 1].iter().enumerate() {
                row[u] += c;
            }
            next.push(row);
        }
        counts = next;
    }
    counts.pop().expect("m + 1 rows")
}

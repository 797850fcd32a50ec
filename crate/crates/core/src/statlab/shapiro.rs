//! Shapiro-Wilk W test using Royston's approximations (algorithm AS R94),
//! valid for 3 <= n <= 5000.

use libm::erfc;
use statrs::distribution::{ContinuousCDF, Normal};

use super::TestResult;
use crate::error::{Error, Result};

const SMALL: f64 = 1e-19;

// Polynomial coefficients, lowest order first.
const G: [f64; 2] = [-2.273, 0.459];
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

fn poly(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients `a_1..a_{n/2}` for the lower half of the ordered sample
/// (positive; the upper half is antisymmetric).
fn coefficients(n: usize, std_normal: &Normal) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let an25 = n as f64 + 0.25;
    let m: Vec<f64> = (1..=half).map(|i| std_normal.inverse_cdf((i as f64 - 0.375) / an25)).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    a[0] = a1;
    let (start, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        (2, fac)
    } else {
        (1, ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt())
    };
    for i in start..half {
        a[i] = -m[i] / fac;
    }
    a
}

pub fn shapiro_wilk(values: &[f64]) -> Result<TestResult> {
    let n = values.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::Range(format!("Shapiro-Wilk needs 3 <= n <= 5000, got {n}")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::validation(format!("Shapiro-Wilk input contains {v}")));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range < SMALL {
        return Err(Error::DegenerateSample("all values are identical".into()));
    }

    let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
    let half_a = coefficients(n, &std_normal);
    // full antisymmetric coefficient vector for the ascending sample
    let mut a = vec![0.0; n];
    for (i, &c) in half_a.iter().enumerate() {
        a[i] = -c;
        a[n - 1 - i] = c;
    }

    // W as the squared correlation of a with x, with x scaled by its range.
    let nf = n as f64;
    let mean_a = a.iter().sum::<f64>() / nf;
    let mean_x = x.iter().map(|v| v / range).sum::<f64>() / nf;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (ai, xi) in a.iter().zip(&x) {
        let da = ai - mean_a;
        let dx = xi / range - mean_x;
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    let p = if n == 3 {
        const SIX_OVER_PI: f64 = 1.909_859_317_102_744;
        const PI_OVER_THREE: f64 = 1.047_197_551_196_597_6;
        (SIX_OVER_PI * (w.sqrt().asin() - PI_OVER_THREE)).max(0.0)
    } else {
        let mut y = w1.ln();
        let ln_n = nf.ln();
        let (mean, sd) = if n <= 11 {
            let gamma = poly(&G, nf);
            if y >= gamma {
                return Ok(TestResult::new("shapiro-wilk", w, 1e-99).detail("n", nf));
            }
            y = -(gamma - y).ln();
            (poly(&C3, nf), poly(&C4, nf).exp())
        } else {
            (poly(&C5, ln_n), poly(&C6, ln_n).exp())
        };
        0.5 * erfc((y - mean) / (sd * std::f64::consts::SQRT_2))
    };
    Ok(TestResult::new("shapiro-wilk", w, p).detail("n", nf))
}

use crate::error::{Error, Result};
use crate::scalar::Real;

/// EMA decay of the generator weights in the reference training setup.
pub const DEFAULT_EMA_BETA: f64 = 0.998;
/// R1 weight used for real images in the reference training setup.
pub const DEFAULT_R1_GAMMA: f64 = 8.0;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// `beta * current + (1 - beta) * incoming`, elementwise.
pub fn ema_update<T: Real>(current: &[T], incoming: &[T], beta: T) -> Result<Vec<T>> {
    if current.len() != incoming.len() {
        return Err(Error::validation(format!(
            "EMA vectors differ in length: {} vs {}",
            current.len(),
            incoming.len()
        )));
    }
    if !(beta >= T::zero() && beta <= T::one()) {
        return Err(Error::validation(format!("EMA beta must be in [0, 1], got {beta}")));
    }
    let keep = T::one() - beta;
    Ok(current.iter().zip(incoming).map(|(&c, &x)| beta * c + keep * x).collect())
}

/// R1 gradient penalty `gamma / 2 * mean ||grad f(x)||^2` over `samples`, with the
/// gradient from central differences of step `fd_step`.
pub fn r1_penalty<T, F>(field: F, samples: &[Vec<T>], gamma: T, fd_step: T) -> Result<T>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    if samples.is_empty() {
        return Err(Error::validation("R1 penalty needs at least one sample"));
    }
    if !(fd_step > T::zero()) || !fd_step.finite() {
        return Err(Error::validation("finite-difference step must be positive"));
    }
    let eval = |x: &[T]| {
        let v = field(x);
        if v.finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation(format!("field returned {v} at {x:?}")))
        }
    };
    let two_h = fd_step + fd_step;
    let mut total = T::zero();
    for x in samples {
        eval(x)?;
        let mut probe = x.clone();
        let mut norm_sq = T::zero();
        for i in 0..x.len() {
            probe[i] = x[i] + fd_step;
            let up = eval(&probe)?;
            probe[i] = x[i] - fd_step;
            let down = eval(&probe)?;
            probe[i] = x[i];
            let g = (up - down) / two_h;
            norm_sq += g * g;
        }
        total += norm_sq;
    }
    Ok(gamma / T::of(2.0) * total / T::of_usize(samples.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ema_endpoints_and_one_step() {
        let (c, x) = ([1.0, -2.0], [0.0, 4.0]);
        assert_eq!(ema_update(&c, &x, 1.0).unwrap(), c.to_vec());
        assert_eq!(ema_update(&c, &x, 0.0).unwrap(), x.to_vec());
        assert!((ema_update(&[1.0], &[0.0], DEFAULT_EMA_BETA).unwrap()[0] - 0.998).abs() < 1e-15);
        assert!(ema_update(&[1.0], &[0.0, 1.0], 0.5).is_err());
        assert!(ema_update(&[1.0], &[0.0], 1.5).is_err());
    }

    #[test]
    fn constant_field_has_no_penalty() {
        let p = r1_penalty(|_: &[f64]| 3.0, &[vec![0.1, 0.2], vec![5.0, -1.0]], 8.0, 1e-4).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn non_finite_field_is_an_error() {
        let r = r1_penalty(|x: &[f64]| 1.0 / x[0], &[vec![0.0]], 8.0, 1e-4);
        assert!(matches!(r, Err(Error::Evaluation(_))));
        assert!(r1_penalty(|x: &[f64]| x[0], &[], 8.0, 1e-4).is_err());
        assert!(r1_penalty(|x: &[f64]| x[0], &[vec![0.0]], 8.0, 0.0).is_err());
    }
}

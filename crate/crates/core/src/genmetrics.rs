//! Distribution distances between real and synthetic feature sets.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{gaussian_summary, FeatureMatrix, GaussianSummary};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute eigenvalue tolerance separating roundoff from a non-PSD input.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Squared Frechet distance between two Gaussians.
///
/// The trace of `(Sa Sb)^{1/2}` is taken from the eigenvalues of the symmetric
/// product `Sa^{1/2} Sb Sa^{1/2}`.
pub fn frechet_distance<T: Real>(a: &GaussianSummary<T>, b: &GaussianSummary<T>) -> Result<T> {
    if a.d() != b.d() || a.sigma.nrows() != a.d() || b.sigma.nrows() != b.d() {
        return Err(Error::validation(format!("dimension mismatch: {} vs {}", a.d(), b.d())));
    }
    let diff = &a.mu - &b.mu;
    let mean_term = diff.dot(&diff);

    let sqrt_a = psd_sqrt(&a.sigma)?;
    check_psd(&b.sigma)?;
    let product = symmetrize(&sqrt_a * &b.sigma * &sqrt_a);
    let eig = clamped_eigenvalues(&product)?;
    let cross = eig.iter().fold(T::zero(), |acc, &l| acc + l.sqrt());

    let value = mean_term + a.sigma.trace() + b.sigma.trace() - T::of(2.0) * cross;
    if value.f64() < -1e-6 {
        return Err(Error::Evaluation(format!("Frechet distance came out negative ({value})")));
    }
    Ok(if value > T::zero() { value } else { T::zero() })
}

/// FID over two feature sets: Gaussian summaries followed by [`frechet_distance`].
pub fn fid<T: Real>(real: &FeatureMatrix<T>, synth: &FeatureMatrix<T>) -> Result<T> {
    if real.d() != synth.d() {
        return Err(Error::validation(format!("feature dimension mismatch: {} vs {}", real.d(), synth.d())));
    }
    frechet_distance(&gaussian_summary(real)?, &gaussian_summary(synth)?)
}

/// Eigenvalues within this distance of zero are roundoff and are set to zero,
/// so their square roots do not accumulate on rank-deficient covariances.
fn roundoff_floor<T: Real>(m: &DMatrix<T>) -> f64 {
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.f64().abs()));
    64.0 * T::default_epsilon().f64() * scale * m.nrows() as f64
}

fn symmetrize<T: Real>(m: DMatrix<T>) -> DMatrix<T> {
    (&m + m.transpose()) * T::of(0.5)
}

/// Eigenvalues of a symmetric PSD matrix with roundoff snapped to zero.
fn clamped_eigen<T: Real>(m: &DMatrix<T>) -> Result<SymmetricEigen<T, nalgebra::Dyn>> {
    let floor = roundoff_floor(m);
    let tol = PSD_TOLERANCE.max(floor);
    let mut eig = SymmetricEigen::new(m.clone());
    for l in eig.eigenvalues.iter_mut() {
        if l.f64() < -tol {
            return Err(Error::NonPsd { eigenvalue: l.f64() });
        }
        if l.f64() <= floor {
            *l = T::zero();
        }
    }
    Ok(eig)
}

fn clamped_eigenvalues<T: Real>(m: &DMatrix<T>) -> Result<Vec<T>> {
    Ok(clamped_eigen(m)?.eigenvalues.iter().copied().collect())
}

fn check_psd<T: Real>(m: &DMatrix<T>) -> Result<()> {
    clamped_eigenvalues(&symmetrize(m.clone())).map(|_| ())
}

/// Symmetric square root of a PSD matrix.
pub fn psd_sqrt<T: Real>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    let eig = clamped_eigen(&symmetrize(m.clone()))?;
    let roots = eig.eigenvalues.map(|l| l.sqrt());
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KidConfig {
    pub block_size: usize,
    pub degree: i32,
    pub coef: f64,
    /// When set, both sets are shuffled with this seed before blocking.
    pub shuffle_seed: Option<u64>,
}

impl Default for KidConfig {
    fn default() -> Self {
        Self { block_size: 100, degree: 3, coef: 1.0, shuffle_seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KidEstimate<T> {
    pub estimate: T,
    pub std_error: T,
    pub blocks: usize,
    pub block_size: usize,
}

/// Polynomial kernel `(<x, y> / d + coef)^degree`.
#[inline]
pub fn poly_kernel<T: Real>(x: &[T], y: &[T], coef: T, degree: i32) -> T {
    let dot = x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    (dot / T::of_usize(x.len()) + coef).powi(degree)
}

/// Unbiased MMD^2 between two equally sized blocks.
///
/// Kernel values are accumulated relative to `k(x_0, y_0)`; the offset cancels
/// algebraically and makes constant inputs give exactly zero.
pub fn mmd2_unbiased<T: Real>(x: &[&[T]], y: &[&[T]], coef: T, degree: i32) -> T {
    let b = x.len();
    let offset = poly_kernel(x[0], y[0], coef, degree);
    let k = |a: &[T], c: &[T]| poly_kernel(a, c, coef, degree) - offset;
    let within = |s: &[&[T]]| {
        let mut sum = T::zero();
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                sum += k(s[i], s[j]);
            }
        }
        sum + sum
    };
    let mut cross = T::zero();
    for xi in x {
        for yj in y {
            cross += k(xi, yj);
        }
    }
    let pairs = T::of_usize(b * (b - 1));
    let (kxx, kyy) = (within(x) / pairs, within(y) / pairs);
    kxx + kyy - T::of(2.0) * cross / T::of_usize(b * b)
}

pub fn kid<T: Real>(real: &FeatureMatrix<T>, synth: &FeatureMatrix<T>, cfg: &KidConfig) -> Result<KidEstimate<T>> {
    if real.d() != synth.d() {
        return Err(Error::validation(format!("feature dimension mismatch: {} vs {}", real.d(), synth.d())));
    }
    if cfg.block_size < 2 {
        return Err(Error::validation("KID block size must be at least 2"));
    }
    let smallest = real.n().min(synth.n());
    if smallest < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: smallest });
    }
    let (block_size, blocks) = if smallest < cfg.block_size {
        (smallest, 1)
    } else {
        (cfg.block_size, (real.n() / cfg.block_size).min(synth.n() / cfg.block_size))
    };
    let order = |n: usize| {
        let mut idx: Vec<usize> = (0..n).collect();
        if let Some(seed) = cfg.shuffle_seed {
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        idx
    };
    let (real_idx, synth_idx) = (order(real.n()), order(synth.n()));
    let coef = T::of(cfg.coef);
    let estimates: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let span = k * block_size..(k + 1) * block_size;
            let x: Vec<&[T]> = real_idx[span.clone()].iter().map(|&i| real.row(i)).collect();
            let y: Vec<&[T]> = synth_idx[span].iter().map(|&i| synth.row(i)).collect();
            mmd2_unbiased(&x, &y, coef, cfg.degree)
        })
        .collect();
    let count = T::of_usize(blocks);
    let estimate = estimates.iter().fold(T::zero(), |acc, &v| acc + v) / count;
    let std_error = if blocks > 1 {
        let ss = estimates.iter().fold(T::zero(), |acc, &v| acc + (v - estimate) * (v - estimate));
        (ss / T::of_usize(blocks - 1)).sqrt() / count.sqrt()
    } else {
        T::zero()
    };
    Ok(KidEstimate { estimate, std_error, blocks, block_size })
}

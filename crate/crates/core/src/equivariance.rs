//! EQ-T / EQ-R: how closely an image operator commutes with translations and
//! rotations, reported as the PSNR of the commutator residual.
//!
//! Squared residuals are pooled over every (image, transform) pair before the
//! single PSNR conversion.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::psnr::psnr_from_mse;
use crate::scalar::Real;
use crate::transform::{apply_transform, central_disk_mask, TransformSpec};

/// A pure, shape-preserving image-to-image map.
pub trait ImageOperator<T: Real>: Sync {
    fn apply(&self, img: &ImageBuffer<T>) -> ImageBuffer<T>;
}

impl<T: Real, F> ImageOperator<T> for F
where
    F: Fn(&ImageBuffer<T>) -> ImageBuffer<T> + Sync,
{
    fn apply(&self, img: &ImageBuffer<T>) -> ImageBuffer<T> {
        self(img)
    }
}

/// Operators selectable by name from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BuiltinOperator {
    Identity,
    /// `v -> v^g`
    Gamma(f64),
    /// Circular box blur over a `(2r+1)^2` window.
    Blur(usize),
    /// Zeroes the right half of the image.
    MaskLeftHalf,
}

impl FromStr for BuiltinOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation(format!("unknown operator {s:?}; expected identity, gamma:<g>, blur:<radius> or mask-left-half"));
        match s.split_once(':') {
            None if s == "identity" => Ok(Self::Identity),
            None if s == "mask-left-half" => Ok(Self::MaskLeftHalf),
            Some(("gamma", g)) => {
                let g: f64 = g.parse().map_err(|_| bad())?;
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::validation("gamma operator needs a positive exponent"));
                }
                Ok(Self::Gamma(g))
            }
            Some(("blur", r)) => Ok(Self::Blur(r.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BuiltinOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => f.write_str("identity"),
            Self::Gamma(g) => write!(f, "gamma:{g}"),
            Self::Blur(r) => write!(f, "blur:{r}"),
            Self::MaskLeftHalf => f.write_str("mask-left-half"),
        }
    }
}

impl<T: Real> ImageOperator<T> for BuiltinOperator {
    fn apply(&self, img: &ImageBuffer<T>) -> ImageBuffer<T> {
        match *self {
            Self::Identity => img.clone(),
            Self::Gamma(g) => {
                let g = T::of(g);
                img.map(|v| v.powf(g))
            }
            Self::Blur(r) => circular_box_blur(img, r),
            Self::MaskLeftHalf => {
                let (w, c) = (img.width(), img.channels().count());
                let half = w / 2;
                let pixels = img
                    .pixels()
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| if (i / c) % w < half { v } else { T::zero() })
                    .collect();
                ImageBuffer::new(w, img.height(), img.channels(), pixels).expect("masking keeps shape")
            }
        }
    }
}

/// Circular convolution with a normalised `(2r+1)^2` box kernel.
pub fn circular_box_blur<T: Real>(img: &ImageBuffer<T>, radius: usize) -> ImageBuffer<T> {
    let (w, h, c) = (img.width() as i64, img.height() as i64, img.channels().count());
    let r = radius as i64;
    let weight = T::one() / T::of(((2 * r + 1) * (2 * r + 1)) as f64);
    let mut pixels = Vec::with_capacity(img.pixels().len());
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let mut acc = T::zero();
                for oy in -r..=r {
                    let sy = (y + oy).rem_euclid(h) as usize;
                    for ox in -r..=r {
                        let sx = (x + ox).rem_euclid(w) as usize;
                        acc += img.get(sx, sy, ch);
                    }
                }
                pixels.push(acc * weight);
            }
        }
    }
    ImageBuffer::from_clamped(w as usize, h as usize, img.channels(), pixels).expect("blur keeps shape")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Translation,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationSet {
    /// Uniform over 90, 180 and 270 degrees.
    Exact90,
    /// Uniform over `[0, 360)` degrees.
    AnyAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceConfig {
    pub num_transforms: usize,
    /// `None` means one eighth of the image side.
    pub max_translate: Option<usize>,
    pub rotation_set: RotationSet,
    pub seed: u64,
    pub psnr_cap_db: f64,
    /// Restricts rotation residuals to the inscribed disk.
    pub mask_central_disk: bool,
}

impl Default for EquivarianceConfig {
    fn default() -> Self {
        Self {
            num_transforms: 64,
            max_translate: None,
            rotation_set: RotationSet::Exact90,
            seed: 0,
            psnr_cap_db: 100.0,
            mask_central_disk: true,
        }
    }
}

impl EquivarianceConfig {
    pub fn max_translate_for(&self, side: usize) -> usize {
        self.max_translate.unwrap_or(side / 8)
    }
}

/// Transforms drawn for one evaluation. The list for `k` transforms is a prefix
/// of the list for any larger count with the same seed.
pub fn sample_transforms(family: Family, cfg: &EquivarianceConfig, side: usize) -> Result<Vec<TransformSpec>> {
    if cfg.num_transforms == 0 {
        return Err(Error::validation("num_transforms must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match family {
        Family::Translation => {
            let m = cfg.max_translate_for(side);
            if m == 0 || m >= side {
                return Err(Error::validation(format!(
                    "max_translate must be in [1, {}), got {m}",
                    side
                )));
            }
            let m = m as i64;
            Ok((0..cfg.num_transforms)
                .map(|_| loop {
                    let (dx, dy) = (rng.random_range(-m..=m), rng.random_range(-m..=m));
                    if (dx, dy) != (0, 0) {
                        break TransformSpec::translation(dx, dy);
                    }
                })
                .collect())
        }
        Family::Rotation => Ok((0..cfg.num_transforms)
            .map(|_| match cfg.rotation_set {
                RotationSet::Exact90 => TransformSpec::rotation(90.0 * rng.random_range(1..=3) as f64),
                RotationSet::AnyAngle => TransformSpec::rotation(rng.random_range(0.0..360.0)),
            })
            .collect()),
    }
}

pub fn eq_score<T: Real, Op: ImageOperator<T> + ?Sized>(
    op: &Op,
    images: &[ImageBuffer<T>],
    family: Family,
    cfg: &EquivarianceConfig,
) -> Result<T> {
    let first = images.first().ok_or_else(|| Error::validation("equivariance needs at least one image"))?;
    if images.iter().any(|img| !img.same_shape(first)) {
        return Err(Error::validation("equivariance images must share one size and channel layout"));
    }
    if family == Family::Rotation && !first.is_square() {
        return Err(Error::validation(format!(
            "rotation equivariance needs square images, got {}x{}",
            first.width(),
            first.height()
        )));
    }
    if !(cfg.psnr_cap_db > 0.0 && cfg.psnr_cap_db.is_finite()) {
        return Err(Error::validation("psnr cap must be positive"));
    }
    let transforms = sample_transforms(family, cfg, first.width().min(first.height()))?;
    let mask = (family == Family::Rotation && cfg.mask_central_disk)
        .then(|| central_disk_mask(first.width(), first.height()));

    let per_image: Vec<(f64, usize)> = images
        .par_iter()
        .map(|img| {
            let op_img = checked_apply(op, img)?;
            let mut sum = 0.0;
            let mut count = 0;
            for t in &transforms {
                let lhs = checked_apply(op, &apply_transform(img, t)?)?;
                let rhs = apply_transform(&op_img, t)?;
                let (s, n) = residual(&lhs, &rhs, mask.as_deref());
                sum += s;
                count += n;
            }
            Ok((sum, count))
        })
        .collect::<Result<_>>()?;

    let (sum, count) = per_image.iter().fold((0.0, 0usize), |(s, n), &(a, b)| (s + a, n + b));
    if count == 0 {
        return Err(Error::validation("equivariance mask selects no pixels"));
    }
    Ok(T::of(psnr_from_mse(sum / count as f64, cfg.psnr_cap_db)))
}

fn checked_apply<T: Real, Op: ImageOperator<T> + ?Sized>(op: &Op, img: &ImageBuffer<T>) -> Result<ImageBuffer<T>> {
    let out = op.apply(img);
    if !out.same_shape(img) {
        return Err(Error::Contract(format!(
            "operator returned {}x{}x{} for a {}x{}x{} input",
            out.width(),
            out.height(),
            out.channels().count(),
            img.width(),
            img.height(),
            img.channels().count()
        )));
    }
    Ok(out)
}

fn residual<T: Real>(a: &ImageBuffer<T>, b: &ImageBuffer<T>, mask: Option<&[bool]>) -> (f64, usize) {
    let c = a.channels().count();
    let mut sum = 0.0;
    let mut count = 0;
    for (i, (x, y)) in a.pixels().iter().zip(b.pixels()).enumerate() {
        if mask.is_some_and(|m| !m[i / c]) {
            continue;
        }
        let d = x.f64() - y.f64();
        sum += d * d;
        count += 1;
    }
    (sum, count)
}

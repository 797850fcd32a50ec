//! Geometric and photometric transforms.
//!
//! [`apply_transform`] composes the steps in a fixed order: gamma, scale,
//! rotation, horizontal flip, vertical flip, circular translation. Steps at
//! their identity value are skipped, so the identity spec returns a bit-exact
//! copy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{clamp_unit, ImageBuffer};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    /// Circular shift in pixels; positive `dx` moves content right, positive `dy` down.
    pub translate: (i64, i64),
    /// Counter-clockwise as displayed, about the image centre.
    pub rotate_degrees: f64,
    pub flip_horizontal: bool,
    pub flip_vertical: bool,
    /// Zoom about the image centre; values below 1 shrink and fill borders with 0.
    pub scale: f64,
    /// Per-channel power law `v -> v^gamma`.
    pub gamma: f64,
}

impl Default for TransformSpec {
    fn default() -> Self {
        Self::identity()
    }
}

impl TransformSpec {
    pub const fn identity() -> Self {
        Self {
            translate: (0, 0),
            rotate_degrees: 0.0,
            flip_horizontal: false,
            flip_vertical: false,
            scale: 1.0,
            gamma: 1.0,
        }
    }

    pub fn translation(dx: i64, dy: i64) -> Self {
        Self { translate: (dx, dy), ..Self::identity() }
    }

    pub fn rotation(degrees: f64) -> Self {
        Self { rotate_degrees: degrees, ..Self::identity() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rotate_degrees", self.rotate_degrees), ("scale", self.scale), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return Err(Error::validation(format!("transform field {name} is not finite")));
            }
        }
        if self.scale <= 0.0 {
            return Err(Error::validation(format!("scale must be > 0, got {}", self.scale)));
        }
        if self.gamma <= 0.0 {
            return Err(Error::validation(format!("gamma must be > 0, got {}", self.gamma)));
        }
        Ok(())
    }
}

pub fn apply_transform<T: Real>(img: &ImageBuffer<T>, spec: &TransformSpec) -> Result<ImageBuffer<T>> {
    spec.validate()?;
    let mut out = img.clone();
    if spec.gamma != 1.0 {
        let g = T::of(spec.gamma);
        out = out.map(|v| v.powf(g));
    }
    if spec.scale != 1.0 {
        out = scale(&out, spec.scale);
    }
    let turns = spec.rotate_degrees.rem_euclid(360.0);
    if turns != 0.0 {
        out = rotate(&out, turns);
    }
    if spec.flip_horizontal {
        out = flip_horizontal(&out);
    }
    if spec.flip_vertical {
        out = flip_vertical(&out);
    }
    if spec.translate != (0, 0) {
        out = translate(&out, spec.translate.0, spec.translate.1);
    }
    Ok(out)
}

fn remap<T: Real>(img: &ImageBuffer<T>, src: impl Fn(usize, usize) -> (usize, usize)) -> ImageBuffer<T> {
    let (w, h, c) = (img.width(), img.height(), img.channels().count());
    let mut pixels = Vec::with_capacity(w * h * c);
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = src(x, y);
            let base = img.index(sx, sy, 0);
            pixels.extend_from_slice(&img.pixels()[base..base + c]);
        }
    }
    ImageBuffer::from_parts_unchecked(w, h, img.channels(), pixels)
}

pub fn translate<T: Real>(img: &ImageBuffer<T>, dx: i64, dy: i64) -> ImageBuffer<T> {
    let (w, h) = (img.width() as i64, img.height() as i64);
    remap(img, |x, y| (((x as i64 - dx).rem_euclid(w)) as usize, ((y as i64 - dy).rem_euclid(h)) as usize))
}

pub fn flip_horizontal<T: Real>(img: &ImageBuffer<T>) -> ImageBuffer<T> {
    let w = img.width();
    remap(img, |x, y| (w - 1 - x, y))
}

pub fn flip_vertical<T: Real>(img: &ImageBuffer<T>) -> ImageBuffer<T> {
    let h = img.height();
    remap(img, |x, y| (x, h - 1 - y))
}

/// Rotation by `degrees` in `[0, 360)`. Quarter turns on square images (and half
/// turns on any image) are index permutations; everything else is bilinear.
fn rotate<T: Real>(img: &ImageBuffer<T>, degrees: f64) -> ImageBuffer<T> {
    let (w, h) = (img.width(), img.height());
    match degrees {
        180.0 => remap(img, |x, y| (w - 1 - x, h - 1 - y)),
        d if d == 90.0 && w == h => remap(img, |x, y| (w - 1 - y, x)),
        d if d == 270.0 && w == h => remap(img, |x, y| (y, w - 1 - x)),
        d => rotate_bilinear(img, d),
    }
}

/// Bilinear rotation about the centre; taps outside the image read as 0.
pub fn rotate_bilinear<T: Real>(img: &ImageBuffer<T>, degrees: f64) -> ImageBuffer<T> {
    let (sin, cos) = degrees.to_radians().sin_cos();
    let (cx, cy) = (img.width() as f64 / 2.0, img.height() as f64 / 2.0);
    resample(img, |px, py| {
        let (dx, dy) = (px - cx, py - cy);
        (cx + dx * cos - dy * sin, cy + dx * sin + dy * cos)
    })
}

fn scale<T: Real>(img: &ImageBuffer<T>, factor: f64) -> ImageBuffer<T> {
    let (cx, cy) = (img.width() as f64 / 2.0, img.height() as f64 / 2.0);
    resample(img, |px, py| (cx + (px - cx) / factor, cy + (py - cy) / factor))
}

/// Inverse-mapped bilinear resampling. `src` maps an output pixel centre to a
/// source position, both in continuous coordinates where pixel `i` spans `[i, i+1)`.
fn resample<T: Real>(img: &ImageBuffer<T>, src: impl Fn(f64, f64) -> (f64, f64)) -> ImageBuffer<T> {
    let (w, h, c) = (img.width(), img.height(), img.channels().count());
    let tap = |x: i64, y: i64, ch: usize| -> T {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            T::zero()
        } else {
            img.get(x as usize, y as usize, ch)
        }
    };
    let mut pixels = Vec::with_capacity(w * h * c);
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = src(x as f64 + 0.5, y as f64 + 0.5);
            let (sx, sy) = (sx - 0.5, sy - 0.5);
            let (x0, y0) = (sx.floor(), sy.floor());
            let (fx, fy) = (T::of(sx - x0), T::of(sy - y0));
            let (gx, gy) = (T::one() - fx, T::one() - fy);
            let (x0, y0) = (x0 as i64, y0 as i64);
            for ch in 0..c {
                let top = tap(x0, y0, ch) * gx + tap(x0 + 1, y0, ch) * fx;
                let bottom = tap(x0, y0 + 1, ch) * gx + tap(x0 + 1, y0 + 1, ch) * fx;
                pixels.push(clamp_unit(top * gy + bottom * fy));
            }
        }
    }
    ImageBuffer::from_parts_unchecked(w, h, img.channels(), pixels)
}

/// Pixels whose centre lies within the inscribed disk about the image centre.
pub fn central_disk_mask(width: usize, height: usize) -> Vec<bool> {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    let r2 = (width.min(height) as f64 / 2.0).powi(2);
    let mut mask = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            mask.push(dx * dx + dy * dy <= r2);
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Channels;
    use proptest::prelude::*;

    fn ramp(w: usize, h: usize, channels: Channels) -> ImageBuffer<f64> {
        ImageBuffer::from_fn(w, h, channels, |x, y, c| ((x * 13 + y * 7 + c * 5) % 17) as f64 / 16.0).unwrap()
    }

    #[test]
    fn identity_is_bit_exact() {
        let img = ramp(9, 7, Channels::Rgb);
        assert_eq!(apply_transform(&img, &TransformSpec::identity()).unwrap(), img);
    }

    #[test]
    fn constant_image_survives_translation() {
        let img = ImageBuffer::constant(16, 16, Channels::Gray, 0.37f64).unwrap();
        assert_eq!(apply_transform(&img, &TransformSpec::translation(7, -3)).unwrap(), img);
    }

    #[test]
    fn double_flip_is_identity() {
        let img = ramp(6, 5, Channels::Gray);
        let spec = TransformSpec { flip_horizontal: true, ..TransformSpec::identity() };
        let once = apply_transform(&img, &spec).unwrap();
        assert_ne!(once, img);
        assert_eq!(apply_transform(&once, &spec).unwrap(), img);
    }

    #[test]
    fn quarter_turns_compose() {
        let img = ramp(8, 8, Channels::Gray);
        let mut out = img.clone();
        for _ in 0..4 {
            out = apply_transform(&out, &TransformSpec::rotation(90.0)).unwrap();
        }
        assert_eq!(out, img);
        let half = apply_transform(&img, &TransformSpec::rotation(180.0)).unwrap();
        let two_quarters = apply_transform(
            &apply_transform(&img, &TransformSpec::rotation(90.0)).unwrap(),
            &TransformSpec::rotation(90.0),
        )
        .unwrap();
        assert_eq!(half, two_quarters);
        let minus = apply_transform(&img, &TransformSpec::rotation(-90.0)).unwrap();
        assert_eq!(minus, apply_transform(&img, &TransformSpec::rotation(270.0)).unwrap());
    }

    #[test]
    fn permutation_agrees_with_bilinear_at_quarter_turn() {
        let img = ramp(10, 10, Channels::Gray);
        let exact = apply_transform(&img, &TransformSpec::rotation(90.0)).unwrap();
        let interp = rotate_bilinear(&img, 90.0);
        for (a, b) in exact.pixels().iter().zip(interp.pixels()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rotation_direction_is_counter_clockwise() {
        // A bright pixel right of centre moves above centre.
        let img = ImageBuffer::from_fn(4, 4, Channels::Gray, |x, y, _| if (x, y) == (3, 2) { 1.0 } else { 0.0 })
            .unwrap();
        let out = apply_transform(&img, &TransformSpec::rotation(90.0)).unwrap();
        assert_eq!(out.get(2, 0, 0), 1.0);
    }

    #[test]
    fn gamma_and_scale() {
        let img = ImageBuffer::constant(4, 4, Channels::Gray, 0.5f64).unwrap();
        let g = apply_transform(&img, &TransformSpec { gamma: 2.0, ..TransformSpec::identity() }).unwrap();
        assert!(g.pixels().iter().all(|&v| (v - 0.25).abs() < 1e-15));
        let s = apply_transform(&img, &TransformSpec { scale: 0.5, ..TransformSpec::identity() }).unwrap();
        assert_eq!(s.get(0, 0, 0), 0.0);
        assert!((s.get(2, 2, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        let img = ramp(4, 4, Channels::Gray);
        for spec in [
            TransformSpec { scale: 0.0, ..TransformSpec::identity() },
            TransformSpec { gamma: -1.0, ..TransformSpec::identity() },
            TransformSpec { rotate_degrees: f64::NAN, ..TransformSpec::identity() },
            TransformSpec { scale: f64::INFINITY, ..TransformSpec::identity() },
        ] {
            assert!(apply_transform(&img, &spec).is_err());
        }
    }

    #[test]
    fn disk_mask_covers_inscribed_circle() {
        let mask = central_disk_mask(8, 8);
        assert!(!mask[0]);
        assert!(mask[3 * 8 + 3]);
        assert_eq!(mask.iter().filter(|&&m| m).count(), 52);
    }

    proptest! {
        #[test]
        fn translation_round_trips_and_preserves_values(
            w in 1usize..12, h in 1usize..12, dx in -30i64..30, dy in -30i64..30, seed in 0u64..1000,
        ) {
            let img = ImageBuffer::<f64>::from_fn(w, h, Channels::Gray, |x, y, _| {
                ((x as u64 * 31 + y as u64 * 17 + seed) % 97) as f64 / 96.0
            }).unwrap();
            let moved = apply_transform(&img, &TransformSpec::translation(dx, dy)).unwrap();
            let back = apply_transform(&moved, &TransformSpec::translation(-dx, -dy)).unwrap();
            prop_assert_eq!(&back, &img);
            let mut a = img.pixels().to_vec();
            let mut b = moved.pixels().to_vec();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(a, b);
        }
    }
}

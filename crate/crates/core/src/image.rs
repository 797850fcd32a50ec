use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Luma weights used for RGB to grayscale conversion.
pub const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channels {
    Gray,
    Rgb,
}

impl Channels {
    pub fn count(self) -> usize {
        match self {
            Channels::Gray => 1,
            Channels::Rgb => 3,
        }
    }
}

/// Row-major raster with interleaved channels and values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer<T> {
    width: usize,
    height: usize,
    channels: Channels,
    pixels: Vec<T>,
}

impl<T: Real> ImageBuffer<T> {
    /// Builds an image, checking the length and range invariants.
    pub fn new(width: usize, height: usize, channels: Channels, pixels: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation(format!("image dimensions must be positive, got {width}x{height}")));
        }
        let expected = width * height * channels.count();
        if pixels.len() != expected {
            return Err(Error::validation(format!(
                "pixel buffer has {} values, expected {expected} for {width}x{height}x{}",
                pixels.len(),
                channels.count()
            )));
        }
        let (lo, hi) = (T::zero(), T::one());
        if let Some(i) = pixels.iter().position(|&v| !(v >= lo && v <= hi)) {
            return Err(Error::validation(format!("pixel {i} has value {} outside [0, 1]", pixels[i])));
        }
        Ok(Self { width, height, channels, pixels })
    }

    /// Builds an image, clamping every value into `[0, 1]`. NaN maps to 0.
    pub fn from_clamped(width: usize, height: usize, channels: Channels, mut pixels: Vec<T>) -> Result<Self> {
        for v in &mut pixels {
            *v = clamp_unit(*v);
        }
        Self::new(width, height, channels, pixels)
    }

    pub fn constant(width: usize, height: usize, channels: Channels, value: T) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels.count()])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        channels: Channels,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let c = channels.count();
        let mut pixels = Vec::with_capacity(width * height * c);
        for y in 0..height {
            for x in 0..width {
                for ch in 0..c {
                    pixels.push(f(x, y, ch));
                }
            }
        }
        Self::new(width, height, channels, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> Channels {
        self.channels
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<T> {
        self.pixels
    }

    pub fn is_square(&self) -> bool {
        self.width == self.height
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, ch: usize) -> usize {
        (y * self.width + x) * self.channels.count() + ch
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, ch: usize) -> T {
        self.pixels[self.index(x, y, ch)]
    }

    /// Maps every value through `f` and clamps the result into `[0, 1]`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            width: self.width,
            height: self.height,
            channels: self.channels,
            pixels: self.pixels.iter().map(|&v| clamp_unit(f(v))).collect(),
        }
    }

    /// Luma conversion; grayscale input is returned unchanged.
    pub fn to_gray(&self) -> Self {
        match self.channels {
            Channels::Gray => self.clone(),
            Channels::Rgb => {
                let w = LUMA.map(T::of);
                let pixels = self
                    .pixels
                    .chunks_exact(3)
                    .map(|p| clamp_unit(w[0] * p[0] + w[1] * p[1] + w[2] * p[2]))
                    .collect();
                Self { width: self.width, height: self.height, channels: Channels::Gray, pixels }
            }
        }
    }

    /// Replicates a gray channel three times; RGB input is returned unchanged.
    pub fn to_rgb(&self) -> Self {
        match self.channels {
            Channels::Rgb => self.clone(),
            Channels::Gray => Self {
                width: self.width,
                height: self.height,
                channels: Channels::Rgb,
                pixels: self.pixels.iter().flat_map(|&v| [v, v, v]).collect(),
            },
        }
    }

    pub fn with_channels(&self, channels: Channels) -> Self {
        match channels {
            Channels::Gray => self.to_gray(),
            Channels::Rgb => self.to_rgb(),
        }
    }

    /// Bilinear resampling with half-pixel centres and edge clamping.
    ///
    /// An exact 2:1 reduction averages each 2x2 source block.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation("resize target must be positive"));
        }
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let c = self.channels.count();
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let xs: Vec<_> = (0..width).map(|x| axis_sample((x as f64 + 0.5) * sx - 0.5, self.width)).collect();
        let ys: Vec<_> = (0..height).map(|y| axis_sample((y as f64 + 0.5) * sy - 0.5, self.height)).collect();
        let mut pixels = Vec::with_capacity(width * height * c);
        for &(y0, y1, fy) in &ys {
            let (fy, gy) = (T::of(fy), T::of(1.0 - fy));
            for &(x0, x1, fx) in &xs {
                let (fx, gx) = (T::of(fx), T::of(1.0 - fx));
                for ch in 0..c {
                    let top = self.get(x0, y0, ch) * gx + self.get(x1, y0, ch) * fx;
                    let bottom = self.get(x0, y1, ch) * gx + self.get(x1, y1, ch) * fx;
                    pixels.push(clamp_unit(top * gy + bottom * fy));
                }
            }
        }
        Ok(Self { width, height, channels: self.channels, pixels })
    }

    pub fn mean(&self) -> T {
        let sum = self.pixels.iter().fold(T::zero(), |acc, &v| acc + v);
        sum / T::of_usize(self.pixels.len())
    }

    pub(crate) fn from_parts_unchecked(width: usize, height: usize, channels: Channels, pixels: Vec<T>) -> Self {
        debug_assert_eq!(pixels.len(), width * height * channels.count());
        Self { width, height, channels, pixels }
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> ImageBuffer<U> {
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: self.channels,
            pixels: self.pixels.iter().map(|&v| U::of(v.f64())).collect(),
        }
    }
}

fn axis_sample(pos: f64, len: usize) -> (usize, usize, f64) {
    let max = (len - 1) as f64;
    let pos = pos.clamp(0.0, max);
    let i0 = pos.floor() as usize;
    let i1 = (i0 + 1).min(len - 1);
    (i0, i1, pos - i0 as f64)
}

#[inline]
pub(crate) fn clamp_unit<T: Real>(v: T) -> T {
    if v >= T::one() {
        T::one()
    } else if v > T::zero() {
        v
    } else {
        T::zero()
    }
}

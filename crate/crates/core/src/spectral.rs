//! Centred 2-D amplitude and power spectra.
//!
//! Conventions: unnormalised forward DFT
//! `X[u, v] = sum x[m, n] exp(-2 pi i (u m + v n) / N)` where `m`/`u` run along
//! image columns and `n`/`v` along rows. Power is `|X|^2 / N^2`. Maps are stored
//! row-major (row = `v`, column = `u`) with DC at `(N/2, N/2)`.

use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Channels, ImageBuffer};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Amplitude,
    Power,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMap<T> {
    size: usize,
    values: Vec<T>,
    pub kind: SpectrumKind,
    pub log_scaled: bool,
}

impl<T: Real> SpectrumMap<T> {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at centred frequency offsets `(u, v)` in `[-N/2, N/2)`.
    pub fn at(&self, u: i64, v: i64) -> T {
        let n = self.size as i64;
        let half = n / 2;
        let col = (u + half).rem_euclid(n) as usize;
        let row = (v + half).rem_euclid(n) as usize;
        self.values[row * self.size + col]
    }

    /// Value at storage position (`row`, `col`).
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.size + col]
    }

    /// `log(1 + x)` display view.
    pub fn to_log_scaled(&self) -> Self {
        if self.log_scaled {
            return self.clone();
        }
        Self { size: self.size, values: self.values.iter().map(|v| v.ln_1p()).collect(), kind: self.kind, log_scaled: true }
    }

    /// Largest relative deviation from point symmetry through the centre,
    /// considering bins whose mirror is inside the `N x N` grid.
    pub fn point_symmetry_error(&self) -> f64 {
        let half = (self.size / 2) as i64;
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.f64().abs())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for v in -half..half {
            for u in -half..half {
                let d = (self.at(u, v).f64() - self.at(-u, -v).f64()).abs();
                worst = worst.max(d / scale);
            }
        }
        worst
    }

    /// Rows of the map, top to bottom.
    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.size)
    }
}

fn check_square_gray<T: Real>(img: &ImageBuffer<T>) -> Result<usize> {
    if img.channels() != Channels::Gray {
        return Err(Error::validation("spectra need a grayscale image"));
    }
    if !img.is_square() {
        return Err(Error::validation(format!("spectra need a square image, got {}x{}", img.width(), img.height())));
    }
    let n = img.width();
    if !n.is_multiple_of(2) {
        return Err(Error::validation(format!("spectra need an even side length, got {n}")));
    }
    Ok(n)
}

/// Uncentred squared magnitudes `|X[u, v]|^2`, row-major with row = `v`.
fn dft_magnitude_sq<T: Real + FftNum>(img: &ImageBuffer<T>, planner: &mut FftPlanner<T>) -> Result<Vec<T>> {
    let n = check_square_gray(img)?;
    let fft = planner.plan_fft_forward(n);
    let mut data: Vec<Complex<T>> = img.pixels().iter().map(|&v| Complex::new(v, T::zero())).collect();
    // each row, over m
    fft.process(&mut data);
    // each column, over n, through a transpose
    let mut transposed = vec![Complex::new(T::zero(), T::zero()); n * n];
    for r in 0..n {
        for c in 0..n {
            transposed[c * n + r] = data[r * n + c];
        }
    }
    fft.process(&mut transposed);
    let mut out = vec![T::zero(); n * n];
    for c in 0..n {
        for r in 0..n {
            out[r * n + c] = transposed[c * n + r].norm_sqr();
        }
    }
    Ok(out)
}

/// Moves DC from `(0, 0)` to `(N/2, N/2)`.
fn fftshift<T: Copy>(values: &[T], n: usize) -> Vec<T> {
    let half = n / 2;
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        let sr = (r + half) % n;
        for c in 0..n {
            out.push(values[sr * n + (c + half) % n]);
        }
    }
    out
}

pub fn fft2_amplitude<T: Real + FftNum>(img: &ImageBuffer<T>) -> Result<SpectrumMap<T>> {
    let mut planner = FftPlanner::new();
    let n = img.width();
    let mag: Vec<T> = dft_magnitude_sq(img, &mut planner)?.into_iter().map(|p| p.sqrt()).collect();
    Ok(SpectrumMap { size: n, values: fftshift(&mag, n), kind: SpectrumKind::Amplitude, log_scaled: false })
}

pub fn power_spectrum<T: Real + FftNum>(img: &ImageBuffer<T>) -> Result<SpectrumMap<T>> {
    average_power_spectrum(std::slice::from_ref(img))
}

/// Mean of `|X|^2 / N^2` over the images, accumulated in list order.
pub fn average_power_spectrum<T: Real + FftNum>(images: &[ImageBuffer<T>]) -> Result<SpectrumMap<T>> {
    let first = images.first().ok_or_else(|| Error::validation("average spectrum needs at least one image"))?;
    let n = check_square_gray(first)?;
    if let Some(i) = images.iter().position(|img| img.width() != n || img.height() != n) {
        return Err(Error::validation(format!(
            "image {i} is {}x{}, expected {n}x{n}",
            images[i].width(),
            images[i].height()
        )));
    }
    let mut planner = FftPlanner::new();
    let mut acc = vec![0.0f64; n * n];
    for img in images {
        for (a, p) in acc.iter_mut().zip(dft_magnitude_sq(img, &mut planner)?) {
            *a += p.f64();
        }
    }
    let norm = (n * n) as f64 * images.len() as f64;
    let mean: Vec<T> = acc.into_iter().map(|a| T::of(a / norm)).collect();
    Ok(SpectrumMap { size: n, values: fftshift(&mean, n), kind: SpectrumKind::Power, log_scaled: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SliceAngle {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl SliceAngle {
    pub fn from_degrees(deg: f64) -> Result<Self> {
        match deg {
            0.0 => Ok(Self::Deg0),
            45.0 => Ok(Self::Deg45),
            90.0 => Ok(Self::Deg90),
            135.0 => Ok(Self::Deg135),
            d => Err(Error::validation(format!("unsupported slice angle {d}; use 0, 45, 90 or 135"))),
        }
    }

    pub fn degrees(self) -> u32 {
        match self {
            Self::Deg0 => 0,
            Self::Deg45 => 45,
            Self::Deg90 => 90,
            Self::Deg135 => 135,
        }
    }

    /// Lattice step `(du, dv)`; angles are measured from `+u` towards `+v`.
    fn step(self) -> (i64, i64) {
        match self {
            Self::Deg0 => (1, 0),
            Self::Deg45 => (1, 1),
            Self::Deg90 => (0, 1),
            Self::Deg135 => (-1, 1),
        }
    }
}

impl fmt::Display for SliceAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.degrees())
    }
}

/// `N/2` values along the ray from DC outwards; index 0 is DC.
pub fn spectrum_slice<T: Real>(spec: &SpectrumMap<T>, angle: SliceAngle) -> Vec<T> {
    let (du, dv) = angle.step();
    (0..(spec.size / 2) as i64).map(|i| spec.at(du * i, dv * i)).collect()
}

/// Mean over bins of `(log(1 + a) - log(1 + b))^2`; log-scaled maps are compared as stored.
pub fn spectral_divergence<T: Real>(real: &SpectrumMap<T>, synth: &SpectrumMap<T>) -> Result<T> {
    if real.size != synth.size {
        return Err(Error::validation(format!("spectrum sizes differ: {} vs {}", real.size, synth.size)));
    }
    if real.kind != synth.kind || real.log_scaled != synth.log_scaled {
        return Err(Error::validation("spectra must have the same kind and scaling"));
    }
    let lift = |v: T| if real.log_scaled { v } else { v.ln_1p() };
    let sum = real.values.iter().zip(&synth.values).fold(T::zero(), |acc, (&a, &b)| {
        let d = lift(a) - lift(b);
        acc + d * d
    });
    Ok(sum / T::of_usize(real.values.len()))
}

//! Feature extraction and Gaussian summaries.
//!
//! The built-in embedder is a seeded random projection: each image is reduced
//! to 64x64 grayscale, centred on the mid-grey value 0.5, and multiplied by a
//! fixed Gaussian matrix with entries drawn from N(0, 1/4096). Features produced
//! by an external network can be swapped in through the CSV reader.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::scalar::Real;

pub const EMBED_SIDE: usize = 64;
const EMBED_LEN: usize = EMBED_SIDE * EMBED_SIDE;

/// `n x d` matrix of per-image features, one row per image.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    n: usize,
    d: usize,
    rows: Vec<T>,
    pub source_tag: String,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(n: usize, d: usize, rows: Vec<T>, source_tag: impl Into<String>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::validation(format!("feature matrix must be non-empty, got {n}x{d}")));
        }
        if rows.len() != n * d {
            return Err(Error::validation(format!("feature buffer has {} values, expected {}", rows.len(), n * d)));
        }
        if let Some(i) = rows.iter().position(|v| !v.finite()) {
            return Err(Error::validation(format!("feature ({}, {}) is not finite", i / d, i % d)));
        }
        Ok(Self { n, d, rows, source_tag: source_tag.into() })
    }

    pub fn from_rows(rows: &[Vec<T>], source_tag: impl Into<String>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::validation(format!("row {i} has {} values, expected {d}", rows[i].len())));
        }
        Self::new(rows.len(), d, rows.concat(), source_tag)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.rows[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> {
        self.rows.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.rows
    }

    pub fn to_matrix(&self) -> DMatrix<T> {
        DMatrix::from_row_slice(self.n, self.d, &self.rows)
    }

    /// Rows selected by index, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut rows = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            rows.extend_from_slice(self.row(i));
        }
        Self { n: indices.len(), d: self.d, rows, source_tag: self.source_tag.clone() }
    }
}

/// Mean vector and unbiased covariance of a feature set.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSummary<T: Real> {
    pub mu: DVector<T>,
    pub sigma: DMatrix<T>,
    pub n: usize,
}

impl<T: Real> GaussianSummary<T> {
    pub fn d(&self) -> usize {
        self.mu.len()
    }
}

pub fn gaussian_summary<T: Real>(features: &FeatureMatrix<T>) -> Result<GaussianSummary<T>> {
    let (n, d) = (features.n(), features.d());
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let x = features.to_matrix();
    let mu = x.row_mean().transpose();
    let mut centred = x;
    for mut row in centred.row_iter_mut() {
        row -= mu.transpose();
    }
    let mut sigma = centred.tr_mul(&centred) / T::of_usize(n - 1);
    let half = T::of(0.5);
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = (sigma[(i, j)] + sigma[(j, i)]) * half;
            sigma[(i, j)] = avg;
            sigma[(j, i)] = avg;
        }
    }
    Ok(GaussianSummary { mu, sigma, n })
}

/// Seeded `d x 4096` projection with N(0, 1/4096) entries, row-major.
pub fn projection_matrix<T: Real>(d: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0 / EMBED_SIDE as f64).expect("valid normal");
    (0..d * EMBED_LEN).map(|_| T::of(normal.sample(&mut rng))).collect()
}

/// The 4096-vector the projection consumes: 64x64 grayscale, minus 0.5.
pub fn embedding_input<T: Real>(img: &ImageBuffer<T>) -> Result<Vec<T>> {
    let small = img.to_gray().resize_bilinear(EMBED_SIDE, EMBED_SIDE)?;
    let mid = T::of(0.5);
    Ok(small.pixels().iter().map(|&v| v - mid).collect())
}

pub fn embed_dataset<T: Real>(images: &[ImageBuffer<T>], d: usize, seed: u64) -> Result<FeatureMatrix<T>> {
    if images.is_empty() {
        return Err(Error::validation("cannot embed an empty image list"));
    }
    if d < 2 {
        return Err(Error::validation(format!("feature dimension must be at least 2, got {d}")));
    }
    let proj = projection_matrix::<T>(d, seed);
    let rows: Vec<Vec<T>> = images
        .par_iter()
        .map(|img| {
            let input = embedding_input(img)?;
            Ok(proj
                .chunks_exact(EMBED_LEN)
                .map(|p| p.iter().zip(&input).fold(T::zero(), |acc, (&w, &x)| acc + w * x))
                .collect())
        })
        .collect::<Result<_>>()?;
    FeatureMatrix::new(images.len(), d, rows.concat(), format!("random-projection(d={d},seed={seed})"))
}

/// Writes features as CSV with header `f0,...,f{d-1}`, shortest round-trip decimals.
pub fn write_features_to<T: Real, W: Write>(features: &FeatureMatrix<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = (0..features.d()).map(|j| format!("f{j}")).collect();
    w.write_record(&header).map_err(csv_io)?;
    for row in features.rows() {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_features<T: Real>(path: impl AsRef<Path>, features: &FeatureMatrix<T>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path)
        .map_err(|e| Error::Ingest { path: path.to_path_buf(), message: e.to_string() })?;
    write_features_to(features, std::io::BufWriter::new(file))
}

pub fn read_features_from<T: Real, R: Read>(input: R, source_tag: &str) -> Result<FeatureMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = reader.headers().map_err(|e| Error::Format(format!("feature header: {e}")))?.clone();
    let d = header.len();
    for (j, name) in header.iter().enumerate() {
        if name.trim() != format!("f{j}") {
            return Err(Error::Format(format!("feature header column {} is {name:?}, expected \"f{j}\"", j + 1)));
        }
    }
    let mut values = Vec::new();
    let mut n = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        if record.len() != d {
            return Err(Error::Format(format!("row {row} has {} cells, expected {d}", record.len())));
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("row {row}, column {}: {cell:?} is not a number", j + 1)))?;
            if !v.is_finite() {
                return Err(Error::Format(format!("row {row}, column {}: value is not finite", j + 1)));
            }
            values.push(T::of(v));
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::Format("feature file has no data rows".into()));
    }
    FeatureMatrix::new(n, d, values, source_tag)
}

pub fn read_features<T: Real>(path: impl AsRef<Path>) -> Result<FeatureMatrix<T>> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|e| Error::Ingest { path: path.to_path_buf(), message: e.to_string() })?;
    read_features_from(std::io::BufReader::new(file), &path.display().to_string())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

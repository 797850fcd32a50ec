//! Dataset manifests and image loading.
//!
//! A manifest is a CSV file with header `path,label`, where `label` is `real`
//! or `synthetic` and paths are relative to the manifest's directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Channels, ImageBuffer};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Synthetic,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Real => "real",
            Label::Synthetic => "synthetic",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "real" => Ok(Label::Real),
            "synthetic" => Ok(Label::Synthetic),
            other => Err(Error::Format(format!("unknown label {other:?}, expected real or synthetic"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(root: impl Into<PathBuf>, entries: Vec<ManifestEntry>) -> Self {
        Self { root: root.into(), entries }
    }

    /// Parses a manifest CSV. Entry paths stay relative; they resolve against the
    /// manifest's directory.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Ingest { path: path.to_path_buf(), message: e.to_string() })?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, root)
    }

    pub fn parse(text: &str, root: impl Into<PathBuf>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Format(format!("manifest header: {e}")))?.clone();
        if headers.len() != 2 || &headers[0] != "path" || &headers[1] != "label" {
            return Err(Error::Format(format!("manifest header must be `path,label`, got {:?}", headers.as_slice())));
        }
        let mut entries = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| Error::Format(format!("manifest row {row}: {e}")))?;
            if record.len() != 2 {
                return Err(Error::Format(format!("manifest row {row} has {} cells, expected 2", record.len())));
            }
            let label = record[1].parse().map_err(|e| Error::Format(format!("manifest row {row}: {e}")))?;
            entries.push(ManifestEntry { path: PathBuf::from(&record[0]), label });
        }
        Ok(Self { root: root.into(), entries })
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.root.join(&entry.path)
        }
    }

    pub fn with_label(&self, label: Label) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.label == label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Decodes a PNG (or any format the `image` crate reads) into `[0, 1]` values.
pub fn decode_image<T: Real>(path: &Path) -> Result<ImageBuffer<T>> {
    if !path.exists() {
        return Err(Error::Ingest { path: path.to_path_buf(), message: "file not found".into() });
    }
    let bytes =
        std::fs::read(path).map_err(|e| Error::Ingest { path: path.to_path_buf(), message: e.to_string() })?;
    let decoded = image::load_from_memory(&bytes)
        .map_err(|e| Error::Format(format!("cannot decode {}: {e}", path.display())))?;
    let scale = T::of(1.0 / 255.0);
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    if decoded.color().has_color() {
        let rgb = decoded.to_rgb8();
        ImageBuffer::new(w, h, Channels::Rgb, rgb.into_raw().into_iter().map(|v| T::of(v as f64) * scale).collect())
    } else {
        let gray = decoded.to_luma8();
        ImageBuffer::new(w, h, Channels::Gray, gray.into_raw().into_iter().map(|v| T::of(v as f64) * scale).collect())
    }
}

/// Loads every manifest entry, resized to `target_size` square with the
/// requested channel layout. Output order matches manifest order.
pub fn load_dataset<T: Real>(
    manifest: &DatasetManifest,
    target_size: usize,
    grayscale: bool,
) -> Result<Vec<ImageBuffer<T>>> {
    if manifest.is_empty() {
        return Err(Error::validation("manifest has no entries"));
    }
    if target_size < 8 {
        return Err(Error::validation(format!("target size must be at least 8, got {target_size}")));
    }
    let channels = if grayscale { Channels::Gray } else { Channels::Rgb };
    manifest
        .entries
        .par_iter()
        .map(|entry| {
            let img = decode_image::<T>(&manifest.resolve(entry))?;
            img.with_channels(channels).resize_bilinear(target_size, target_size)
        })
        .collect()
}

/// Writes an image as an 8-bit PNG, rounding `v * 255`.
pub fn save_png<T: Real>(img: &ImageBuffer<T>, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = img.pixels().iter().map(|&v| (v.f64() * 255.0).round().clamp(0.0, 255.0) as u8).collect();
    let (w, h) = (img.width() as u32, img.height() as u32);
    let color = match img.channels() {
        Channels::Gray => image::ExtendedColorType::L8,
        Channels::Rgb => image::ExtendedColorType::Rgb8,
    };
    image::save_buffer_with_format(path, &bytes, w, h, color, image::ImageFormat::Png)
        .map_err(|e| Error::Ingest { path: path.to_path_buf(), message: e.to_string() })
}

//! Evaluation toolkit for synthetic image corpora.
//!
//! The numeric core is generic over a [`Real`] scalar (`f32` or `f64`); the
//! aliases at the bottom of this file pin the `f64` instantiations used by the
//! command-line tools and the Turing-test service.

pub mod embedding;
pub mod equivariance;
pub mod error;
pub mod genmetrics;
pub mod image;
pub mod ingest;
pub mod psnr;
pub mod scalar;
pub mod spectral;
pub mod statlab;
pub mod transform;

pub use crate::embedding::{embed_dataset, gaussian_summary, read_features, write_features};
pub use crate::equivariance::{eq_score, EquivarianceConfig, Family, RotationSet};
pub use crate::error::{Error, ErrorKind, Result};
pub use crate::genmetrics::{fid, frechet_distance, kid, KidConfig, KidEstimate};
pub use crate::image::{Channels, ImageBuffer};
pub use crate::ingest::{load_dataset, DatasetManifest, Label, ManifestEntry};
pub use crate::psnr::{psnr, DEFAULT_PSNR_CAP_DB};
pub use crate::scalar::Real;
pub use crate::spectral::{
    average_power_spectrum, fft2_amplitude, spectral_divergence, spectrum_slice, SliceAngle,
    SpectrumKind, SpectrumMap,
};
pub use crate::transform::{apply_transform, TransformSpec};

/// `f64` image buffer.
pub type Image = ImageBuffer<f64>;
/// `f32` image buffer.
pub type ImageF32 = ImageBuffer<f32>;
/// `f64` feature matrix.
pub type Features = embedding::FeatureMatrix<f64>;
/// `f32` feature matrix.
pub type FeaturesF32 = embedding::FeatureMatrix<f32>;
/// `f64` Gaussian summary.
pub type Gaussian = embedding::GaussianSummary<f64>;
/// `f64` spectrum.
pub type Spectrum = SpectrumMap<f64>;
/// `f32` spectrum.
pub type SpectrumF32 = SpectrumMap<f32>;

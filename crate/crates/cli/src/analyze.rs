//! Single-metric commands: `spectra` and `eq`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use evalkit::{average_power_spectrum, eq_score, load_dataset, spectral_divergence, DatasetManifest, Family, Image};
use serde::{Deserialize, Serialize};

use crate::config::{resolve_output_dir, EqFlags, EqSettings};
use crate::error::{CliError, CliResult};
use crate::evaluate::slice_files;
use crate::output::{heatmap_csv, to_json, write_atomic};

#[derive(Debug, Clone, Args)]
pub struct SpectraArgs {
    #[arg(long)]
    pub real_manifest: PathBuf,
    /// Second corpus; adds a `synthetic` column and the divergence
    #[arg(long)]
    pub synth_manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    pub image_size: usize,
    /// Output directory [default: $EVALKIT_OUT_DIR, else ./evalkit-out]
    #[arg(long)]
    pub outputs: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraSummary {
    pub size: usize,
    pub n_real: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_synth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_divergence: Option<f64>,
    pub files: Vec<PathBuf>,
}

fn check_size(size: usize) -> CliResult<()> {
    if size < 8 || !size.is_multiple_of(2) {
        return Err(CliError::Usage(format!("--image-size must be even and at least 8, got {size}")));
    }
    Ok(())
}

fn load_gray(manifest: &PathBuf, size: usize) -> CliResult<Vec<Image>> {
    Ok(load_dataset(&DatasetManifest::read(manifest)?, size, true)?)
}

pub fn spectra(args: &SpectraArgs) -> CliResult<SpectraSummary> {
    check_size(args.image_size)?;
    let real = load_gray(&args.real_manifest, args.image_size)?;
    let real_spec = average_power_spectrum(&real)?;
    let synth = args.synth_manifest.as_ref().map(|m| load_gray(m, args.image_size)).transpose()?;
    let synth_spec = synth.as_deref().map(average_power_spectrum).transpose()?;
    let divergence = synth_spec.as_ref().map(|s| spectral_divergence(&real_spec, s)).transpose()?;

    let dir = resolve_output_dir(args.outputs.as_deref());
    let mut files = vec![write_atomic(&dir, "spectrum_real.csv", heatmap_csv(&real_spec).as_bytes())?];
    let mut columns = vec![("real", &real_spec)];
    if let Some(s) = &synth_spec {
        files.push(write_atomic(&dir, "spectrum_synthetic.csv", heatmap_csv(s).as_bytes())?);
        columns.push(("synthetic", s));
    }
    for (name, text) in slice_files(&columns) {
        files.push(write_atomic(&dir, &name, text.as_bytes())?);
    }
    let summary = SpectraSummary {
        size: args.image_size,
        n_real: real.len(),
        n_synth: synth.as_ref().map(Vec::len),
        spectral_divergence: divergence,
        files,
    };
    write_atomic(&dir, "spectra.json", to_json(&summary).as_bytes())?;
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Translation,
    Rotation,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct EqArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = FamilyArg::Both)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 512)]
    pub image_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Convert to grayscale before scoring
    #[arg(long)]
    pub grayscale: bool,
    #[command(flatten)]
    pub eq: EqFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqSummary {
    pub operator: String,
    pub n_images: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq_r: Option<f64>,
    pub num_transforms: usize,
    pub seed: u64,
}

pub fn eq(args: &EqArgs) -> CliResult<EqSummary> {
    check_size(args.image_size)?;
    let mut settings = EqSettings::default();
    args.eq.apply(&mut settings);
    let operator = settings.operator()?;
    if settings.num_transforms == 0 {
        return Err(CliError::Usage("--num-transforms must be at least 1".into()));
    }
    let images: Vec<Image> = load_dataset(&DatasetManifest::read(&args.manifest)?, args.image_size, args.grayscale)?;
    let cfg = settings.to_config(args.seed);
    let score = |family| -> CliResult<f64> { Ok(eq_score(&operator, &images, family, &cfg)?) };
    let eq_t = matches!(args.family, FamilyArg::Translation | FamilyArg::Both).then(|| score(Family::Translation)).transpose()?;
    let eq_r = matches!(args.family, FamilyArg::Rotation | FamilyArg::Both).then(|| score(Family::Rotation)).transpose()?;
    Ok(EqSummary {
        operator: operator.to_string(),
        n_images: images.len(),
        eq_t,
        eq_r,
        num_transforms: settings.num_transforms,
        seed: args.seed,
    })
}

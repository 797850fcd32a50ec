use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use evalkit::{
    average_power_spectrum, embed_dataset, eq_score, fid, kid, load_dataset, spectral_divergence, spectrum_slice,
    DatasetManifest, Family, Image, KidConfig, KidEstimate, SliceAngle, Spectrum,
};
use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::error::CliResult;
use crate::output::{heatmap_csv, slice_csv, to_json, write_atomic};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything that is a pure function of config and inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub fid: f64,
    pub kid: KidEstimate<f64>,
    pub eq_t: f64,
    pub eq_r: f64,
    pub spectral_divergence: f64,
    pub n_real: usize,
    pub n_synth: usize,
    pub image_size: usize,
    pub feature_dim: usize,
    pub operator: String,
    pub config_hash: String,
    pub toolkit_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub body: ReportBody,
    pub timestamps: Timestamps,
}

pub struct EvalOutcome {
    pub report: EvalReport,
    pub files: Vec<PathBuf>,
}

fn unix_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

pub fn gray(images: &[Image]) -> Vec<Image> {
    images.iter().map(Image::to_gray).collect()
}

/// `slice_0.csv` and `slice_45.csv` with one column per spectrum.
pub fn slice_files(columns: &[(&str, &Spectrum)]) -> Vec<(String, String)> {
    [SliceAngle::Deg0, SliceAngle::Deg45]
        .into_iter()
        .map(|angle| {
            let cols: Vec<(&str, Vec<f64>)> = columns.iter().map(|(name, s)| (*name, spectrum_slice(s, angle))).collect();
            (format!("slice_{angle}.csv"), slice_csv(&cols))
        })
        .collect()
}

/// load → embed → FID/KID → EQ-T/EQ-R → average power spectra → divergence.
pub fn evaluate(cfg: &EvalConfig) -> CliResult<EvalOutcome> {
    let started = unix_ms();
    let operator = cfg.eq.operator()?;
    let real_m = DatasetManifest::read(&cfg.real_manifest)?;
    let synth_m = DatasetManifest::read(&cfg.synth_manifest)?;
    let real: Vec<Image> = load_dataset(&real_m, cfg.image_size, false)?;
    let synth: Vec<Image> = load_dataset(&synth_m, cfg.image_size, false)?;

    let real_f = embed_dataset(&real, cfg.feature_dim, cfg.seed)?;
    let synth_f = embed_dataset(&synth, cfg.feature_dim, cfg.seed)?;
    let fid_value = fid(&real_f, &synth_f)?;
    let kid_cfg = KidConfig { block_size: cfg.kid_block_size, shuffle_seed: Some(cfg.seed), ..KidConfig::default() };
    let kid_value = kid(&real_f, &synth_f, &kid_cfg)?;

    let eq_cfg = cfg.eq.to_config(cfg.seed);
    let eq_t = eq_score(&operator, &synth, Family::Translation, &eq_cfg)?;
    let eq_r = eq_score(&operator, &synth, Family::Rotation, &eq_cfg)?;

    let real_spec = average_power_spectrum(&gray(&real))?;
    let synth_spec = average_power_spectrum(&gray(&synth))?;
    let divergence = spectral_divergence(&real_spec, &synth_spec)?;

    let body = ReportBody {
        fid: fid_value,
        kid: kid_value,
        eq_t,
        eq_r,
        spectral_divergence: divergence,
        n_real: real.len(),
        n_synth: synth.len(),
        image_size: cfg.image_size,
        feature_dim: cfg.feature_dim,
        operator: operator.to_string(),
        config_hash: cfg.hash(),
        toolkit_version: TOOLKIT_VERSION.to_string(),
    };
    let report = EvalReport { body, timestamps: Timestamps { started_unix_ms: started, finished_unix_ms: unix_ms() } };

    let dir = cfg.output_dir();
    let mut files = vec![
        write_atomic(&dir, "spectrum_real.csv", heatmap_csv(&real_spec).as_bytes())?,
        write_atomic(&dir, "spectrum_synthetic.csv", heatmap_csv(&synth_spec).as_bytes())?,
    ];
    for (name, text) in slice_files(&[("real", &real_spec), ("synthetic", &synth_spec)]) {
        files.push(write_atomic(&dir, &name, text.as_bytes())?);
    }
    files.push(write_atomic(&dir, "report.json", to_json(&report).as_bytes())?);
    Ok(EvalOutcome { report, files })
}

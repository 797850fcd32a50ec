//! `evaluate` configuration: a TOML file, per-field flags, or both (flags win).

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use evalkit::equivariance::BuiltinOperator;
use evalkit::{EquivarianceConfig, RotationSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "EVALKIT_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "evalkit-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RotationSetArg {
    Exact90,
    AnyAngle,
}

impl From<RotationSetArg> for RotationSet {
    fn from(r: RotationSetArg) -> Self {
        match r {
            RotationSetArg::Exact90 => RotationSet::Exact90,
            RotationSetArg::AnyAngle => RotationSet::AnyAngle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EqSettings {
    /// `identity`, `gamma:<g>`, `blur:<radius>` or `mask-left-half`.
    pub operator: String,
    pub num_transforms: usize,
    pub max_translate: Option<usize>,
    pub rotation_set: RotationSet,
    pub mask_central_disk: bool,
    pub psnr_cap_db: f64,
}

impl Default for EqSettings {
    fn default() -> Self {
        let d = EquivarianceConfig::default();
        Self {
            operator: "identity".into(),
            num_transforms: d.num_transforms,
            max_translate: d.max_translate,
            rotation_set: d.rotation_set,
            mask_central_disk: d.mask_central_disk,
            psnr_cap_db: d.psnr_cap_db,
        }
    }
}

impl EqSettings {
    pub fn operator(&self) -> CliResult<BuiltinOperator> {
        self.operator.parse().map_err(|e: evalkit::Error| CliError::Usage(e.to_string()))
    }

    pub fn to_config(&self, seed: u64) -> EquivarianceConfig {
        EquivarianceConfig {
            num_transforms: self.num_transforms,
            max_translate: self.max_translate,
            rotation_set: self.rotation_set,
            seed,
            psnr_cap_db: self.psnr_cap_db,
            mask_central_disk: self.mask_central_disk,
        }
    }

    fn validate(&self) -> CliResult<()> {
        self.operator()?;
        if self.num_transforms == 0 {
            return Err(CliError::Usage("num_transforms must be at least 1".into()));
        }
        if !(self.psnr_cap_db.is_finite() && self.psnr_cap_db > 0.0) {
            return Err(CliError::Usage("psnr_cap_db must be positive".into()));
        }
        Ok(())
    }
}

/// Equivariance flags shared by `evaluate` and `eq`.
#[derive(Debug, Clone, Default, Args)]
pub struct EqFlags {
    /// identity, gamma:<g>, blur:<radius> or mask-left-half
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long)]
    pub num_transforms: Option<usize>,
    /// Largest translation in pixels (default: image side / 8)
    #[arg(long)]
    pub max_translate: Option<usize>,
    #[arg(long, value_enum)]
    pub rotation_set: Option<RotationSetArg>,
    /// Score rotations over the whole frame instead of the inscribed disk
    #[arg(long)]
    pub no_disk_mask: bool,
    #[arg(long)]
    pub psnr_cap_db: Option<f64>,
}

impl EqFlags {
    pub fn apply(&self, eq: &mut EqSettings) {
        if let Some(op) = &self.operator {
            eq.operator = op.clone();
        }
        if let Some(n) = self.num_transforms {
            eq.num_transforms = n;
        }
        if self.max_translate.is_some() {
            eq.max_translate = self.max_translate;
        }
        if let Some(r) = self.rotation_set {
            eq.rotation_set = r.into();
        }
        if self.no_disk_mask {
            eq.mask_central_disk = false;
        }
        if let Some(c) = self.psnr_cap_db {
            eq.psnr_cap_db = c;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub real_manifest: PathBuf,
    pub synth_manifest: PathBuf,
    #[serde(default = "default_image_size")]
    pub image_size: usize,
    #[serde(default = "default_feature_dim")]
    pub feature_dim: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_kid_block_size")]
    pub kid_block_size: usize,
    #[serde(default)]
    pub eq: EqSettings,
    /// Not part of the config hash.
    #[serde(default, skip_serializing)]
    pub outputs: Option<PathBuf>,
}

fn default_image_size() -> usize {
    512
}

fn default_feature_dim() -> usize {
    192
}

fn default_kid_block_size() -> usize {
    100
}

#[derive(Debug, Clone, Default, Args)]
pub struct EvalFlags {
    /// TOML file with the fields below; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub real_manifest: Option<PathBuf>,
    #[arg(long)]
    pub synth_manifest: Option<PathBuf>,
    /// Square side images are resized to [default: 512]
    #[arg(long)]
    pub image_size: Option<usize>,
    /// Embedding dimension [default: 192]
    #[arg(long)]
    pub feature_dim: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// KID block size [default: 100]
    #[arg(long)]
    pub kid_block_size: Option<usize>,
    #[command(flatten)]
    pub eq: EqFlags,
    /// Output directory [default: $EVALKIT_OUT_DIR, else ./evalkit-out]
    #[arg(long)]
    pub outputs: Option<PathBuf>,
}

impl EvalConfig {
    /// Reads a TOML config. Relative paths resolve against the file's directory.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: EvalConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut cfg.real_manifest);
        rebase(&mut cfg.synth_manifest);
        if let Some(out) = cfg.outputs.as_mut() {
            rebase(out);
        }
        Ok(cfg)
    }

    pub fn from_flags(flags: &EvalFlags) -> CliResult<Self> {
        let mut cfg = match &flags.config {
            Some(path) => Self::from_file(path)?,
            None => {
                let missing = |name: &str| CliError::Usage(format!("--{name} is required without --config"));
                EvalConfig {
                    real_manifest: flags.real_manifest.clone().ok_or_else(|| missing("real-manifest"))?,
                    synth_manifest: flags.synth_manifest.clone().ok_or_else(|| missing("synth-manifest"))?,
                    image_size: default_image_size(),
                    feature_dim: default_feature_dim(),
                    seed: 0,
                    kid_block_size: default_kid_block_size(),
                    eq: EqSettings::default(),
                    outputs: None,
                }
            }
        };
        if let Some(p) = &flags.real_manifest {
            cfg.real_manifest = p.clone();
        }
        if let Some(p) = &flags.synth_manifest {
            cfg.synth_manifest = p.clone();
        }
        cfg.image_size = flags.image_size.unwrap_or(cfg.image_size);
        cfg.feature_dim = flags.feature_dim.unwrap_or(cfg.feature_dim);
        cfg.seed = flags.seed.unwrap_or(cfg.seed);
        cfg.kid_block_size = flags.kid_block_size.unwrap_or(cfg.kid_block_size);
        flags.eq.apply(&mut cfg.eq);
        if flags.outputs.is_some() {
            cfg.outputs = flags.outputs.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.image_size < 8 || !self.image_size.is_multiple_of(2) {
            return Err(CliError::Usage(format!("image_size must be even and at least 8, got {}", self.image_size)));
        }
        if self.feature_dim < 2 {
            return Err(CliError::Usage(format!("feature_dim must be at least 2, got {}", self.feature_dim)));
        }
        if self.kid_block_size < 2 {
            return Err(CliError::Usage(format!("kid_block_size must be at least 2, got {}", self.kid_block_size)));
        }
        self.eq.validate()
    }

    pub fn output_dir(&self) -> PathBuf {
        resolve_output_dir(self.outputs.as_deref())
    }

    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

/// Flag, then `$EVALKIT_OUT_DIR`, then `./evalkit-out`.
pub fn resolve_output_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

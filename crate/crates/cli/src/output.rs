use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use evalkit::{Real, SpectrumMap};

use crate::error::{CliError, CliResult};

/// Writes `bytes` to `dir/name` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
    Ok(target)
}

/// Log-scaled spectrum as a headerless grid. Row `i` is vertical frequency
/// `i - N/2`, column `j` horizontal frequency `j - N/2`.
pub fn heatmap_csv<T: Real>(spec: &SpectrumMap<T>) -> String {
    let mut out = String::new();
    for row in spec.to_log_scaled().rows() {
        let cells: Vec<String> = row.iter().map(|v| v.f64().to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `index,<name>...` columns; all slices must have the same length.
pub fn slice_csv(columns: &[(&str, Vec<f64>)]) -> String {
    let mut out = String::from("index");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let len = columns.first().map_or(0, |(_, v)| v.len());
    for i in 0..len {
        let _ = write!(out, "{i}");
        for (_, v) in columns {
            let _ = write!(out, ",{}", v[i]);
        }
        out.push('\n');
    }
    out
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

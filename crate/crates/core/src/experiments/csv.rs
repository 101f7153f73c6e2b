//! Plot-ready CSV output, one file per run.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::algorithms::RunResult;
use crate::Vector;

pub const HEADER: &str = "iter,gamma,a_n,a_f,f_value,step_norm,dist_to_ref,fejer,stopped_by";

/// 17 significant digits, NaN as an empty field.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

pub fn to_csv(result: &RunResult, reference: Option<&Vector>) -> String {
    let mut out = String::with_capacity(128 * (result.records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in &result.records {
        let dist = reference.map_or(f64::NAN, |x| (x - &r.x).norm());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            format_float(r.gamma),
            format_float(r.a),
            format_float(r.a_f),
            format_float(r.f_value),
            format_float(r.step_norm),
            format_float(dist),
            format_float(r.fejer),
            r.stopped_by.map_or("", |s| s.tag()),
        );
    }
    out
}

#[derive(Debug, thiserror::Error)]
#[error("{}: {source}", .path.display())]
pub struct WriteError {
    pub path: PathBuf,
    pub source: io::Error,
}

pub fn write_csv(result: &RunResult, reference: Option<&Vector>, path: &Path) -> Result<(), WriteError> {
    write_text(path, &to_csv(result, reference))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), WriteError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| WriteError { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| WriteError { path: path.to_path_buf(), source })
}

/// Parses a field written by [`format_float`].
pub fn parse_field(s: &str) -> Option<f64> {
    if s.is_empty() {
        Some(f64::NAN)
    } else {
        s.parse().ok()
    }
}

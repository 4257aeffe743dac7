//! Frame manifests: CSV with one row per frame giving the image path,
//! the externally detected face box (or "none"), the label (+1, -1, or
//! "?"), and an optional timestamp in seconds.

use std::path::{Path, PathBuf};

use phonewatch_core::error::{Error, Result};
use phonewatch_core::eval::Label;
use phonewatch_core::roi::Rect;

pub const MANIFEST_HEADER: &str = "path,face_x,face_y,face_w,face_h,label,timestamp";

#[derive(Debug, Clone)]
pub struct ManifestEntry {
    /// Image path, resolved against the manifest's directory.
    pub path: PathBuf,
    pub face: Option<Rect>,
    pub label: Option<Label>,
    pub timestamp: Option<f64>,
}

impl ManifestEntry {
    /// Frame identifier for reports: the file stem.
    pub fn frame_id(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.to_string_lossy().into_owned())
    }
}

fn parse_face(fields: &[&str], lineno: usize) -> Result<Option<Rect>> {
    if fields.contains(&"none") {
        return Ok(None);
    }
    let nums: Vec<usize> = fields
        .iter()
        .map(|f| {
            f.parse::<u32>().map(|v| v as usize).map_err(|_| {
                Error::Parse(format!("manifest line {lineno}: bad face field {f:?}"))
            })
        })
        .collect::<Result<_>>()?;
    Ok(Some(Rect::new(nums[0], nums[1], nums[2], nums[3])))
}

fn parse_label(field: &str, lineno: usize) -> Result<Option<Label>> {
    match field {
        "?" => Ok(None),
        "1" | "+1" => Ok(Some(Label::WithPhone)),
        "-1" => Ok(Some(Label::NoPhone)),
        other => Err(Error::Parse(format!(
            "manifest line {lineno}: label must be +1, -1 or ?, got {other:?}"
        ))),
    }
}

/// Parses manifest text; relative image paths resolve against `base_dir`.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == MANIFEST_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(Error::Parse(format!(
                "manifest line {lineno}: expected 7 comma-separated fields, got {}",
                fields.len()
            )));
        }
        let path = {
            let p = Path::new(fields[0]);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base_dir.join(p)
            }
        };
        let timestamp = match fields[6] {
            "" | "none" => None,
            t => Some(t.parse::<f64>().map_err(|_| {
                Error::Parse(format!("manifest line {lineno}: bad timestamp {t:?}"))
            })?),
        };
        entries.push(ManifestEntry {
            path,
            face: parse_face(&fields[1..5], lineno)?,
            label: parse_label(fields[5], lineno)?,
            timestamp,
        });
    }
    Ok(entries)
}

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read manifest {path:?}: {e}")))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&text, base)
}

/// One manifest row; `path` is written as given (synth writes bare file
/// names so the manifest stays relocatable).
pub fn manifest_row(
    path: &str,
    face: Option<Rect>,
    label: Option<Label>,
    timestamp: Option<f64>,
) -> String {
    let face_fields = match face {
        Some(r) => format!("{},{},{},{}", r.x, r.y, r.w, r.h),
        None => "none,none,none,none".to_string(),
    };
    let label_field = match label {
        Some(l) => l.value().to_string(),
        None => "?".to_string(),
    };
    let ts_field = timestamp.map_or(String::new(), |t| t.to_string());
    format!("{path},{face_fields},{label_field},{ts_field}")
}

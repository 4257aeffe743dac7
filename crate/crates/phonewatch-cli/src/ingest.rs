//! Manifest ingestion: load each frame, run the vision pipeline where a
//! face box exists, and collect features plus exclusion bookkeeping.

use std::io::Write;

use phonewatch_core::error::{Error, Result};
use phonewatch_core::eval::{LabeledDataset, LabeledItem, Label};
use phonewatch_core::features::FeatureVector;
use phonewatch_core::pipeline::process_frame;
use phonewatch_core::pnm::read_ppm_file;

use crate::manifest::ManifestEntry;

/// Ingestion outcome for one manifest row.
#[derive(Debug, Clone)]
pub struct IngestedFrame {
    pub frame_id: String,
    /// Manifest timestamp, or a synthetic one from the configured FPS.
    pub timestamp: f64,
    pub label: Option<Label>,
    /// Present when the frame passed the pipeline.
    pub features: Option<FeatureVector>,
    pub empty_mask: bool,
    /// Why the frame was excluded, when it was.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub frames: Vec<IngestedFrame>,
    /// Rows with no face box (detector found nothing).
    pub not_found: usize,
    /// Rows that failed to load or process.
    pub failed: usize,
}

impl IngestReport {
    pub fn usable(&self) -> impl Iterator<Item = &IngestedFrame> {
        self.frames.iter().filter(|f| f.features.is_some())
    }

    /// Labeled feature dataset over the usable frames.
    pub fn dataset(&self) -> Result<LabeledDataset> {
        let items: Vec<LabeledItem> = self
            .frames
            .iter()
            .filter_map(|f| {
                let features = f.features?;
                let label = f.label?;
                Some(LabeledItem {
                    features,
                    label,
                    frame_id: f.frame_id.clone(),
                    timestamp: Some(f.timestamp),
                })
            })
            .collect();
        if items.is_empty() {
            return Err(Error::InvalidInput(
                "no usable labeled frames in manifest".into(),
            ));
        }
        LabeledDataset::new(items)
    }
}

/// Processes every manifest row. Per-row problems are recorded and the
/// run continues; only an entirely unusable manifest is fatal to callers
/// that need a dataset.
pub fn ingest(
    entries: &[ManifestEntry],
    seg_fraction: f64,
    fallback_fps: f64,
) -> IngestReport {
    let mut report = IngestReport::default();
    for (i, entry) in entries.iter().enumerate() {
        let timestamp = entry
            .timestamp
            .unwrap_or_else(|| i as f64 / fallback_fps);
        let mut frame = IngestedFrame {
            frame_id: entry.frame_id(),
            timestamp,
            label: entry.label,
            features: None,
            empty_mask: false,
            error: None,
        };
        match entry.face {
            None => {
                report.not_found += 1;
                frame.error = Some("face not found".into());
            }
            Some(face) => {
                match read_ppm_file(&entry.path)
                    .and_then(|img| process_frame(&img, face, seg_fraction))
                {
                    Ok(out) => {
                        frame.features = Some(out.features);
                        frame.empty_mask = out.empty_mask;
                    }
                    Err(e) => {
                        report.failed += 1;
                        frame.error = Some(e.to_string());
                    }
                }
            }
        }
        report.frames.push(frame);
    }
    report
}

/// Writes the feature CSV (`frame_id,timestamp,ph,mi,label`) for every
/// usable frame; unknown labels print as `?`.
pub fn write_features_csv(w: &mut impl Write, report: &IngestReport) -> Result<()> {
    writeln!(w, "frame_id,timestamp,ph,mi,label")?;
    for f in report.usable() {
        let fv = f.features.expect("usable frame has features");
        let label = f
            .label
            .map_or_else(|| "?".to_string(), |l| l.value().to_string());
        writeln!(w, "{},{},{},{},{}", f.frame_id, f.timestamp, fv.ph, fv.mi, label)?;
    }
    Ok(())
}

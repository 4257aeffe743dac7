//! Frame-level composition of the vision stages: face box in, feature
//! pair out. This is the one code path every consumer (ingestion,
//! streaming, tests) runs per frame.

use crate::error::Result;
use crate::features::{frame_features, FeatureVector};
use crate::imaging::ImageBuffer;
use crate::roi::{crop, expand_face, layout_for_crop, Rect, RoiLayout};
use crate::segmentation::{segment_skin_with, SkinMask};

/// Everything the pipeline derives from one frame.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    /// Expanded face region in frame coordinates.
    pub crop_rect: Rect,
    /// Interior rectangles in crop coordinates.
    pub layout: RoiLayout,
    pub mask: SkinMask,
    pub features: FeatureVector,
    /// Segmentation produced an all-false mask; features are (0, 0).
    pub empty_mask: bool,
}

/// Expands the face box, crops, segments skin, and extracts the feature
/// pair.
pub fn process_frame(
    frame: &ImageBuffer,
    face: Rect,
    skin_fraction: f64,
) -> Result<FrameAnalysis> {
    let crop_rect = expand_face(face, frame.width(), frame.height())?;
    let layout = layout_for_crop(crop_rect.w, crop_rect.h)?;
    let cropped = crop(frame, crop_rect)?;
    let mask = segment_skin_with(&cropped, &layout, skin_fraction)?;
    let (features, empty_mask) = frame_features(&mask, &layout);
    Ok(FrameAnalysis {
        crop_rect,
        layout,
        mask,
        features,
        empty_mask,
    })
}

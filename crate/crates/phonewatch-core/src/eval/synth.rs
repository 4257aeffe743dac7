//! Synthetic driver scenes: a skin-toned face ellipse on a dark cabin
//! background, optionally a skin-toned blob in one hand region, exact
//! ground-truth masks, and deterministic per-seed noise. Stands in for
//! real dashboard footage in tests and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::eval::{Label, LabeledDataset, LabeledItem};
use crate::imaging::ImageBuffer;
use crate::pipeline;
use crate::roi::{expand_face, layout_for_crop, Rect};
use crate::segmentation::SkinMask;

/// Geometry and rendering knobs for one synthetic frame.
#[derive(Debug, Clone)]
pub struct SynthParams {
    pub frame_w: usize,
    pub frame_h: usize,
    /// Face box the external detector would report.
    pub face: Rect,
    pub skin_tone: [u8; 3],
    pub background: [u8; 3],
    /// Render a skin blob in the right hand region.
    pub hand_blob: bool,
    /// Fraction of the hand region's area the blob covers.
    pub hand_blob_fill: f64,
    /// Uniform per-channel noise amplitude (0 disables noise).
    pub noise_level: u8,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            frame_w: 160,
            frame_h: 120,
            face: Rect::new(55, 20, 50, 60),
            skin_tone: [206, 141, 110],
            background: [38, 41, 52],
            hand_blob: false,
            hand_blob_fill: 0.6,
            noise_level: 0,
            seed: 0,
        }
    }
}

/// One rendered frame with its detector box, exact skin mask over the
/// expanded crop, and class label.
#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub frame: ImageBuffer,
    pub face: Rect,
    pub truth_mask: SkinMask,
    pub label: Label,
}

/// Renders a frame from the parameters. The face ellipse is inscribed in
/// the upper 80% of the face box so it stays clear of the hand regions;
/// the skin sample band always lands inside it.
pub fn generate_scene(params: &SynthParams) -> Result<SyntheticScene> {
    let face = params.face;
    let mut frame = ImageBuffer::from_pixels(
        params.frame_w,
        params.frame_h,
        vec![params.background; params.frame_w * params.frame_h],
    )?;
    let mut skin = vec![false; params.frame_w * params.frame_h];

    // face ellipse: centered horizontally, center at 40% of the box
    // height, radii half the width and 40% of the height
    let cx = face.x as f64 + face.w as f64 / 2.0;
    let cy = face.y as f64 + 0.4 * face.h as f64;
    let rx = face.w as f64 / 2.0;
    let ry = 0.4 * face.h as f64;
    for y in face.y..face.y + face.h {
        for x in face.x..face.x + face.w {
            let dx = (x as f64 + 0.5 - cx) / rx;
            let dy = (y as f64 + 0.5 - cy) / ry;
            if dx * dx + dy * dy <= 1.0 {
                frame.set(x, y, params.skin_tone);
                skin[y * params.frame_w + x] = true;
            }
        }
    }

    let crop_rect = expand_face(face, params.frame_w, params.frame_h)?;
    let layout = layout_for_crop(crop_rect.w, crop_rect.h)?;

    if params.hand_blob {
        // solid block sized (ceil) to cover at least `fill` of the region
        let region = layout.hand_region_2;
        let side = params.hand_blob_fill.clamp(0.0, 1.0).sqrt();
        let bw = ((region.w as f64 * side).ceil() as usize).clamp(1, region.w);
        let bh = ((region.h as f64 * side).ceil() as usize).clamp(1, region.h);
        let bx = crop_rect.x + region.x + (region.w - bw) / 2;
        let by = crop_rect.y + region.y + (region.h - bh) / 2;
        for y in by..by + bh {
            for x in bx..bx + bw {
                frame.set(x, y, params.skin_tone);
                skin[y * params.frame_w + x] = true;
            }
        }
    }

    if params.noise_level > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let amp = params.noise_level as i16;
        for y in 0..params.frame_h {
            for x in 0..params.frame_w {
                let mut px = frame.get(x, y);
                for c in px.iter_mut() {
                    let jitter = rng.gen_range(-amp..=amp);
                    *c = (*c as i16 + jitter).clamp(0, 255) as u8;
                }
                frame.set(x, y, px);
            }
        }
    }

    let mut truth_mask = SkinMask::new(crop_rect.w, crop_rect.h);
    for y in 0..crop_rect.h {
        for x in 0..crop_rect.w {
            truth_mask.set(
                x,
                y,
                skin[(crop_rect.y + y) * params.frame_w + crop_rect.x + x],
            );
        }
    }

    Ok(SyntheticScene {
        frame,
        face,
        truth_mask,
        label: if params.hand_blob {
            Label::WithPhone
        } else {
            Label::NoPhone
        },
    })
}

/// A generated frame with its stream metadata.
#[derive(Debug, Clone)]
pub struct SyntheticFrame {
    pub scene: SyntheticScene,
    pub frame_id: String,
    pub timestamp: f64,
}

/// Renders `count` frames with per-frame geometry jitter. Labels follow
/// `label_of(index)`; timestamps advance at `fps`.
pub fn generate_frames(
    count: usize,
    base: &SynthParams,
    fps: f64,
    seed: u64,
    label_of: impl Fn(usize) -> bool,
) -> Result<Vec<SyntheticFrame>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = Vec::with_capacity(count);
    for i in 0..count {
        let dx = rng.gen_range(0..7);
        let dy = rng.gen_range(0..5);
        let dw = rng.gen_range(0..7);
        let fill = rng.gen_range(0.45..0.85);
        let params = SynthParams {
            face: Rect::new(
                base.face.x + dx,
                base.face.y + dy,
                base.face.w + dw,
                base.face.h + dw,
            ),
            hand_blob: label_of(i),
            hand_blob_fill: fill,
            seed: seed.wrapping_add(i as u64),
            ..base.clone()
        };
        frames.push(SyntheticFrame {
            scene: generate_scene(&params)?,
            frame_id: format!("frame{i:05}"),
            timestamp: i as f64 / fps,
        });
    }
    Ok(frames)
}

/// Runs the full segmentation + feature pipeline over generated frames
/// and returns the labeled dataset, ready for training.
pub fn dataset_from_frames(frames: &[SyntheticFrame], skin_fraction: f64) -> Result<LabeledDataset> {
    let mut items = Vec::with_capacity(frames.len());
    for f in frames {
        let out = pipeline::process_frame(&f.scene.frame, f.scene.face, skin_fraction)?;
        items.push(LabeledItem {
            features: out.features,
            label: f.scene.label,
            frame_id: f.frame_id.clone(),
            timestamp: Some(f.timestamp),
        });
    }
    LabeledDataset::new(items)
}

/// Linearly separable two-blob point set for solver and GA tests:
/// positives around (0.8, 0.8), negatives around (0.2, 0.2).
pub fn separable_points(count: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(count);
    for i in 0..count {
        let positive = i % 2 == 0;
        let (cx, cy) = if positive { (0.8, 0.8) } else { (0.2, 0.2) };
        let x = cx + rng.gen_range(-0.15..0.15);
        let y = cy + rng.gen_range(-0.15..0.15);
        items.push(LabeledItem {
            features: crate::features::FeatureVector { ph: x, mi: y },
            label: if positive { Label::WithPhone } else { Label::NoPhone },
            frame_id: format!("pt{i:04}"),
            timestamp: None,
        });
    }
    LabeledDataset::new(items).expect("both classes present")
}

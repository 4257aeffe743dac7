//! Rectangle geometry for the pipeline: face-box expansion, the skin
//! sample rectangle, and the two bottom-corner hand regions.

use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;

/// Axis-aligned rectangle in pixel coordinates (x, y is the top-left
/// corner).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    /// True when `self` lies fully inside a `w` x `h` parent image.
    pub fn fits_in(&self, w: usize, h: usize) -> bool {
        self.w >= 1 && self.h >= 1 && self.x + self.w <= w && self.y + self.h <= h
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }
}

/// The interior rectangles used on an expanded face crop: where the skin
/// color sample is taken and where hand/arm pixels are counted.
///
/// `skin_sample` spans 40% of the crop width and 10% of its height,
/// horizontally centered with its top edge on the vertical midline. The
/// two hand regions are 25% x 25% of the crop, anchored at the bottom
/// left and bottom right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoiLayout {
    /// Crop rectangle in frame coordinates.
    pub crop: Rect,
    /// Skin color sample, in crop coordinates.
    pub skin_sample: Rect,
    /// Bottom-left hand region, in crop coordinates.
    pub hand_region_1: Rect,
    /// Bottom-right hand region, in crop coordinates.
    pub hand_region_2: Rect,
}

/// Round-half-up of `frac * len`, used for every fractional boundary so
/// layouts are identical across implementations.
#[inline]
fn frac_px(frac: f64, len: usize) -> usize {
    (frac * len as f64 + 0.5).floor() as usize
}

/// Picks the face box to use when a detector reports several candidates:
/// the one with the largest area, ties going to the earliest.
pub fn largest_face(boxes: &[Rect]) -> Option<Rect> {
    boxes.iter().copied().reduce(|best, r| {
        if r.area() > best.area() {
            r
        } else {
            best
        }
    })
}

/// Widens a detector face box by 20% of its width on each side, clamped
/// to the frame. y and height are preserved.
pub fn expand_face(face: Rect, frame_w: usize, frame_h: usize) -> Result<Rect> {
    if face.w == 0 || face.h == 0 {
        return Err(Error::InvalidInput(format!(
            "degenerate face box {}x{}",
            face.w, face.h
        )));
    }
    if !face.fits_in(frame_w, frame_h) {
        return Err(Error::InvalidInput(format!(
            "face box {face:?} does not fit in {frame_w}x{frame_h} frame"
        )));
    }
    let margin = frac_px(0.20, face.w);
    let x = face.x.saturating_sub(margin);
    let right = (face.x + face.w + margin).min(frame_w);
    Ok(Rect::new(x, face.y, right - x, face.h))
}

/// Computes the skin-sample and hand rectangles for a crop of the given
/// size. The crop must be at least 8x8 so every sub-rectangle keeps a
/// positive area.
pub fn layout_for_crop(crop_w: usize, crop_h: usize) -> Result<RoiLayout> {
    if crop_w < 8 || crop_h < 8 {
        return Err(Error::InvalidInput(format!(
            "crop {crop_w}x{crop_h} too small for ROI layout (minimum 8x8)"
        )));
    }
    let sample_w = frac_px(0.40, crop_w);
    let sample_h = frac_px(0.10, crop_h);
    let sample = Rect::new(
        frac_px(0.5, crop_w - sample_w),
        frac_px(0.5, crop_h),
        sample_w,
        sample_h,
    );

    let hand_w = frac_px(0.25, crop_w);
    let hand_h = frac_px(0.25, crop_h);
    let hand_y = crop_h - hand_h;

    Ok(RoiLayout {
        crop: Rect::new(0, 0, crop_w, crop_h),
        skin_sample: sample,
        hand_region_1: Rect::new(0, hand_y, hand_w, hand_h),
        hand_region_2: Rect::new(crop_w - hand_w, hand_y, hand_w, hand_h),
    })
}

/// Copies the sub-image under `r` out of `img`.
pub fn crop(img: &ImageBuffer, r: Rect) -> Result<ImageBuffer> {
    if !r.fits_in(img.width(), img.height()) {
        return Err(Error::InvalidInput(format!(
            "crop rect {r:?} out of bounds for {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let mut pixels = Vec::with_capacity(r.w * r.h);
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            pixels.push(img.get(x, y));
        }
    }
    ImageBuffer::from_pixels(r.w, r.h, pixels)
}

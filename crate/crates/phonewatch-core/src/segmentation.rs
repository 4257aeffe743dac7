//! Skin segmentation: per-color-space 3D histograms over the skin sample,
//! fractional thresholding, and intersection of the HSV and YCrCb masks.

use crate::error::{Error, Result};
use crate::imaging::{quantize, rgb_to_hsv, rgb_to_ycrcb, ImageBuffer, QuantizedImage};
use crate::roi::{Rect, RoiLayout};

/// Default fraction of sample pixels a color bin must hold for that color
/// to count as skin.
pub const DEFAULT_SKIN_FRACTION: f64 = 0.05;

/// 8x8x8 histogram of quantized color triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorHistogram3D {
    counts: Box<[u32; 512]>,
    total: u32,
}

impl ColorHistogram3D {
    #[inline]
    fn bin(cell: [u8; 3]) -> usize {
        (cell[0] as usize) * 64 + (cell[1] as usize) * 8 + cell[2] as usize
    }

    /// Count of sample pixels whose quantized triple equals `cell`.
    #[inline]
    pub fn count(&self, cell: [u8; 3]) -> u32 {
        self.counts[Self::bin(cell)]
    }

    /// Number of pixels the histogram was built from.
    pub fn total(&self) -> u32 {
        self.total
    }
}

/// Binary raster aligned to a crop; true marks a skin pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkinMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl SkinMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "bit count {} does not match {width}x{height}",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of set pixels over the whole mask.
    pub fn count_true(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Number of set pixels inside `r`, which must fit in the mask.
    pub fn count_true_in(&self, r: Rect) -> usize {
        let mut n = 0;
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                if self.get(x, y) {
                    n += 1;
                }
            }
        }
        n
    }
}

/// Counts quantized color triples over the `sample` rectangle of `q`.
pub fn build_histogram(q: &QuantizedImage, sample: Rect) -> Result<ColorHistogram3D> {
    if sample.area() == 0 {
        return Err(Error::InvalidInput("empty histogram sample".into()));
    }
    if !sample.fits_in(q.width(), q.height()) {
        return Err(Error::InvalidInput(format!(
            "sample rect {sample:?} out of bounds for {}x{} image",
            q.width(),
            q.height()
        )));
    }
    let mut counts = Box::new([0u32; 512]);
    for y in sample.y..sample.y + sample.h {
        for x in sample.x..sample.x + sample.w {
            counts[ColorHistogram3D::bin(q.get(x, y))] += 1;
        }
    }
    Ok(ColorHistogram3D {
        counts,
        total: sample.area() as u32,
    })
}

/// Marks every pixel whose color bin holds at least `frac` of the sample.
///
/// The comparison is on the quotient `count / total >= frac` so that a bin
/// holding exactly the threshold share (say 20 of 400 at 5%) is included
/// despite binary rounding of the fraction.
pub fn threshold_mask(q: &QuantizedImage, hist: &ColorHistogram3D, frac: f64) -> Result<SkinMask> {
    if hist.total() == 0 {
        return Err(Error::InvalidInput("histogram has zero total".into()));
    }
    let total = hist.total() as f64;
    let mut mask = SkinMask::new(q.width(), q.height());
    for y in 0..q.height() {
        for x in 0..q.width() {
            let share = hist.count(q.get(x, y)) as f64 / total;
            mask.set(x, y, share >= frac);
        }
    }
    Ok(mask)
}

/// Bitwise AND of two masks with equal dimensions.
pub fn intersect(a: &SkinMask, b: &SkinMask) -> Result<SkinMask> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::InvalidInput(format!(
            "mask dimension mismatch: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let bits = a
        .bits
        .iter()
        .zip(&b.bits)
        .map(|(&x, &y)| x && y)
        .collect();
    SkinMask::from_bits(a.width(), a.height(), bits)
}

/// Full segmentation of a face crop: convert to HSV and YCrCb, quantize,
/// histogram the skin sample in each space, threshold both at `frac`, and
/// intersect the two masks.
pub fn segment_skin_with(crop: &ImageBuffer, layout: &RoiLayout, frac: f64) -> Result<SkinMask> {
    if crop.width() != layout.crop.w || crop.height() != layout.crop.h {
        return Err(Error::InvalidInput(format!(
            "crop {}x{} does not match layout {}x{}",
            crop.width(),
            crop.height(),
            layout.crop.w,
            layout.crop.h
        )));
    }
    let hsv = quantize(&rgb_to_hsv(crop));
    let ycc = quantize(&rgb_to_ycrcb(crop));
    let hsv_hist = build_histogram(&hsv, layout.skin_sample)?;
    let ycc_hist = build_histogram(&ycc, layout.skin_sample)?;
    let hsv_mask = threshold_mask(&hsv, &hsv_hist, frac)?;
    let ycc_mask = threshold_mask(&ycc, &ycc_hist, frac)?;
    intersect(&hsv_mask, &ycc_mask)
}

/// [`segment_skin_with`] at the default 5% threshold.
pub fn segment_skin(crop: &ImageBuffer, layout: &RoiLayout) -> Result<SkinMask> {
    segment_skin_with(crop, layout, DEFAULT_SKIN_FRACTION)
}

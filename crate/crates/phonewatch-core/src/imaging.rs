//! Pixel-level primitives: the RGB image buffer, HSV and YCrCb color
//! conversion, and per-channel quantization down to 8 levels.
//!
//! Conventions (fixed so that outputs are bit-exact across platforms):
//! hue is scaled from [0°, 360°) onto [0, 255]; YCrCb is full-range
//! BT.601 with a chroma offset of 128; all conversions round half away
//! from zero and clamp to [0, 255].

use crate::error::{Error, Result};

/// Row-major raster of 3-channel pixels, 8 bits per channel.
///
/// The same buffer type carries RGB input frames and converted HSV /
/// YCrCb planes; the channel meaning is whatever the producing
/// operation documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl ImageBuffer {
    /// Creates a black image of the given dimensions.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels: vec![[0, 0, 0]; width * height],
        })
    }

    /// Wraps an existing pixel vector; its length must be `width * height`.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "pixel count {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, px: [u8; 3]) {
        self.pixels[y * self.width + x] = px;
    }

    fn map_pixels(&self, f: impl Fn([u8; 3]) -> [u8; 3]) -> ImageBuffer {
        ImageBuffer {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&px| f(px)).collect(),
        }
    }
}

/// Raster with every channel quantized to one of 8 levels (value / 32),
/// so a pixel can take 8^3 = 512 distinct triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedImage {
    width: usize,
    height: usize,
    cells: Vec<[u8; 3]>,
}

impl QuantizedImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[[u8; 3]] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.cells[y * self.width + x]
    }
}

/// Rounds half away from zero and clamps to the byte range.
#[inline]
fn to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Converts one RGB triple to HSV, all channels scaled to [0, 255].
#[inline]
pub fn rgb_pixel_to_hsv(px: [u8; 3]) -> [u8; 3] {
    let r = px[0] as f64 / 255.0;
    let g = px[1] as f64 / 255.0;
    let b = px[2] as f64 / 255.0;

    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let h_deg = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta) % 6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let h_deg = if h_deg < 0.0 { h_deg + 360.0 } else { h_deg };

    let s = if max == 0.0 { 0.0 } else { delta / max };

    [
        to_byte(h_deg * 255.0 / 360.0),
        to_byte(s * 255.0),
        to_byte(max * 255.0),
    ]
}

/// Converts one RGB triple to full-range BT.601 YCrCb with chroma
/// centered at 128.
#[inline]
pub fn rgb_pixel_to_ycrcb(px: [u8; 3]) -> [u8; 3] {
    let r = px[0] as f64;
    let g = px[1] as f64;
    let b = px[2] as f64;

    let y = 0.299 * r + 0.587 * g + 0.114 * b;
    let cr = (r - y) * 0.713 + 128.0;
    let cb = (b - y) * 0.564 + 128.0;

    [to_byte(y), to_byte(cr), to_byte(cb)]
}

/// Maps an RGB image to HSV layout. Pure; the input is untouched.
pub fn rgb_to_hsv(img: &ImageBuffer) -> ImageBuffer {
    img.map_pixels(rgb_pixel_to_hsv)
}

/// Maps an RGB image to YCrCb layout. Pure; the input is untouched.
pub fn rgb_to_ycrcb(img: &ImageBuffer) -> ImageBuffer {
    img.map_pixels(rgb_pixel_to_ycrcb)
}

/// Divides every channel by 32, collapsing 256 levels to 8.
pub fn quantize(img: &ImageBuffer) -> QuantizedImage {
    QuantizedImage {
        width: img.width,
        height: img.height,
        cells: img
            .pixels
            .iter()
            .map(|px| [px[0] / 32, px[1] / 32, px[2] / 32])
            .collect(),
    }
}

//! Minimal netpbm support: binary PPM (P6) in and out for frames, binary
//! PBM (P4) out for masks. No other formats.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;
use crate::segmentation::SkinMask;

/// Reads one whitespace-delimited ASCII token, skipping `#` comments.
fn read_token(r: &mut impl Read) -> Result<String> {
    let mut tok = String::new();
    let mut in_comment = false;
    loop {
        let mut byte = [0u8; 1];
        let n = r.read(&mut byte)?;
        if n == 0 {
            if tok.is_empty() {
                return Err(Error::Parse("unexpected end of PNM header".into()));
            }
            return Ok(tok);
        }
        let c = byte[0];
        if in_comment {
            if c == b'\n' {
                in_comment = false;
            }
            continue;
        }
        match c {
            b'#' => in_comment = true,
            c if c.is_ascii_whitespace() => {
                if !tok.is_empty() {
                    return Ok(tok);
                }
            }
            c => tok.push(c as char),
        }
    }
}

fn parse_dim(tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad PNM header field: {tok:?}")))
}

/// Decodes a binary PPM (P6, maxval 255) into an [`ImageBuffer`].
pub fn read_ppm(r: &mut impl Read) -> Result<ImageBuffer> {
    let magic = read_token(r)?;
    if magic != "P6" {
        return Err(Error::Parse(format!(
            "unsupported PNM magic {magic:?}, only P6 is accepted"
        )));
    }
    let width = parse_dim(&read_token(r)?)?;
    let height = parse_dim(&read_token(r)?)?;
    let maxval = parse_dim(&read_token(r)?)?;
    if maxval != 255 {
        return Err(Error::Parse(format!(
            "unsupported PPM maxval {maxval}, only 255 is accepted"
        )));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Parse("PPM dimensions overflow".into()))?;
    let mut raw = vec![0u8; n * 3];
    r.read_exact(&mut raw)
        .map_err(|_| Error::Parse("truncated PPM pixel data".into()))?;
    let pixels = raw.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    ImageBuffer::from_pixels(width, height, pixels)
}

pub fn read_ppm_file(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let mut r = BufReader::new(File::open(path)?);
    read_ppm(&mut r)
}

/// Encodes an [`ImageBuffer`] as binary PPM (P6, maxval 255).
pub fn write_ppm(w: &mut impl Write, img: &ImageBuffer) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", img.width(), img.height())?;
    let mut raw = Vec::with_capacity(img.pixels().len() * 3);
    for px in img.pixels() {
        raw.extend_from_slice(px);
    }
    w.write_all(&raw)?;
    Ok(())
}

pub fn write_ppm_file(path: impl AsRef<Path>, img: &ImageBuffer) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ppm(&mut w, img)?;
    w.flush()?;
    Ok(())
}

/// Encodes a mask as binary PBM (P4). Set bits (skin) map to 1, which a
/// PBM viewer renders as black.
pub fn write_pbm(w: &mut impl Write, mask: &SkinMask) -> Result<()> {
    write!(w, "P4\n{} {}\n", mask.width(), mask.height())?;
    let row_bytes = mask.width().div_ceil(8);
    let mut packed = vec![0u8; row_bytes * mask.height()];
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                packed[y * row_bytes + x / 8] |= 0x80 >> (x % 8);
            }
        }
    }
    w.write_all(&packed)?;
    Ok(())
}

pub fn write_pbm_file(path: impl AsRef<Path>, mask: &SkinMask) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pbm(&mut w, mask)?;
    w.flush()?;
    Ok(())
}

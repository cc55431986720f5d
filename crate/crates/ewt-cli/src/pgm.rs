//! Binary PGM ("P5") reading and writing, 8- and 16-bit.
//!
//! The reader accepts the full header grammar (whitespace runs and `#`
//! comments); the writer always emits the canonical header
//! `P5\n<width> <height>\n<maxval>\n`, so files written here round-trip
//! byte-identically. Pixel values map to reals with no rescaling; 16-bit
//! samples are big-endian per the format.

use std::fs;
use std::path::Path;

use ewt_core::Image;

use crate::error::{CliError, CliResult};

/// An image plus the maxval it was stored with.
#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub image: Image,
    pub maxval: u16,
}

fn format_err(path: &Path, offset: usize, msg: &str) -> CliError {
    CliError::Data(format!(
        "{}: byte {offset}: {msg}",
        path.display()
    ))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn read_number(&mut self, path: &Path, what: &str) -> CliResult<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(format_err(path, start, &format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(path, start, &format!("unreadable {what}")))
    }
}

/// Read a binary PGM, returning the image and its declared maxval.
pub fn load_pgm(path: &Path) -> CliResult<PgmImage> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(format_err(path, 0, "bad magic, expected P5"));
    }
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 2,
    };
    let width = cur.read_number(path, "width")? as usize;
    let height = cur.read_number(path, "height")? as usize;
    let maxval = cur.read_number(path, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(format_err(path, cur.pos, "maxval out of range"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(format_err(path, cur.pos, "missing raster separator"));
    }
    cur.pos += 1;

    let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(bytes_per_sample))
        .ok_or_else(|| format_err(path, cur.pos, "dimension overflow"))?;
    let raster = &bytes[cur.pos..];
    if raster.len() < expected {
        return Err(format_err(
            path,
            bytes.len(),
            &format!(
                "truncated raster: {} bytes present, {expected} needed",
                raster.len()
            ),
        ));
    }
    let mut pixels = Vec::with_capacity(width * height);
    if bytes_per_sample == 1 {
        pixels.extend(raster[..expected].iter().map(|&b| b as f64));
    } else {
        for pair in raster[..expected].chunks_exact(2) {
            pixels.push(u16::from_be_bytes([pair[0], pair[1]]) as f64);
        }
    }
    let image = Image::new(height, width, pixels)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(PgmImage {
        image,
        maxval: maxval as u16,
    })
}

/// Encode with the canonical header. Pixel values must be integers within
/// `[0, maxval]`.
pub fn encode_pgm(image: &Image, maxval: u16) -> CliResult<Vec<u8>> {
    if maxval == 0 {
        return Err(CliError::Usage(String::from("maxval must be positive")));
    }
    let mut out = format!("P5\n{} {}\n{}\n", image.cols(), image.rows(), maxval).into_bytes();
    for (i, &v) in image.pixels().iter().enumerate() {
        if v < 0.0 || v > maxval as f64 || v.fract() != 0.0 {
            return Err(CliError::Data(format!(
                "pixel {i} = {v} is not an integer in [0, {maxval}]"
            )));
        }
        let q = v as u32;
        if maxval > 255 {
            out.extend_from_slice(&(q as u16).to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    Ok(out)
}

pub fn save_pgm(image: &Image, maxval: u16, path: &Path) -> CliResult<()> {
    let bytes = encode_pgm(image, maxval)?;
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// 8-bit preview: each plane affinely rescaled to `[0, 255]` (constant
/// planes map to zero); scientific values belong in the f64 containers.
pub fn save_preview(image: &Image, path: &Path) -> CliResult<()> {
    let (lo, hi) = image
        .pixels()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
    let preview = Image::new(
        image.rows(),
        image.cols(),
        image
            .pixels()
            .iter()
            .map(|&v| ((v - lo) * scale).round().clamp(0.0, 255.0))
            .collect(),
    )
    .map_err(CliError::from)?;
    save_pgm(&preview, 255, path)
}

/// Round-and-clamp quantization for reconstructed images.
pub fn save_quantized(image: &Image, maxval: u16, path: &Path) -> CliResult<()> {
    let quantized = Image::new(
        image.rows(),
        image.cols(),
        image
            .pixels()
            .iter()
            .map(|&v| v.round().clamp(0.0, maxval as f64))
            .collect(),
    )
    .map_err(CliError::from)?;
    save_pgm(&quantized, maxval, path)
}

use std::fmt;
use std::io::{BufReader, Cursor};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TimeFreqMatrix;
use crate::error::{invalid, Error, Result};
use crate::fsutil::write_atomic;

/// Default dynamic range kept below the maximum, in dB.
pub const DEFAULT_FLOOR_DB: f64 = -80.0;

/// 8-bit image in matrix orientation (row 0 = lowest frequency).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Image(format!("empty image {rows}x{cols}")));
        }
        if pixels.len() != rows * cols {
            return Err(Error::Image(format!("{} pixels for {rows}x{cols}", pixels.len())));
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn filled(rows: usize, cols: usize, value: u8) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> u8) -> Result<Self> {
        let pixels = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| f(r, c)).collect();
        Self::new(rows, cols, pixels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: u8) {
        self.pixels[row * self.cols + col] = v;
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.pixels[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn pixel_sum(&self) -> u64 {
        self.pixels.iter().map(|&p| p as u64).sum()
    }

    /// Rows in reverse order, so that low frequencies end up at the bottom
    /// when the image is displayed top-down.
    pub fn flipped_vertically(&self) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for r in (0..self.rows).rev() {
            pixels.extend_from_slice(self.row(r));
        }
        Self { pixels, ..*self }
    }
}

/// `max(20 log10(v + 1e-10), peak + floor_db)` with `peak` the largest dB value.
pub fn to_db(m: &TimeFreqMatrix, floor_db: f64) -> Result<TimeFreqMatrix> {
    if !(floor_db < 0.0) {
        return Err(invalid(format!("dB floor must be negative, got {floor_db}")));
    }
    let db = m.map(|v| 20.0 * (v + 1e-10).log10());
    let limit = db.max() + floor_db;
    Ok(db.map(|v| v.max(limit)))
}

/// Linear map of `[min, max]` onto `[0, 255]`, rounded down. A constant
/// matrix maps to all zeros.
pub fn to_gray(m: &TimeFreqMatrix) -> Result<GrayImage> {
    let (lo, hi) = (m.min(), m.max());
    let range = hi - lo;
    let pixels = if range > 0.0 {
        m.values()
            .iter()
            // divide first: (hi - lo) / range is exactly 1, so the maximum lands on 255
            .map(|&v| ((v - lo) / range * 255.0).floor().clamp(0.0, 255.0) as u8)
            .collect()
    } else {
        vec![0; m.values().len()]
    };
    GrayImage::new(m.rows(), m.cols(), pixels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    Png,
    Pgm,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Pgm => "pgm",
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "png" => Ok(ImageFormat::Png),
            "pgm" => Ok(ImageFormat::Pgm),
            other => Err(invalid(format!("unknown image format '{other}'"))),
        }
    }
}

pub(crate) fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    // P5 stores width (columns) before height (rows)
    let mut out = format!("P5\n{} {}\n255\n", img.cols, img.rows).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub(crate) fn encode_png(img: &GrayImage) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, img.cols as u32, img.rows as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| Error::Image(e.to_string()))?;
        writer
            .write_image_data(&img.pixels)
            .map_err(|e| Error::Image(e.to_string()))?;
    }
    Ok(buf)
}

/// Encoded bytes of `img` in `format`.
pub fn encode_image(img: &GrayImage, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Pgm => Ok(encode_pgm(img)),
        ImageFormat::Png => encode_png(img),
    }
}

/// Writes an 8-bit grayscale PNG or binary PGM (P5), rows top to bottom.
pub fn export_image(img: &GrayImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    write_atomic(path.as_ref(), &encode_image(img, format)?)
}

fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let bad = |m: &str| Error::Image(format!("PGM: {m}"));
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("not a binary P5 file"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header field"))?;
    }
    let [cols, rows, maxval] = fields;
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    pos += 1; // single whitespace byte after maxval
    let data = bytes.get(pos..pos + rows * cols).ok_or_else(|| bad("truncated pixel data"))?;
    GrayImage::new(rows, cols, data.to_vec())
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let err = |e: png::DecodingError| Error::Image(e.to_string());
    let mut decoder = png::Decoder::new(BufReader::new(Cursor::new(bytes)));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(err)?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or_else(|| Error::Image("PNG too large".into()))?];
    let info = reader.next_frame(&mut buf).map_err(err)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let data = &buf[..info.buffer_size()];
    let pixels = match info.color_type {
        png::ColorType::Grayscale | png::ColorType::GrayscaleAlpha => {
            data.chunks(channels).map(|p| p[0]).collect()
        }
        _ => data
            .chunks(channels)
            .map(|p| ((p[0] as u32 + p[1] as u32 + p[2] as u32) / 3) as u8)
            .collect(),
    };
    GrayImage::new(h, w, pixels)
}

/// Reads a PNG or binary PGM, chosen by content.
pub fn read_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else {
        decode_png(&bytes)
    }
}

/// Bilinear resampling to `rows x cols` using pixel-centre alignment.
pub fn resize_bilinear(img: &GrayImage, rows: usize, cols: usize) -> Result<GrayImage> {
    GrayImage::new(rows, cols, resize_values(img, rows, cols)?.iter().map(|v| v.round() as u8).collect())
}

/// Bilinear resampling returning unrounded values in `[0, 255]`.
pub(crate) fn resize_values(img: &GrayImage, rows: usize, cols: usize) -> Result<Vec<f64>> {
    if rows == 0 || cols == 0 {
        return Err(Error::Image(format!("cannot resize to {rows}x{cols}")));
    }
    let sample = |n_in: usize, n_out: usize, i: usize| -> (usize, usize, f64) {
        let pos = ((i as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).clamp(0.0, (n_in - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n_in - 1);
        (lo, hi, pos - lo as f64)
    };
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (r0, r1, fr) = sample(img.rows, rows, r);
        for c in 0..cols {
            let (c0, c1, fc) = sample(img.cols, cols, c);
            let top = img.get(r0, c0) as f64 * (1.0 - fc) + img.get(r0, c1) as f64 * fc;
            let bottom = img.get(r1, c0) as f64 * (1.0 - fc) + img.get(r1, c1) as f64 * fc;
            out.push(top * (1.0 - fr) + bottom * fr);
        }
    }
    Ok(out)
}

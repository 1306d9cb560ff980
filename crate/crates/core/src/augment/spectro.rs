//! Transforms on quantized spectrogram images. Row 0 is the lowest frequency.
//! Every transform keeps the image size and clamps to [0, 255].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::repr::GrayImage;
use crate::rng::RngStream;

/// Moves rows by `row_shift` (positive = up in frequency, zero fill) and
/// columns by `col_shift` (positive = later in time, circular).
pub fn spec_pitch_time_shift(img: &GrayImage, row_shift: i64, col_shift: i64) -> Result<GrayImage> {
    let (rows, cols) = (img.rows() as i64, img.cols() as i64);
    if row_shift.abs() >= rows || col_shift.abs() > cols {
        return Err(invalid(format!(
            "shift ({row_shift}, {col_shift}) out of range for {rows}x{cols} image"
        )));
    }
    GrayImage::from_fn(img.rows(), img.cols(), |r, c| {
        let src = r as i64 - row_shift;
        if src < 0 || src >= rows {
            0
        } else {
            img.get(src as usize, (c as i64 - col_shift).rem_euclid(cols) as usize)
        }
    })
}

/// Piecewise-linear frequency warp
/// `G(f) = alpha f` below `f0`, and the line through `(f0, alpha f0)` and
/// `(fmax, fmax)` above it. Frequencies are in rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VtlnParams {
    pub alpha: f64,
    pub f0: f64,
    pub fmax: f64,
}

impl VtlnParams {
    pub fn new(alpha: f64, f0: f64, fmax: f64) -> Result<Self> {
        if !(0.0 < f0 && f0 < fmax && fmax.is_finite()) {
            return Err(invalid(format!("VTLN needs 0 < f0 < fmax, got {f0}, {fmax}")));
        }
        if !(alpha > 0.0 && alpha * f0 < fmax) {
            return Err(invalid(format!("VTLN alpha {alpha} maps f0 past fmax")));
        }
        Ok(Self { alpha, f0, fmax })
    }

    /// `G(f)`. Written so that `G(0) = 0`, `G(fmax) = fmax` and `alpha = 1`
    /// give exact results in floating point.
    pub fn warp(&self, f: f64) -> f64 {
        if f < self.f0 {
            self.alpha * f
        } else {
            f + (self.alpha - 1.0) * self.f0 * (self.fmax - f) / (self.fmax - self.f0)
        }
    }

    /// `G^-1(g)`: the same family with knot `alpha f0` and factor `1/alpha`.
    pub fn inverse(&self, g: f64) -> f64 {
        let knot = self.alpha * self.f0;
        if g < knot {
            g / self.alpha
        } else {
            g + (1.0 - self.alpha) * self.f0 * (self.fmax - g) / (self.fmax - knot)
        }
    }
}

fn lerp_column(img: &GrayImage, col: usize, pos: f64) -> f64 {
    let last = img.rows() - 1;
    let pos = pos.clamp(0.0, last as f64);
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(last);
    let (a, b) = (img.get(lo, col) as f64, img.get(hi, col) as f64);
    a + (pos - lo as f64) * (b - a)
}

/// Applies one warp per temporal slice; `slices.len()` slices of (nearly)
/// equal width. Output row `G(f)` takes the value of input row `f`.
pub fn vtln_warp_slices(img: &GrayImage, slices: &[VtlnParams]) -> Result<GrayImage> {
    let n = slices.len();
    if n == 0 || img.cols() < n {
        return Err(invalid(format!("cannot cut {} columns into {n} slices", img.cols())));
    }
    let cols = img.cols();
    let mut out = img.clone();
    for (s, p) in slices.iter().enumerate() {
        for c in s * cols / n..(s + 1) * cols / n {
            for r in 0..img.rows() {
                let v = lerp_column(img, c, p.inverse(r as f64));
                out.set(r, c, v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VtlnPreset {
    /// `alpha` is drawn uniformly in `[a, b]` per slice.
    pub a: f64,
    pub b: f64,
    /// `f0` as a fraction of the top row index.
    pub f0_frac: f64,
    pub n_slices: usize,
}

impl Default for VtlnPreset {
    fn default() -> Self {
        Self { a: 0.9, b: 1.1, f0_frac: 0.6, n_slices: 10 }
    }
}

/// VTLN with an independent `alpha` for each of `n_slices` temporal slices.
/// `fmax` is the top row.
pub fn vtln_warp(img: &GrayImage, p: &VtlnPreset, rng: &mut RngStream) -> Result<GrayImage> {
    if img.rows() < 2 {
        return Err(invalid("VTLN needs at least two rows"));
    }
    let fmax = (img.rows() - 1) as f64;
    let f0 = p.f0_frac * fmax;
    let slices = (0..p.n_slices)
        .map(|_| VtlnParams::new(rng.uniform(p.a, p.b)?, f0, fmax))
        .collect::<Result<Vec<_>>>()?;
    vtln_warp_slices(img, &slices)
}

/// Swaps the column blocks before and after 1-based column `t`: output is
/// columns `t..=M` followed by `1..t`.
pub fn spec_circular_time_shift(img: &GrayImage, t: usize) -> Result<GrayImage> {
    let m = img.cols();
    if t < 1 || t > m {
        return Err(invalid(format!("time shift {t} outside [1, {m}]")));
    }
    GrayImage::from_fn(img.rows(), m, |r, c| img.get(r, (c + t - 1) % m))
}

/// Draws `t` uniformly in `[1, M]`.
pub fn random_circular_time_shift(img: &GrayImage, rng: &mut RngStream) -> Result<GrayImage> {
    let t = rng.int_inclusive(1, img.cols() as i64) as usize;
    spec_circular_time_shift(img, t)
}

/// Band widths and counts for row/column masking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskSpec {
    pub row_width: usize,
    pub col_width: usize,
    pub max_rows: usize,
    pub max_cols: usize,
}

impl MaskSpec {
    pub fn new(row_width: usize, col_width: usize, max_rows: usize, max_cols: usize) -> Result<Self> {
        if row_width == 0 || col_width == 0 {
            return Err(invalid("mask widths must be at least 1"));
        }
        Ok(Self { row_width, col_width, max_rows, max_cols })
    }

    fn check(&self, img: &GrayImage) -> Result<()> {
        if self.row_width == 0 || self.col_width == 0 {
            return Err(invalid("mask widths must be at least 1"));
        }
        if (self.max_rows > 0 && self.row_width > img.rows())
            || (self.max_cols > 0 && self.col_width > img.cols())
        {
            return Err(invalid(format!(
                "mask bands {}x{} do not fit a {}x{} image",
                self.row_width,
                self.col_width,
                img.rows(),
                img.cols()
            )));
        }
        Ok(())
    }
}

/// Zeroes `n_rows` row bands and `n_cols` column bands at random positions.
fn zero_bands(img: &mut GrayImage, m: &MaskSpec, n_rows: usize, n_cols: usize, rng: &mut RngStream) {
    for _ in 0..n_rows {
        let start = rng.int_inclusive(0, (img.rows() - m.row_width) as i64) as usize;
        for r in start..start + m.row_width {
            for c in 0..img.cols() {
                img.set(r, c, 0);
            }
        }
    }
    for _ in 0..n_cols {
        let start = rng.int_inclusive(0, (img.cols() - m.col_width) as i64) as usize;
        for c in start..start + m.col_width {
            for r in 0..img.rows() {
                img.set(r, c, 0);
            }
        }
    }
}

/// Horizontal displacement at each column: zero at both ends, random at
/// `n_anchors` evenly spaced interior anchors, linear in between.
fn displacement_field(cols: usize, n_anchors: usize, max_disp: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    let last = (cols - 1) as f64;
    let mut knots = vec![(0.0, 0.0)];
    for k in 0..n_anchors {
        let pos = (k + 1) as f64 * last / (n_anchors + 1) as f64;
        knots.push((pos, rng.uniform(-max_disp, max_disp)?));
    }
    knots.push((last, 0.0));
    Ok((0..cols)
        .map(|c| {
            let x = c as f64;
            let k = knots.partition_point(|k| k.0 <= x).clamp(1, knots.len() - 1);
            let ((x0, d0), (x1, d1)) = (knots[k - 1], knots[k]);
            if x1 == x0 {
                d0
            } else {
                d0 + (x - x0) * (d1 - d0) / (x1 - x0)
            }
        })
        .collect())
}

/// Horizontal-only warp followed by `max_rows` row bands and `max_cols`
/// column bands set to zero.
pub fn tps_warp_mask(
    img: &GrayImage,
    n_anchors: usize,
    max_disp: f64,
    mask: &MaskSpec,
    rng: &mut RngStream,
) -> Result<GrayImage> {
    mask.check(img)?;
    if !(max_disp >= 0.0 && max_disp.is_finite()) {
        return Err(invalid(format!("max displacement must be non-negative, got {max_disp}")));
    }
    let cols = img.cols();
    let disp = displacement_field(cols, n_anchors, max_disp, rng)?;
    let last = (cols - 1) as f64;
    let mut out = GrayImage::from_fn(img.rows(), cols, |r, c| {
        let src = (c as f64 - disp[c]).clamp(0.0, last);
        let lo = src.floor() as usize;
        let hi = (lo + 1).min(cols - 1);
        let (a, b) = (img.get(r, lo) as f64, img.get(r, hi) as f64);
        (a + (src - lo as f64) * (b - a)).round() as u8
    })?;
    zero_bands(&mut out, mask, mask.max_rows, mask.max_cols, rng);
    Ok(out)
}

/// Zeroes between 0 and `max_rows` random row bands and between 0 and
/// `max_cols` random column bands.
pub fn freq_time_mask(img: &GrayImage, mask: &MaskSpec, rng: &mut RngStream) -> Result<GrayImage> {
    mask.check(img)?;
    let n_rows = rng.int_inclusive(0, mask.max_rows as i64) as usize;
    let n_cols = rng.int_inclusive(0, mask.max_cols as i64) as usize;
    let mut out = img.clone();
    zero_bands(&mut out, mask, n_rows, n_cols, rng);
    Ok(out)
}

fn mult_noise_counted(img: &GrayImage, lo: f64, hi: f64, prob: f64, rng: &mut RngStream) -> Result<(GrayImage, usize)> {
    if !(lo <= hi) || !(0.0..=1.0).contains(&prob) {
        return Err(invalid(format!("noise needs lo <= hi and prob in [0, 1], got [{lo}, {hi}], {prob}")));
    }
    let mut out = img.clone();
    let mut hits = 0;
    for r in 0..img.rows() {
        for c in 0..img.cols() {
            if rng.bernoulli(prob) {
                hits += 1;
                let u = rng.uniform(lo, hi)?;
                out.set(r, c, (img.get(r, c) as f64 * u).round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Ok((out, hits))
}

/// Each pixel is multiplied, with probability `prob`, by `u ~ U[lo, hi]`.
pub fn mult_noise(img: &GrayImage, lo: f64, hi: f64, prob: f64, rng: &mut RngStream) -> Result<GrayImage> {
    Ok(mult_noise_counted(img, lo, hi, prob, rng)?.0)
}

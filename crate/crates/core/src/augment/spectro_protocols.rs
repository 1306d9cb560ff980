use serde::{Deserialize, Serialize};

use super::spectro::{
    freq_time_mask, mult_noise, random_circular_time_shift, spec_pitch_time_shift, tps_warp_mask,
    vtln_warp, MaskSpec, VtlnPreset,
};
use crate::error::Result;
use crate::repr::GrayImage;
use crate::rng::RngStream;

fn max_shift(size: usize, frac: f64) -> i64 {
    ((size as f64 * frac).round() as i64).clamp(0, size as i64 - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SspaPreset {
    /// Largest pitch shift as a fraction of the image height.
    pub row_shift_frac: f64,
    /// Largest time shift as a fraction of the image width.
    pub col_shift_frac: f64,
    pub vtln: VtlnPreset,
    pub tps_anchors: usize,
    /// Largest anchor displacement as a fraction of the image width.
    pub tps_disp_frac: f64,
    pub tps_mask: MaskSpec,
    pub noise_range: (f64, f64),
    pub noise_prob: f64,
}

impl Default for SspaPreset {
    fn default() -> Self {
        let s3 = 3f64.sqrt();
        Self {
            row_shift_frac: 0.05,
            col_shift_frac: 0.1,
            vtln: VtlnPreset::default(),
            tps_anchors: 5,
            tps_disp_frac: 0.05,
            tps_mask: MaskSpec { row_width: 5, col_width: 15, max_rows: 2, max_cols: 1 },
            // mean one, variance one
            noise_range: (1.0 - s3, 1.0 + s3),
            noise_prob: 0.3,
        }
    }
}

/// Five copies, one transform each.
pub fn augment_sspa(img: &GrayImage, rng: &RngStream, p: &SspaPreset) -> Result<Vec<GrayImage>> {
    let mut r = rng.fork(0);
    let (mr, mc) = (max_shift(img.rows(), p.row_shift_frac), max_shift(img.cols(), p.col_shift_frac));
    let shifted = spec_pitch_time_shift(img, r.int_inclusive(-mr, mr), r.int_inclusive(-mc, mc))?;
    let warped = vtln_warp(img, &p.vtln, &mut rng.fork(1))?;
    let rotated = random_circular_time_shift(img, &mut rng.fork(2))?;
    let disp = p.tps_disp_frac * img.cols() as f64;
    let tps = tps_warp_mask(img, p.tps_anchors, disp, &p.tps_mask, &mut rng.fork(3))?;
    let noisy = mult_noise(img, p.noise_range.0, p.noise_range.1, p.noise_prob, &mut rng.fork(4))?;
    Ok(vec![shifted, warped, rotated, tps, noisy])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SusaPreset {
    /// Pitch shift drawn as an integer number of rows in this range.
    pub row_shift: (i64, i64),
    pub vtln: VtlnPreset,
    pub mask: MaskSpec,
    pub noise_range: (f64, f64),
    pub noise_prob: f64,
}

impl Default for SusaPreset {
    fn default() -> Self {
        Self {
            row_shift: (-1, 1),
            vtln: VtlnPreset::default(),
            mask: MaskSpec { row_width: 1, col_width: 1, max_rows: 2, max_cols: 2 },
            noise_range: (0.3, 1.7),
            noise_prob: 0.1,
        }
    }
}

/// Twenty-nine copies, each chaining pitch shift, VTLN, circular time shift,
/// masking and multiplicative noise with fresh parameters.
pub fn augment_susa(img: &GrayImage, rng: &RngStream, p: &SusaPreset) -> Result<Vec<GrayImage>> {
    (0..29)
        .map(|copy| {
            let mut r = rng.fork(copy);
            let mut out = spec_pitch_time_shift(img, r.int_inclusive(p.row_shift.0, p.row_shift.1), 0)?;
            out = vtln_warp(&out, &p.vtln, &mut r)?;
            out = random_circular_time_shift(&out, &mut r)?;
            out = freq_time_mask(&out, &p.mask, &mut r)?;
            mult_noise(&out, p.noise_range.0, p.noise_range.1, p.noise_prob, &mut r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image() -> GrayImage {
        GrayImage::from_fn(64, 80, |r, c| ((r * 7 + c * 3) % 256) as u8).unwrap()
    }

    fn column_multiset(img: &GrayImage) -> Vec<Vec<u8>> {
        let mut cols: Vec<Vec<u8>> = (0..img.cols()).map(|c| img.column(c)).collect();
        cols.sort();
        cols
    }

    #[test]
    fn sspa_copies() {
        let img = image();
        let rng = RngStream::new(4);
        let out = augment_sspa(&img, &rng, &SspaPreset::default()).unwrap();
        assert_eq!(out.len(), 5);
        assert_eq!(column_multiset(&out[2]), column_multiset(&img));
        assert_eq!(out, augment_sspa(&img, &rng, &SspaPreset::default()).unwrap());
        for o in &out {
            assert_eq!((o.rows(), o.cols()), (64, 80));
        }
    }

    #[test]
    fn susa_copies() {
        let img = image();
        let rng = RngStream::new(5);
        let out = augment_susa(&img, &rng, &SusaPreset::default()).unwrap();
        assert_eq!(out.len(), 29);
        assert_eq!(out, augment_susa(&img, &rng, &SusaPreset::default()).unwrap());
        assert_ne!(out[0], out[1]);
    }
}

use std::f64::consts::PI;

use super::AudioClip;
use crate::error::{invalid, Result};

/// Default kernel length in taps at unit cutoff.
pub const DEFAULT_TAPS: usize = 64;

/// Blackman-windowed sinc interpolator evaluated at arbitrary fractional positions.
///
/// `cutoff` is the passband edge as a fraction of the input Nyquist frequency;
/// values below 1 widen the kernel proportionally so the filter stays
/// `taps` zero crossings long at the output rate.
#[derive(Debug, Clone, Copy)]
pub struct SincInterpolator {
    half_width: f64,
    cutoff: f64,
}

impl SincInterpolator {
    pub fn new(taps: usize, cutoff: f64) -> Self {
        let cutoff = cutoff.clamp(1e-6, 1.0);
        Self {
            half_width: (taps.max(2) / 2) as f64 / cutoff,
            cutoff,
        }
    }

    /// Value of the band-limited reconstruction of `x` at position `t` (in samples).
    /// Samples outside `x` are taken as zero.
    pub fn sample_at(&self, x: &[f64], t: f64) -> f64 {
        let lo = ((t - self.half_width).ceil().max(0.0)) as usize;
        let hi_f = (t + self.half_width).floor();
        if hi_f < 0.0 || x.is_empty() {
            return 0.0;
        }
        let hi = (hi_f as usize).min(x.len() - 1);
        if lo > hi {
            return 0.0;
        }
        // The tap offset d = t - k drops by exactly 1 per tap, so the sine of
        // the sinc argument and the cosine of the window phase are advanced
        // by fixed rotations instead of being re-evaluated.
        let step_a = PI * self.cutoff;
        let step_b = PI / self.half_width;
        let (sin_da, cos_da) = step_a.sin_cos();
        let (sin_db, cos_db) = step_b.sin_cos();
        let d0 = t - lo as f64;
        let (mut sin_a, mut cos_a) = (step_a * d0).sin_cos();
        let (mut sin_b, mut cos_b) = (step_b * d0).sin_cos();
        let mut acc = 0.0;
        for (i, &xk) in x[lo..=hi].iter().enumerate() {
            let d = d0 - i as f64;
            if d.abs() < self.half_width {
                let arg = step_a * d;
                let sinc = if arg.abs() < 1e-12 { 1.0 } else { sin_a / arg };
                let window = 0.42 + 0.5 * cos_b + 0.08 * (2.0 * cos_b * cos_b - 1.0);
                acc += xk * self.cutoff * sinc * window;
            }
            (sin_a, cos_a) = (sin_a * cos_da - cos_a * sin_da, cos_a * cos_da + sin_a * sin_da);
            (sin_b, cos_b) = (sin_b * cos_db - cos_b * sin_db, cos_b * cos_db + sin_b * sin_db);
        }
        acc
    }

    #[cfg(test)]
    fn kernel(&self, d: f64) -> f64 {
        let u = d / self.half_width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let arg = PI * self.cutoff * d;
        let sinc = if arg.abs() < 1e-12 { 1.0 } else { arg.sin() / arg };
        let window = 0.42 + 0.5 * (PI * u).cos() + 0.08 * (2.0 * PI * u).cos();
        self.cutoff * sinc * window
    }
}

/// Band-limited sample-rate conversion; output length is `round(len * new / old)`.
pub fn resample(clip: &AudioClip, new_rate: u32) -> Result<AudioClip> {
    if new_rate == 0 {
        return Err(invalid("resample: new rate must be positive"));
    }
    let old_rate = clip.sample_rate();
    if new_rate == old_rate {
        return Ok(clip.clone());
    }
    let ratio = new_rate as f64 / old_rate as f64;
    let out = stretch_samples(clip.samples(), ratio, DEFAULT_TAPS);
    AudioClip::new(out, new_rate)
}

/// Resamples `x` by `ratio` (output/input length) without touching any rate metadata.
pub(crate) fn stretch_samples(x: &[f64], ratio: f64, taps: usize) -> Vec<f64> {
    let out_len = ((x.len() as f64 * ratio).round() as usize).max(1);
    let interp = SincInterpolator::new(taps, ratio.min(1.0));
    let step = 1.0 / ratio;
    (0..out_len)
        .map(|j| interp.sample_at(x, j as f64 * step))
        .collect()
}

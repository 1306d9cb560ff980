use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{FreqAxis, TimeFreqMatrix};
use crate::audio::AudioClip;
use crate::dsp::{self, FftPair};
use crate::error::{invalid, Error, Result};

/// Framing and Gaussian window for the Gabor spectrogram.
///
/// The window is `exp(-pi * sigma2 * u^2)` with `u` measured in window
/// lengths from the window centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftParams {
    pub window_len: usize,
    pub hop: usize,
    pub sigma2: f64,
    pub fft_len: usize,
}

impl Default for StftParams {
    fn default() -> Self {
        Self {
            window_len: 1024,
            hop: 256,
            sigma2: Self::sigma2_for_std(1.0 / 6.0),
            fft_len: 1024,
        }
    }
}

impl StftParams {
    /// Width parameter giving a Gaussian standard deviation of `std`
    /// window lengths.
    pub fn sigma2_for_std(std: f64) -> f64 {
        1.0 / (2.0 * PI * std * std)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0 < self.hop && self.hop <= self.window_len && self.window_len <= self.fft_len) {
            return Err(invalid(format!(
                "need 0 < hop ({}) <= window ({}) <= fft ({})",
                self.hop, self.window_len, self.fft_len
            )));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(invalid("sigma2 must be positive"));
        }
        Ok(())
    }

    pub fn window(&self) -> Vec<f64> {
        dsp::gaussian(self.window_len, self.sigma2)
    }

    pub fn frame_count(&self, len: usize) -> usize {
        1 + (len - self.window_len) / self.hop
    }
}

/// Complex one-sided spectra of every frame (`fft_len / 2 + 1` bins each).
pub(crate) fn gabor_frames(clip: &AudioClip, p: &StftParams) -> Result<Vec<Vec<dsp::C64>>> {
    p.validate()?;
    if clip.len() < p.window_len {
        return Err(Error::TooShort { needed: p.window_len, got: clip.len() });
    }
    let window = p.window();
    let fft = FftPair::new(p.fft_len);
    let bins = p.fft_len / 2 + 1;
    Ok((0..p.frame_count(clip.len()))
        .map(|j| {
            let mut spec = fft.frame_spectrum(clip.samples(), (j * p.hop) as isize, &window);
            spec.truncate(bins);
            spec
        })
        .collect())
}

/// Magnitude of the Gaussian-window STFT, `fft_len / 2 + 1` rows by
/// `1 + (len - window_len) / hop` columns.
pub fn dgt_spectrogram(clip: &AudioClip, p: &StftParams) -> Result<TimeFreqMatrix> {
    let frames = gabor_frames(clip, p)?;
    let rows = p.fft_len / 2 + 1;
    let cols = frames.len();
    let mut values = vec![0.0; rows * cols];
    for (j, frame) in frames.iter().enumerate() {
        for (k, c) in frame.iter().enumerate() {
            values[k * cols + j] = c.norm();
        }
    }
    let rate = clip.sample_rate() as f64;
    TimeFreqMatrix::new(
        rows,
        cols,
        values,
        FreqAxis::Uniform { bin_hz: rate / p.fft_len as f64 },
        p.hop as f64 / rate,
    )
}

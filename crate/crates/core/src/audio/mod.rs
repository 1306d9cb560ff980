//! Audio clips, WAV I/O and band-limited resampling.

mod resample;
mod wav;

pub use resample::{resample, SincInterpolator, DEFAULT_TAPS};
pub(crate) use resample::stretch_samples;
pub use wav::{load_wav, save_wav};

use crate::error::{Error, Result};

/// Mono audio held as 64-bit samples; quantization only happens on export.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidParameter("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::EmptyClip);
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Builds a clip from `n` samples of `f(t)` with `t` in seconds.
    pub fn from_fn(n: usize, sample_rate: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        let rate = sample_rate as f64;
        Self::new((0..n).map(|i| f(i as f64 / rate)).collect(), sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Mean power (mean of squared samples).
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    pub fn rms(&self) -> f64 {
        self.power().sqrt()
    }

    /// Same rate, new samples. Callers guarantee the samples are finite and non-empty.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert!(!samples.is_empty());
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        Self {
            samples,
            sample_rate: self.sample_rate,
        }
    }
}

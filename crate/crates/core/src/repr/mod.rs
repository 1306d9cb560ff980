//! Audio-to-image mappings: Gabor spectrogram, Mel spectrogram, gammatone
//! spectrogram and cochleagram, followed by dB scaling and 8-bit quantization.
//!
//! Matrices and images share one orientation: row 0 is the lowest frequency,
//! column 0 the earliest frame.

mod gammatone;
mod image;
mod mel;
mod stft;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use gammatone::{
    cochleagram, erb_bandwidth, gammatone_response, gammatone_spectrogram, GammatoneBank,
    GammatoneFilter,
};
pub use image::{
    encode_image, export_image, read_image, resize_bilinear, to_db, to_gray, GrayImage, ImageFormat,
    DEFAULT_FLOOR_DB,
};
pub use mel::{hz_to_mel, mel_spectrogram, mel_to_hz, MelBank};
pub use stft::{dgt_spectrogram, StftParams};

use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// Frequency axis of a [`TimeFreqMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum FreqAxis {
    /// Evenly spaced FFT bins, `bin_hz` apart starting at 0 Hz.
    Uniform { bin_hz: f64 },
    /// Explicit centre frequency per row.
    Centers(Vec<f64>),
}

/// Real matrix with rows = frequency (low to high) and columns = time frames.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFreqMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    pub axis: FreqAxis,
    pub frame_s: f64,
}

impl TimeFreqMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, axis: FreqAxis, frame_s: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!("empty matrix {rows}x{cols}")));
        }
        if values.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, values, axis, frame_s })
    }

    /// Matrix with no axis metadata; handy for tests and synthetic inputs.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let values = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, values, FreqAxis::Uniform { bin_hz: 1.0 }, 1.0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// The four supported mappings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Dgt,
    Mel,
    #[serde(rename = "gamma")]
    Gammatone,
    #[serde(rename = "cochlea")]
    Cochleagram,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Dgt,
        Representation::Mel,
        Representation::Gammatone,
        Representation::Cochleagram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Dgt => "dgt",
            Representation::Mel => "mel",
            Representation::Gammatone => "gamma",
            Representation::Cochleagram => "cochlea",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dgt" => Ok(Representation::Dgt),
            "mel" => Ok(Representation::Mel),
            "gamma" | "gammatone" => Ok(Representation::Gammatone),
            "cochlea" | "cochleagram" => Ok(Representation::Cochleagram),
            other => Err(Error::InvalidParameter(format!("unknown representation '{other}'"))),
        }
    }
}

/// Parameters for every representation; only the fields of the chosen one are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReprConfig {
    pub kind: Representation,
    pub stft: StftParams,
    pub mel_filters: usize,
    pub gamma_channels: usize,
    pub gamma_frame_len: usize,
    pub gamma_hop: usize,
    pub cochlea_win_s: f64,
    pub cochlea_hop_s: f64,
    /// dB floor below the maximum; `None` quantizes linear values.
    pub floor_db: Option<f64>,
}

impl Default for ReprConfig {
    fn default() -> Self {
        Self {
            kind: Representation::Dgt,
            stft: StftParams::default(),
            mel_filters: 64,
            gamma_channels: 64,
            gamma_frame_len: 1024,
            gamma_hop: 256,
            cochlea_win_s: 0.020,
            cochlea_hop_s: 0.010,
            floor_db: Some(DEFAULT_FLOOR_DB),
        }
    }
}

impl ReprConfig {
    pub fn with_kind(kind: Representation) -> Self {
        Self { kind, ..Self::default() }
    }
}

/// A representation bound to one sample rate, with its filterbank built once.
#[derive(Debug, Clone)]
pub struct Renderer {
    config: ReprConfig,
    sample_rate: u32,
    mel: Option<MelBank>,
    gamma: Option<GammatoneBank>,
}

impl Renderer {
    pub fn new(config: ReprConfig, sample_rate: u32) -> Result<Self> {
        config.stft.validate()?;
        let (mel, gamma) = match config.kind {
            Representation::Dgt => (None, None),
            Representation::Mel => (
                Some(MelBank::new(
                    config.mel_filters,
                    0.0,
                    sample_rate as f64 / 2.0,
                    config.stft.fft_len,
                    sample_rate,
                )?),
                None,
            ),
            Representation::Gammatone | Representation::Cochleagram => (
                None,
                Some(GammatoneBank::erb_spaced(
                    config.gamma_channels,
                    50.0,
                    0.45 * sample_rate as f64,
                    sample_rate,
                )?),
            ),
        };
        Ok(Self { config, sample_rate, mel, gamma })
    }

    pub fn config(&self) -> &ReprConfig {
        &self.config
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Linear-valued matrix for `clip` (which must be at the renderer's rate).
    pub fn matrix(&self, clip: &AudioClip) -> Result<TimeFreqMatrix> {
        if clip.sample_rate() != self.sample_rate {
            return Err(Error::InvalidParameter(format!(
                "clip rate {} differs from renderer rate {}",
                clip.sample_rate(),
                self.sample_rate
            )));
        }
        let c = &self.config;
        match c.kind {
            Representation::Dgt => dgt_spectrogram(clip, &c.stft),
            Representation::Mel => mel_spectrogram(clip, &c.stft, self.mel.as_ref().unwrap()),
            Representation::Gammatone => gammatone_spectrogram(
                clip,
                self.gamma.as_ref().unwrap(),
                c.gamma_frame_len,
                c.gamma_hop,
            ),
            Representation::Cochleagram => cochleagram(
                clip,
                self.gamma.as_ref().unwrap(),
                c.cochlea_win_s,
                c.cochlea_hop_s,
            ),
        }
    }

    /// Matrix, optional dB compression, then 8-bit quantization.
    pub fn render(&self, clip: &AudioClip) -> Result<GrayImage> {
        let m = self.matrix(clip)?;
        let m = match self.config.floor_db {
            Some(floor) => to_db(&m, floor)?,
            None => m,
        };
        to_gray(&m)
    }
}

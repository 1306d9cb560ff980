//! Time-scale modification: stretch a clip by `alpha` without changing its pitch.
//!
//! Every algorithm returns exactly `round(alpha * len)` samples. Frames are
//! centred: analysis frame `m` covers input samples around `round(m * H_a)`
//! and is written around output sample `m * H_s`.

mod hpss;
mod ola;
mod vocoder;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use hpss::{hpss_separate, hpss_tsm, BinaryMask, HPSS_MEDIAN_LEN};
pub use ola::{ola, wsola};
pub use vocoder::{phase_vocoder, pv_identity_phase_locking};

use crate::audio::AudioClip;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_WINDOW: usize = 1024;
pub const OLA_SYNTHESIS_HOP: usize = 512;
pub const PV_SYNTHESIS_HOP: usize = 256;
pub const WSOLA_TOLERANCE: usize = 512;

/// Stretch factors used by the TSM augmentation protocol.
pub const PROTOCOL_ALPHAS: [f64; 2] = [0.8, 1.5];
/// Alternative factor pair.
pub const WIDE_ALPHAS: [f64; 2] = [0.5, 1.8];

/// Hop sizes and window for one stretch. `alpha = synthesis_hop / analysis_hop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsmParams {
    analysis_hop: f64,
    synthesis_hop: usize,
    window_len: usize,
}

impl TsmParams {
    /// Fixes the synthesis hop and derives the (fractional) analysis hop.
    pub fn new(alpha: f64, synthesis_hop: usize, window_len: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("stretch factor must be positive, got {alpha}")));
        }
        if synthesis_hop == 0 || window_len == 0 {
            return Err(invalid("hop and window must be positive"));
        }
        let analysis_hop = synthesis_hop as f64 / alpha;
        if analysis_hop > window_len as f64 {
            return Err(invalid(format!(
                "analysis hop {analysis_hop} exceeds window {window_len}"
            )));
        }
        Ok(Self { analysis_hop, synthesis_hop, window_len })
    }

    /// Hann 1024, synthesis hop 512.
    pub fn ola_default(alpha: f64) -> Result<Self> {
        Self::new(alpha, OLA_SYNTHESIS_HOP, DEFAULT_WINDOW)
    }

    /// Hann 1024, synthesis hop 256.
    pub fn pv_default(alpha: f64) -> Result<Self> {
        Self::new(alpha, PV_SYNTHESIS_HOP, DEFAULT_WINDOW)
    }

    pub fn alpha(&self) -> f64 {
        self.synthesis_hop as f64 / self.analysis_hop
    }

    pub fn analysis_hop(&self) -> f64 {
        self.analysis_hop
    }

    pub fn synthesis_hop(&self) -> usize {
        self.synthesis_hop
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub(crate) fn output_len(&self, input_len: usize) -> usize {
        ((self.alpha() * input_len as f64).round() as usize).max(1)
    }

    /// Number of synthesis frames needed to cover the output.
    pub(crate) fn frame_count(&self, output_len: usize) -> usize {
        (output_len + self.window_len / 2).div_ceil(self.synthesis_hop) + 1
    }

    /// Start of analysis frame `m` in input coordinates (may be negative).
    pub(crate) fn analysis_start(&self, m: usize) -> isize {
        (m as f64 * self.analysis_hop).round() as isize - (self.window_len / 2) as isize
    }

    pub(crate) fn check_input(&self, clip: &AudioClip) -> Result<()> {
        if clip.len() < self.window_len {
            return Err(Error::TooShort { needed: self.window_len, got: clip.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsolaParams {
    pub base: TsmParams,
    /// Half-width of the position search, in samples.
    pub tolerance: usize,
}

impl WsolaParams {
    pub fn new(base: TsmParams, tolerance: usize) -> Self {
        Self { base, tolerance }
    }

    pub fn default_for(alpha: f64) -> Result<Self> {
        Ok(Self::new(TsmParams::ola_default(alpha)?, WSOLA_TOLERANCE))
    }
}

/// Divides an overlap-added signal by its window envelope and cuts out the
/// centred output region.
pub(crate) fn normalize_output(y: &[f64], env: &[f64], offset: usize, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let (v, e) = (y[offset + i], env[offset + i]);
            if e > 1e-20 {
                v / e
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TsmAlgorithm {
    Ola,
    Wsola,
    #[serde(rename = "pv")]
    PhaseVocoder,
    #[serde(rename = "pvpl")]
    PhaseLocked,
    Hpss,
}

impl TsmAlgorithm {
    pub const ALL: [TsmAlgorithm; 5] = [
        TsmAlgorithm::Ola,
        TsmAlgorithm::Wsola,
        TsmAlgorithm::PhaseVocoder,
        TsmAlgorithm::PhaseLocked,
        TsmAlgorithm::Hpss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TsmAlgorithm::Ola => "ola",
            TsmAlgorithm::Wsola => "wsola",
            TsmAlgorithm::PhaseVocoder => "pv",
            TsmAlgorithm::PhaseLocked => "pvpl",
            TsmAlgorithm::Hpss => "hpss",
        }
    }

    /// Stretches `clip` by `alpha` with this algorithm's default parameters.
    pub fn stretch(self, clip: &AudioClip, alpha: f64) -> Result<AudioClip> {
        match self {
            TsmAlgorithm::Ola => ola(clip, &TsmParams::ola_default(alpha)?),
            TsmAlgorithm::Wsola => wsola(clip, &WsolaParams::default_for(alpha)?),
            TsmAlgorithm::PhaseVocoder => phase_vocoder(clip, &TsmParams::pv_default(alpha)?),
            TsmAlgorithm::PhaseLocked => {
                pv_identity_phase_locking(clip, &TsmParams::pv_default(alpha)?)
            }
            TsmAlgorithm::Hpss => hpss_tsm(clip, &TsmParams::pv_default(alpha)?),
        }
    }
}

impl fmt::Display for TsmAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TsmAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TsmAlgorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.to_ascii_lowercase())
            .ok_or_else(|| invalid(format!("unknown TSM algorithm '{s}'")))
    }
}

/// One stretched copy from the TSM protocol.
#[derive(Debug, Clone)]
pub struct TsmCopy {
    pub algorithm: TsmAlgorithm,
    pub alpha: f64,
    pub clip: AudioClip,
}

/// Every algorithm at every factor, algorithms outermost.
pub fn augment_tsm_with(clip: &AudioClip, alphas: &[f64]) -> Result<Vec<TsmCopy>> {
    let mut out = Vec::with_capacity(TsmAlgorithm::ALL.len() * alphas.len());
    for algorithm in TsmAlgorithm::ALL {
        for &alpha in alphas {
            out.push(TsmCopy { algorithm, alpha, clip: algorithm.stretch(clip, alpha)? });
        }
    }
    Ok(out)
}

/// Ten copies: five algorithms times the factors 0.8 and 1.5.
pub fn augment_tsm(clip: &AudioClip) -> Result<Vec<TsmCopy>> {
    augment_tsm_with(clip, &PROTOCOL_ALPHAS)
}

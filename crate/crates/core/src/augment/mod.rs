//! Augmentation protocols: signal-domain (SGN, SSA, SSiA, TSM) and
//! spectrogram-domain (SSpA, SuSA).

pub mod signal;
mod signal_protocols;
pub mod spectro;
mod spectro_protocols;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use signal_protocols::{
    augment_sgn, augment_ssa, augment_ssia, plan_sgn, SgnDraw, SgnPreset, SsaPreset, SsiaPreset,
};
pub use spectro_protocols::{augment_sspa, augment_susa, SspaPreset, SusaPreset};

use crate::audio::AudioClip;
use crate::error::{invalid, Error, Result};
use crate::repr::GrayImage;
use crate::rng::RngStream;
use crate::tsm::{augment_tsm_with, PROTOCOL_ALPHAS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Sgn,
    Ssa,
    Ssia,
    Tsm,
    Sspa,
    Susa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Augment the audio, then render.
    Signal,
    /// Render, then augment the image.
    Spectrogram,
}

/// How a protocol combines its transforms within one copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApplicationRule {
    /// Each transform fires independently with this probability.
    EachWithProb(f64),
    /// Copy `i` applies transform `i` only.
    OnePerCopy,
    /// Every copy applies every transform with fresh parameters.
    AllPerCopy,
    /// Every algorithm crossed with every parameter value.
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformSpec {
    pub name: &'static str,
    /// Parameter range; fixed presets have `lo == hi`.
    pub range: Option<(f64, f64)>,
}

impl TransformSpec {
    fn ranged(name: &'static str, lo: f64, hi: f64) -> Self {
        Self { name, range: Some((lo, hi)) }
    }

    fn fixed(name: &'static str, v: f64) -> Self {
        Self { name, range: Some((v, v)) }
    }

    fn bare(name: &'static str) -> Self {
        Self { name, range: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub protocol: Protocol,
    pub copies: usize,
    pub rule: ApplicationRule,
    pub transforms: Vec<TransformSpec>,
}

impl Protocol {
    pub const ALL: [Protocol; 6] =
        [Protocol::Sgn, Protocol::Ssa, Protocol::Ssia, Protocol::Tsm, Protocol::Sspa, Protocol::Susa];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Sgn => "sgn",
            Protocol::Ssa => "ssa",
            Protocol::Ssia => "ssia",
            Protocol::Tsm => "tsm",
            Protocol::Sspa => "sspa",
            Protocol::Susa => "susa",
        }
    }

    /// Augmented copies per original pattern.
    pub fn copies(self) -> usize {
        match self {
            Protocol::Sgn | Protocol::Ssa | Protocol::Tsm => 10,
            Protocol::Ssia | Protocol::Susa => 29,
            Protocol::Sspa => 5,
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            Protocol::Sspa | Protocol::Susa => Domain::Spectrogram,
            _ => Domain::Signal,
        }
    }

    /// Description of the protocol with its default presets.
    pub fn spec(self) -> ProtocolSpec {
        let (rule, transforms) = match self {
            Protocol::Sgn => {
                let p = SgnPreset::default();
                (
                    ApplicationRule::EachWithProb(p.probability),
                    vec![
                        TransformSpec::ranged("speed", p.speed.0, p.speed.1),
                        TransformSpec::ranged("pitch_semitones", p.pitch_st.0, p.pitch_st.1),
                        TransformSpec::ranged("gain_db", p.gain_db.0, p.gain_db.1),
                        TransformSpec::ranged("noise_snr_db", p.snr_db.0, p.snr_db.1),
                        TransformSpec::ranged("time_shift_s", p.shift_s.0, p.shift_s.1),
                    ],
                )
            }
            Protocol::Ssa => {
                let p = SsaPreset::default();
                (
                    ApplicationRule::OnePerCopy,
                    vec![
                        TransformSpec::fixed("wow_a_m", p.wow.a_m),
                        TransformSpec::fixed("noise_snr_db", p.snr_db),
                        TransformSpec::fixed("clip_fraction", p.clip_fraction),
                        TransformSpec::fixed("speed", p.speed),
                        TransformSpec::fixed("distortion_iterations", p.distortion_iterations as f64),
                        TransformSpec::fixed("gain_db", p.gain_db),
                        TransformSpec::bare("circular_shift"),
                        TransformSpec::bare("drc"),
                        TransformSpec::fixed("pitch_semitones", p.pitch_up),
                        TransformSpec::fixed("pitch_semitones", p.pitch_down),
                    ],
                )
            }
            Protocol::Ssia => {
                let p = SsiaPreset::default();
                (
                    ApplicationRule::AllPerCopy,
                    vec![
                        TransformSpec::fixed("wow_a_m", p.wow.a_m),
                        TransformSpec::ranged("speed_percent", p.speed_percent.0, p.speed_percent.1),
                        TransformSpec::ranged("gain_db", p.gain_db.0, p.gain_db.1),
                        TransformSpec::bare("circular_shift"),
                        TransformSpec::ranged("pitch_semitones", p.pitch_st.0, p.pitch_st.1),
                    ],
                )
            }
            Protocol::Tsm => (
                ApplicationRule::Grid,
                ["ola", "wsola", "pv", "pvpl", "hpss"]
                    .into_iter()
                    .map(|n| TransformSpec::ranged(n, PROTOCOL_ALPHAS[0], PROTOCOL_ALPHAS[1]))
                    .collect(),
            ),
            Protocol::Sspa => (
                ApplicationRule::OnePerCopy,
                vec![
                    TransformSpec::bare("pitch_time_shift"),
                    TransformSpec::bare("vtln"),
                    TransformSpec::bare("circular_time_shift"),
                    TransformSpec::bare("tps_warp_mask"),
                    TransformSpec::bare("mult_noise"),
                ],
            ),
            Protocol::Susa => {
                let p = SusaPreset::default();
                (
                    ApplicationRule::AllPerCopy,
                    vec![
                        TransformSpec::ranged("row_shift", p.row_shift.0 as f64, p.row_shift.1 as f64),
                        TransformSpec::ranged("vtln_alpha", p.vtln.a, p.vtln.b),
                        TransformSpec::bare("circular_time_shift"),
                        TransformSpec::bare("freq_time_mask"),
                        TransformSpec::ranged("mult_noise", p.noise_range.0, p.noise_range.1),
                    ],
                )
            }
        };
        ProtocolSpec { protocol: self, copies: self.copies(), rule, transforms }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == lower)
            .ok_or_else(|| invalid(format!("unknown protocol '{s}'")))
    }
}

/// Presets for every protocol. Any field may be omitted in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub sgn: SgnPreset,
    pub ssa: SsaPreset,
    pub ssia: SsiaPreset,
    pub tsm_alphas: Vec<f64>,
    pub sspa: SspaPreset,
    pub susa: SusaPreset,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            sgn: SgnPreset::default(),
            ssa: SsaPreset::default(),
            ssia: SsiaPreset::default(),
            tsm_alphas: PROTOCOL_ALPHAS.to_vec(),
            sspa: SspaPreset::default(),
            susa: SusaPreset::default(),
        }
    }
}

impl AugmentConfig {
    /// Copies a protocol produces under this configuration. Only TSM depends
    /// on the configuration (five algorithms per factor).
    pub fn copies(&self, protocol: Protocol) -> usize {
        match protocol {
            Protocol::Tsm => 5 * self.tsm_alphas.len(),
            p => p.copies(),
        }
    }

    /// Signal-domain copies of `clip`.
    pub fn augment_clip(&self, protocol: Protocol, clip: &AudioClip, rng: &RngStream) -> Result<Vec<AudioClip>> {
        match protocol {
            Protocol::Sgn => augment_sgn(clip, rng, &self.sgn),
            Protocol::Ssa => augment_ssa(clip, rng, &self.ssa),
            Protocol::Ssia => augment_ssia(clip, rng, &self.ssia),
            Protocol::Tsm => {
                Ok(augment_tsm_with(clip, &self.tsm_alphas)?.into_iter().map(|c| c.clip).collect())
            }
            p => Err(invalid(format!("{p} augments images, not audio"))),
        }
    }

    /// Spectrogram-domain copies of `img`.
    pub fn augment_image(&self, protocol: Protocol, img: &GrayImage, rng: &RngStream) -> Result<Vec<GrayImage>> {
        match protocol {
            Protocol::Sspa => augment_sspa(img, rng, &self.sspa),
            Protocol::Susa => augment_susa(img, rng, &self.susa),
            p => Err(invalid(format!("{p} augments audio, not images"))),
        }
    }
}

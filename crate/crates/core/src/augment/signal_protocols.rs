use serde::{Deserialize, Serialize};

use super::signal::{
    add_noise_snr, apply_gain_db, change_speed, circular_time_shift, clip_fraction,
    dynamic_range_compress, harmonic_distortion, pitch_shift, wow_resample, DrcCurve, WowParams,
};
use crate::audio::AudioClip;
use crate::error::Result;
use crate::rng::RngStream;

// Child stream ids. Parameter draws for copy `i` use `fork(i)`; noise and
// shift draws get their own children so plans do not depend on clip length.
const NOISE_STREAM: u64 = 1 << 32;
const SHIFT_STREAM: u64 = 2 << 32;

fn random_shift(clip: &AudioClip, rng: &RngStream, copy: u64) -> Result<AudioClip> {
    let t_star = rng.fork(SHIFT_STREAM + copy).int_inclusive(0, clip.len() as i64) as usize;
    circular_time_shift(clip, t_star)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgnPreset {
    pub probability: f64,
    pub speed: (f64, f64),
    pub pitch_st: (f64, f64),
    pub gain_db: (f64, f64),
    pub snr_db: (f64, f64),
    pub shift_s: (f64, f64),
}

impl Default for SgnPreset {
    fn default() -> Self {
        Self {
            probability: 0.5,
            speed: (0.8, 1.2),
            pitch_st: (-2.0, 2.0),
            gain_db: (-3.0, 3.0),
            snr_db: (0.0, 10.0),
            shift_s: (-0.005, 0.005),
        }
    }
}

/// Parameters for one SGN copy; `None` means the transform did not fire.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SgnDraw {
    pub speed: Option<f64>,
    pub pitch_st: Option<f64>,
    pub gain_db: Option<f64>,
    pub snr_db: Option<f64>,
    pub shift_s: Option<f64>,
}

impl SgnDraw {
    pub fn fired(&self) -> [bool; 5] {
        [
            self.speed.is_some(),
            self.pitch_st.is_some(),
            self.gain_db.is_some(),
            self.snr_db.is_some(),
            self.shift_s.is_some(),
        ]
    }
}

/// Draws the parameters of SGN copy `copy` without touching any audio.
pub fn plan_sgn(rng: &RngStream, copy: u64, p: &SgnPreset) -> Result<SgnDraw> {
    let mut r = rng.fork(copy);
    let mut draw = |range: (f64, f64)| -> Result<Option<f64>> {
        let fire = r.bernoulli(p.probability);
        let value = r.uniform(range.0, range.1)?;
        Ok(fire.then_some(value))
    };
    Ok(SgnDraw {
        speed: draw(p.speed)?,
        pitch_st: draw(p.pitch_st)?,
        gain_db: draw(p.gain_db)?,
        snr_db: draw(p.snr_db)?,
        shift_s: draw(p.shift_s)?,
    })
}

fn apply_sgn(clip: &AudioClip, d: &SgnDraw, rng: &RngStream, copy: u64) -> Result<AudioClip> {
    let mut out = clip.clone();
    if let Some(f) = d.speed {
        out = change_speed(&out, f)?;
    }
    if let Some(st) = d.pitch_st {
        out = pitch_shift(&out, st)?;
    }
    if let Some(g) = d.gain_db {
        out = apply_gain_db(&out, g);
    }
    if let Some(snr) = d.snr_db {
        out = add_noise_snr(&out, snr, &mut rng.fork(NOISE_STREAM + copy))?;
    }
    if let Some(dt) = d.shift_s {
        let n = out.len() as i64;
        let shift = (dt * out.sample_rate() as f64).round() as i64;
        out = circular_time_shift(&out, shift.rem_euclid(n) as usize)?;
    }
    Ok(out)
}

/// Ten copies; each transform fires independently with the preset probability.
pub fn augment_sgn(clip: &AudioClip, rng: &RngStream, p: &SgnPreset) -> Result<Vec<AudioClip>> {
    (0..10)
        .map(|copy| {
            let draw = plan_sgn(rng, copy, p)?;
            apply_sgn(clip, &draw, rng, copy)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsaPreset {
    pub wow: WowParams,
    pub snr_db: f64,
    pub clip_fraction: f64,
    pub speed: f64,
    pub distortion_iterations: usize,
    pub gain_db: f64,
    pub drc: DrcCurve,
    pub pitch_up: f64,
    pub pitch_down: f64,
}

impl Default for SsaPreset {
    fn default() -> Self {
        Self {
            wow: WowParams::default(),
            snr_db: 10.0,
            clip_fraction: 0.1,
            speed: 1.15,
            distortion_iterations: 5,
            gain_db: 10.0,
            drc: DrcCurve::default(),
            pitch_up: 2.0,
            pitch_down: -2.0,
        }
    }
}

/// Ten copies, one fixed transform each.
pub fn augment_ssa(clip: &AudioClip, rng: &RngStream, p: &SsaPreset) -> Result<Vec<AudioClip>> {
    Ok(vec![
        wow_resample(clip, &p.wow),
        add_noise_snr(clip, p.snr_db, &mut rng.fork(NOISE_STREAM))?,
        clip_fraction(clip, p.clip_fraction)?.0,
        change_speed(clip, p.speed)?,
        harmonic_distortion(clip, p.distortion_iterations),
        apply_gain_db(clip, p.gain_db),
        random_shift(clip, rng, 0)?,
        dynamic_range_compress(clip, &p.drc),
        pitch_shift(clip, p.pitch_up)?,
        pitch_shift(clip, p.pitch_down)?,
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsiaPreset {
    pub wow: WowParams,
    /// Speed change in percentage points; factor `1 + p / 100`.
    pub speed_percent: (f64, f64),
    pub gain_db: (f64, f64),
    pub pitch_st: (f64, f64),
}

impl Default for SsiaPreset {
    fn default() -> Self {
        Self {
            wow: WowParams::default(),
            speed_percent: (-5.0, 5.0),
            gain_db: (-0.5, 0.5),
            pitch_st: (-0.5, 0.5),
        }
    }
}

/// Twenty-nine copies, each applying all five transforms with small random
/// parameters.
pub fn augment_ssia(clip: &AudioClip, rng: &RngStream, p: &SsiaPreset) -> Result<Vec<AudioClip>> {
    (0..29)
        .map(|copy| {
            let mut r = rng.fork(copy);
            let speed = 1.0 + r.uniform(p.speed_percent.0, p.speed_percent.1)? / 100.0;
            let gain = r.uniform(p.gain_db.0, p.gain_db.1)?;
            let pitch = r.uniform(p.pitch_st.0, p.pitch_st.1)?;
            let mut out = wow_resample(clip, &p.wow);
            out = change_speed(&out, speed)?;
            out = apply_gain_db(&out, gain);
            out = random_shift(&out, rng, copy)?;
            pitch_shift(&out, pitch)
        })
        .collect()
}

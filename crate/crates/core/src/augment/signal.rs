//! Signal-domain transforms. All of them keep the sample rate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::audio::{stretch_samples, AudioClip, SincInterpolator, DEFAULT_TAPS};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;
use crate::tsm::{phase_vocoder, TsmParams};

/// Time warp `F(x) = x + a_m sin(2 pi f_m x) / (2 pi f_m)`, `x` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WowParams {
    pub a_m: f64,
    pub f_m: f64,
}

impl WowParams {
    pub fn new(a_m: f64, f_m: f64) -> Result<Self> {
        if !(f_m > 0.0 && f_m.is_finite() && a_m.is_finite()) {
            return Err(invalid(format!("wow: need finite a_m and f_m > 0, got {a_m}, {f_m}")));
        }
        Ok(Self { a_m, f_m })
    }

    pub fn warp(&self, x: f64) -> f64 {
        let w = 2.0 * PI * self.f_m;
        x + self.a_m * (w * x).sin() / w
    }
}

impl Default for WowParams {
    fn default() -> Self {
        Self { a_m: 3.0, f_m: 2.0 }
    }
}

/// Reads the clip at warped times `F(t)`, clamped to the clip's extent.
pub fn wow_resample(clip: &AudioClip, p: &WowParams) -> AudioClip {
    if p.a_m == 0.0 {
        return clip.clone();
    }
    let rate = clip.sample_rate() as f64;
    let last = (clip.len() - 1) as f64;
    let interp = SincInterpolator::new(DEFAULT_TAPS, 1.0);
    let x = clip.samples();
    let out = (0..clip.len())
        .map(|i| {
            let pos = (p.warp(i as f64 / rate) * rate).clamp(0.0, last);
            interp.sample_at(x, pos)
        })
        .collect();
    clip.with_samples(out)
}

/// Adds white Gaussian noise scaled so the signal-to-noise power ratio is
/// exactly `snr_db`.
pub fn add_noise_snr(clip: &AudioClip, snr_db: f64, rng: &mut RngStream) -> Result<AudioClip> {
    if !snr_db.is_finite() {
        return Err(invalid(format!("SNR must be finite, got {snr_db}")));
    }
    let signal_power = clip.power();
    if signal_power == 0.0 {
        return Err(Error::Silent("add_noise_snr"));
    }
    let noise: Vec<f64> = (0..clip.len()).map(|_| rng.gaussian()).collect();
    let noise_power = noise.iter().map(|v| v * v).sum::<f64>() / noise.len() as f64;
    if noise_power == 0.0 {
        return Ok(clip.clone());
    }
    let scale = (signal_power / (noise_power * 10f64.powf(snr_db / 10.0))).sqrt();
    let out = clip.samples().iter().zip(&noise).map(|(s, n)| s + scale * n).collect();
    Ok(clip.with_samples(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipOutcome {
    Clipped,
    /// Nothing to scale; the clip came back unchanged.
    AllZero,
}

/// Linear-interpolated quantile of sorted data at `q` in [0, 1].
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Scales so that `fraction` of the samples fall outside [-1, 1], then clips
/// those to their sign.
pub fn clip_fraction(clip: &AudioClip, fraction: f64) -> Result<(AudioClip, ClipOutcome)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(invalid(format!("clip fraction must be in (0, 1), got {fraction}")));
    }
    if clip.samples().iter().all(|&v| v == 0.0) {
        log::warn!("clip_fraction: all-zero clip left unchanged");
        return Ok((clip.clone(), ClipOutcome::AllZero));
    }
    let mut mags: Vec<f64> = clip.samples().iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let q = quantile_sorted(&mags, 1.0 - fraction);
    let out = clip
        .samples()
        .iter()
        .map(|&v| {
            // q == 0 only when most samples are zero: every non-zero sample saturates
            let s = if q > 0.0 { v / q } else { v * f64::INFINITY };
            if s.abs() > 1.0 {
                s.signum()
            } else if s.is_nan() {
                0.0
            } else {
                s
            }
        })
        .collect();
    Ok((clip.with_samples(out), ClipOutcome::Clipped))
}

/// Plays the clip `factor` times faster at the same rate; pitch moves with speed.
pub fn change_speed(clip: &AudioClip, factor: f64) -> Result<AudioClip> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(invalid(format!("speed factor must be positive, got {factor}")));
    }
    if factor == 1.0 {
        return Ok(clip.clone());
    }
    Ok(clip.with_samples(stretch_samples(clip.samples(), 1.0 / factor, DEFAULT_TAPS)))
}

/// Applies `v -> sin(2 pi v)` pointwise, `iterations` times.
pub fn harmonic_distortion(clip: &AudioClip, iterations: usize) -> AudioClip {
    let out = clip
        .samples()
        .iter()
        .map(|&v| (0..iterations).fold(v, |acc, _| (2.0 * PI * acc).sin()))
        .collect();
    clip.with_samples(out)
}

/// Multiplies by `10^(g/20)`. No clamping.
pub fn apply_gain_db(clip: &AudioClip, g: f64) -> AudioClip {
    let k = 10f64.powf(g / 20.0);
    clip.with_samples(clip.samples().iter().map(|v| v * k).collect())
}

/// `out[t] = in[(t_star + t) mod T]`.
pub fn circular_time_shift(clip: &AudioClip, t_star: usize) -> Result<AudioClip> {
    let n = clip.len();
    if t_star > n {
        return Err(invalid(format!("shift {t_star} outside [0, {n}]")));
    }
    let mut out = clip.samples().to_vec();
    out.rotate_left(t_star % n);
    Ok(clip.with_samples(out))
}

/// Static level curve in dBFS. Levels beyond the first or last breakpoint
/// keep that breakpoint's offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct DrcCurve {
    breakpoints: Vec<(f64, f64)>,
}

impl DrcCurve {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(invalid("DRC curve needs at least one breakpoint"));
        }
        if breakpoints.iter().any(|(i, o)| !i.is_finite() || !o.is_finite()) {
            return Err(invalid("DRC breakpoints must be finite"));
        }
        for w in breakpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(invalid("DRC input levels must be strictly increasing"));
            }
            if w[1].1 < w[0].1 {
                return Err(invalid("DRC output levels must be non-decreasing"));
            }
        }
        Ok(Self { breakpoints })
    }

    pub fn identity() -> Self {
        Self { breakpoints: vec![(-120.0, -120.0), (0.0, 0.0)] }
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn output_level(&self, level_db: f64) -> f64 {
        let b = &self.breakpoints;
        let (first, last) = (b[0], b[b.len() - 1]);
        if level_db <= first.0 {
            return level_db + (first.1 - first.0);
        }
        if level_db >= last.0 {
            return level_db + (last.1 - last.0);
        }
        let k = b.partition_point(|p| p.0 <= level_db);
        let ((x0, y0), (x1, y1)) = (b[k - 1], b[k]);
        y0 + (level_db - x0) * (y1 - y0) / (x1 - x0)
    }
}

impl Default for DrcCurve {
    /// +10 dB below -40 dBFS, 2.5:1 compression above -20 dBFS.
    fn default() -> Self {
        Self {
            breakpoints: vec![(-90.0, -80.0), (-60.0, -50.0), (-40.0, -30.0), (-20.0, -16.0), (0.0, -8.0)],
        }
    }
}

impl TryFrom<Vec<(f64, f64)>> for DrcCurve {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DrcCurve> for Vec<(f64, f64)> {
    fn from(c: DrcCurve) -> Self {
        c.breakpoints
    }
}

pub fn dynamic_range_compress(clip: &AudioClip, curve: &DrcCurve) -> AudioClip {
    let out = clip
        .samples()
        .iter()
        .map(|&v| {
            if v == 0.0 {
                return 0.0;
            }
            let level = 20.0 * (v.abs() + 1e-10).log10();
            v.signum() * 10f64.powf(curve.output_level(level) / 20.0)
        })
        .collect();
    clip.with_samples(out)
}

/// Speeds the clip up by `2^(semitones/12)` and stretches it back to its
/// original length with the phase vocoder.
pub fn pitch_shift(clip: &AudioClip, semitones: f64) -> Result<AudioClip> {
    if !semitones.is_finite() {
        return Err(invalid(format!("semitones must be finite, got {semitones}")));
    }
    if semitones == 0.0 {
        return Ok(clip.clone());
    }
    let ratio = 2f64.powf(semitones / 12.0);
    let fast = change_speed(clip, ratio)?;
    let mut out = phase_vocoder(&fast, &TsmParams::pv_default(ratio)?)?.into_samples();
    out.resize(clip.len(), 0.0);
    Ok(clip.with_samples(out))
}

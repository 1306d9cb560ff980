use super::{ola, pv_identity_phase_locking, TsmParams};
use crate::audio::AudioClip;
use crate::dsp::{hann, median, FftPair, C64};
use crate::error::Result;
use crate::repr::{FreqAxis, TimeFreqMatrix};

/// Median filter length, in frames (harmonic) and bins (percussive).
pub const HPSS_MEDIAN_LEN: usize = 17;

/// Boolean mask over a frequency x time grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    fn complement(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, bits: self.bits.iter().map(|b| !b).collect() }
    }
}

/// Median of the window centred on `i`, truncated at the ends.
fn median_filter(line: &[f64], len: usize) -> Vec<f64> {
    let half = len / 2;
    let mut scratch = Vec::with_capacity(len);
    (0..line.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(line.len());
            scratch.clear();
            scratch.extend_from_slice(&line[lo..hi]);
            median(&mut scratch)
        })
        .collect()
}

/// Harmonic bins are those where the time-direction median is at least the
/// frequency-direction median. Returns `(harmonic, percussive)`.
pub fn hpss_separate(mag: &TimeFreqMatrix) -> (BinaryMask, BinaryMask) {
    let (rows, cols) = (mag.rows(), mag.cols());
    let mut harmonic = vec![0.0; rows * cols];
    for r in 0..rows {
        let filtered = median_filter(mag.row(r), HPSS_MEDIAN_LEN);
        harmonic[r * cols..(r + 1) * cols].copy_from_slice(&filtered);
    }
    let mut bits = vec![false; rows * cols];
    let mut column = vec![0.0; rows];
    for c in 0..cols {
        for (r, v) in column.iter_mut().enumerate() {
            *v = mag.get(r, c);
        }
        let percussive = median_filter(&column, HPSS_MEDIAN_LEN);
        for r in 0..rows {
            bits[r * cols + c] = harmonic[r * cols + c] >= percussive[r];
        }
    }
    let h = BinaryMask { rows, cols, bits };
    let p = h.complement();
    (h, p)
}

/// Splits `x` into its harmonic and percussive parts by masking the STFT.
fn split_components(x: &[f64], window_len: usize, hop: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let window = hann(window_len);
    let fft = FftPair::new(window_len);
    let bins = window_len / 2 + 1;
    let frames = x.len().div_ceil(hop) + 1;
    let start = |j: usize| (j * hop) as isize - (window_len / 2) as isize;
    let spectra: Vec<Vec<C64>> = (0..frames)
        .map(|j| fft.frame_spectrum(x, start(j), &window)[..bins].to_vec())
        .collect();
    let mut mag = vec![0.0; bins * frames];
    for (j, s) in spectra.iter().enumerate() {
        for (k, c) in s.iter().enumerate() {
            mag[k * frames + j] = c.norm();
        }
    }
    let bin_hz = 1.0 / window_len as f64;
    let mag = TimeFreqMatrix::new(bins, frames, mag, FreqAxis::Uniform { bin_hz }, hop as f64)?;
    let (harmonic, _) = hpss_separate(&mag);

    let mut h = vec![0.0; x.len()];
    let mut p = vec![0.0; x.len()];
    let mut env = vec![0.0; x.len()];
    let zero = C64::new(0.0, 0.0);
    for (j, s) in spectra.iter().enumerate() {
        let hs: Vec<C64> = (0..bins).map(|k| if harmonic.get(k, j) { s[k] } else { zero }).collect();
        let ps: Vec<C64> = (0..bins).map(|k| if harmonic.get(k, j) { zero } else { s[k] }).collect();
        let (hf, pf) = (fft.real_inverse(&hs), fft.real_inverse(&ps));
        for i in 0..window_len {
            let idx = start(j) + i as isize;
            if idx >= 0 && (idx as usize) < x.len() {
                let idx = idx as usize;
                h[idx] += hf[i] * window[i];
                p[idx] += pf[i] * window[i];
                env[idx] += window[i] * window[i];
            }
        }
    }
    for i in 0..x.len() {
        if env[i] > 1e-8 {
            h[i] /= env[i];
            p[i] /= env[i];
        }
    }
    Ok((h, p))
}

/// Harmonic part through the phase-locked vocoder, percussive part through
/// OLA (hop of half a window), then summed.
pub fn hpss_tsm(clip: &AudioClip, p: &TsmParams) -> Result<AudioClip> {
    p.check_input(clip)?;
    let (h, perc) = split_components(clip.samples(), p.window_len(), p.window_len() / 4)?;
    let h = pv_identity_phase_locking(&clip.with_samples(h), p)?;
    let ola_params = TsmParams::new(p.alpha(), p.window_len() / 2, p.window_len())?;
    let perc = ola(&clip.with_samples(perc), &ola_params)?;
    let n = h.len().min(perc.len());
    let merged = h.samples()[..n].iter().zip(&perc.samples()[..n]).map(|(a, b)| a + b).collect();
    Ok(clip.with_samples(merged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{rel_l2, sine};

    fn energy_share(mag: &TimeFreqMatrix, mask: &BinaryMask) -> f64 {
        let (mut hit, mut total) = (0.0, 0.0);
        for r in 0..mag.rows() {
            for c in 0..mag.cols() {
                let e = mag.get(r, c).powi(2);
                total += e;
                if mask.get(r, c) {
                    hit += e;
                }
            }
        }
        hit / total
    }

    fn stft_mag(x: &[f64]) -> TimeFreqMatrix {
        let window = hann(1024);
        let fft = FftPair::new(1024);
        let frames = x.len().div_ceil(256) + 1;
        let mut v = vec![0.0; 513 * frames];
        for j in 0..frames {
            let s = fft.frame_spectrum(x, j as isize * 256 - 512, &window);
            for k in 0..513 {
                v[k * frames + j] = s[k].norm();
            }
        }
        TimeFreqMatrix::new(513, frames, v, FreqAxis::Uniform { bin_hz: 1.0 }, 1.0).unwrap()
    }

    #[test]
    fn masks_partition() {
        let mut rng = crate::RngStream::new(2);
        let v: Vec<f64> = (0..40 * 30).map(|_| rng.next_f64()).collect();
        let m = TimeFreqMatrix::new(40, 30, v, FreqAxis::Uniform { bin_hz: 1.0 }, 1.0).unwrap();
        let (h, p) = hpss_separate(&m);
        assert!(h.bits().iter().zip(p.bits()).all(|(a, b)| a ^ b));
    }

    #[test]
    fn tone_is_harmonic() {
        let clip = sine(440.0, 16000, 1.0);
        let mag = stft_mag(clip.samples());
        let (h, _) = hpss_separate(&mag);
        assert!(energy_share(&mag, &h) >= 0.9);
    }

    #[test]
    fn click_is_percussive() {
        let mut x = vec![0.0; 16000];
        x[8000] = 1.0;
        let mag = stft_mag(&x);
        let (_, p) = hpss_separate(&mag);
        assert!(energy_share(&mag, &p) >= 0.9);
    }

    #[test]
    fn unit_stretch_is_identity() {
        let mut rng = crate::RngStream::new(21);
        let x: Vec<f64> = (0..16000)
            .map(|i| (i as f64 * 0.07).sin() + if i % 4000 == 0 { 2.0 } else { 0.05 * rng.gaussian() })
            .collect();
        let clip = AudioClip::new(x, 16000).unwrap();
        let out = hpss_tsm(&clip, &TsmParams::pv_default(1.0).unwrap()).unwrap();
        assert_eq!(out.len(), clip.len());
        assert!(rel_l2(clip.samples(), out.samples()) < 5e-2);
    }

    #[test]
    fn pure_tone_follows_phase_locked_vocoder() {
        let clip = sine(440.0, 16000, 1.0);
        let p = TsmParams::pv_default(1.5).unwrap();
        let a = hpss_tsm(&clip, &p).unwrap();
        let b = pv_identity_phase_locking(&clip, &p).unwrap();
        assert!(rel_l2(b.samples(), a.samples()) < 0.1);
    }
}

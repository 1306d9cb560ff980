use super::stft::{gabor_frames, StftParams};
use super::{FreqAxis, TimeFreqMatrix};
use crate::audio::AudioClip;
use crate::error::{invalid, Error, Result};

/// Hz to Mel: `2595 * log10(1 + f / 700)`.
pub fn hz_to_mel(f: f64) -> Result<f64> {
    if !(f >= 0.0) {
        return Err(invalid(format!("hz_to_mel: negative frequency {f}")));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters on FFT bins.
///
/// Each filter has its centre on an integer bin where the weight is exactly
/// 1, falling linearly to exactly 0 at the neighbouring centres.
#[derive(Debug, Clone, PartialEq)]
pub struct MelBank {
    fft_len: usize,
    /// `n_filters + 2` strictly increasing bin indices: lower edge, centres, upper edge.
    edges: Vec<usize>,
    centers_hz: Vec<f64>,
    f_lo: f64,
    f_hi: f64,
}

impl MelBank {
    pub fn new(n_filters: usize, f_lo: f64, f_hi: f64, fft_len: usize, sample_rate: u32) -> Result<Self> {
        if n_filters == 0 {
            return Err(invalid("mel bank needs at least one filter"));
        }
        let nyquist = sample_rate as f64 / 2.0;
        if !(0.0 <= f_lo && f_lo < f_hi && f_hi <= nyquist) {
            return Err(invalid(format!("mel band [{f_lo}, {f_hi}] outside [0, {nyquist}]")));
        }
        let last_bin = fft_len / 2;
        let (m_lo, m_hi) = (hz_to_mel(f_lo)?, hz_to_mel(f_hi)?);
        let step = (m_hi - m_lo) / (n_filters + 1) as f64;
        let mut edges = Vec::with_capacity(n_filters + 2);
        for i in 0..n_filters + 2 {
            let hz = mel_to_hz(m_lo + step * i as f64);
            let mut bin = (hz * fft_len as f64 / sample_rate as f64).round() as usize;
            // keep centres distinct where mel spacing is finer than one bin
            if let Some(&prev) = edges.last() {
                bin = bin.max(prev + 1);
            }
            edges.push(bin);
        }
        if *edges.last().unwrap() > last_bin {
            return Err(invalid(format!(
                "{n_filters} mel filters do not fit in {} FFT bins",
                last_bin + 1
            )));
        }
        let bin_hz = sample_rate as f64 / fft_len as f64;
        let centers_hz = edges[1..=n_filters].iter().map(|&b| b as f64 * bin_hz).collect();
        Ok(Self { fft_len, edges, centers_hz, f_lo, f_hi })
    }

    pub fn n_filters(&self) -> usize {
        self.edges.len() - 2
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn band(&self) -> (f64, f64) {
        (self.f_lo, self.f_hi)
    }

    /// FFT bin at the peak of filter `i`.
    pub fn center_bin(&self, i: usize) -> usize {
        self.edges[i + 1]
    }

    pub fn centers_hz(&self) -> &[f64] {
        &self.centers_hz
    }

    /// Weight of filter `i` at FFT bin `bin`.
    pub fn weight(&self, i: usize, bin: usize) -> f64 {
        let (lo, c, hi) = (self.edges[i], self.edges[i + 1], self.edges[i + 2]);
        if bin <= lo || bin >= hi {
            0.0
        } else if bin == c {
            1.0
        } else if bin < c {
            (bin - lo) as f64 / (c - lo) as f64
        } else {
            (hi - bin) as f64 / (hi - c) as f64
        }
    }

    /// `(first_bin, weights)` for the non-zero support of filter `i`.
    fn support(&self, i: usize) -> (usize, Vec<f64>) {
        let (lo, hi) = (self.edges[i], self.edges[i + 2]);
        (lo, (lo..=hi).map(|b| self.weight(i, b)).collect())
    }
}

/// Mel filterbank energies of the Gabor power spectrum.
pub fn mel_spectrogram(clip: &AudioClip, p: &StftParams, bank: &MelBank) -> Result<TimeFreqMatrix> {
    if bank.fft_len() != p.fft_len {
        return Err(Error::ShapeMismatch(format!(
            "mel bank built for fft {} but STFT uses {}",
            bank.fft_len(),
            p.fft_len
        )));
    }
    let frames = gabor_frames(clip, p)?;
    let rows = bank.n_filters();
    let cols = frames.len();
    let supports: Vec<_> = (0..rows).map(|i| bank.support(i)).collect();
    let mut values = vec![0.0; rows * cols];
    for (j, frame) in frames.iter().enumerate() {
        for (i, (first, weights)) in supports.iter().enumerate() {
            values[i * cols + j] = weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * frame[first + k].norm_sqr())
                .sum();
        }
    }
    let rate = clip.sample_rate() as f64;
    TimeFreqMatrix::new(
        rows,
        cols,
        values,
        FreqAxis::Centers(bank.centers_hz().to_vec()),
        p.hop as f64 / rate,
    )
}

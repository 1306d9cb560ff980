//! Oracles shared by unit tests.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::audio::AudioClip;

/// Frequency (Hz) of the largest Hann-windowed DFT bin, refined by parabolic
/// interpolation over log magnitudes.
pub fn peak_frequency(clip: &AudioClip) -> f64 {
    let x = clip.samples();
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos();
            Complex::new(v * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf[..n / 2 + 1].iter().map(|c| c.norm()).collect();
    let k = mags
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let mut pos = k as f64;
    if k + 1 < mags.len() {
        let (a, b, c) = (
            mags[k - 1].max(1e-300).ln(),
            mags[k].max(1e-300).ln(),
            mags[k + 1].max(1e-300).ln(),
        );
        let denom = a - 2.0 * b + c;
        if denom.abs() > 1e-12 {
            pos += 0.5 * (a - c) / denom;
        }
    }
    pos * clip.sample_rate() as f64 / n as f64
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let err: f64 = (0..n).map(|i| (a[i] - b[i]).powi(2)).sum();
    let norm: f64 = a[..n].iter().map(|v| v * v).sum();
    (err / norm).sqrt()
}

pub fn sine(freq: f64, rate: u32, secs: f64) -> AudioClip {
    let n = (rate as f64 * secs).round() as usize;
    AudioClip::from_fn(n, rate, |t| (2.0 * std::f64::consts::PI * freq * t).sin()).unwrap()
}

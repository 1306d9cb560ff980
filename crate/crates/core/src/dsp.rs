//! Windows, framed FFTs and small numeric helpers shared by the
//! representation and time-scale modules.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

pub type C64 = Complex<f64>;

/// Periodic Hann window.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Gaussian window `exp(-pi * sigma2 * u^2)` with `u` the offset from the
/// window centre in units of the window length.
pub fn gaussian(n: usize, sigma2: f64) -> Vec<f64> {
    let centre = (n as f64 - 1.0) / 2.0;
    (0..n)
        .map(|i| {
            let u = (i as f64 - centre) / n as f64;
            (-PI * sigma2 * u * u).exp()
        })
        .collect()
}

/// Forward/inverse FFT pair of one size.
#[derive(Clone)]
pub struct FftPair {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn forward(&self, buf: &mut [C64]) {
        self.forward.process(buf);
    }

    /// Unnormalized inverse transform.
    pub fn inverse(&self, buf: &mut [C64]) {
        self.inverse.process(buf);
    }

    /// Windowed frame of `x` starting at `start` (which may lie outside `x`;
    /// missing samples are zero), zero-padded to the FFT length.
    pub fn frame_spectrum(&self, x: &[f64], start: isize, window: &[f64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.len];
        for (i, &w) in window.iter().enumerate() {
            let idx = start + i as isize;
            if idx >= 0 && (idx as usize) < x.len() {
                buf[i].re = x[idx as usize] * w;
            }
        }
        self.forward(&mut buf);
        buf
    }

    /// Real part of the inverse transform of a one-sided spectrum
    /// (`len / 2 + 1` bins), scaled by `1 / len`.
    pub fn real_inverse(&self, half: &[C64]) -> Vec<f64> {
        let n = self.len;
        let mut buf = vec![C64::new(0.0, 0.0); n];
        buf[..half.len()].copy_from_slice(half);
        for k in 1..n.div_ceil(2) {
            buf[n - k] = half[k].conj();
        }
        self.inverse(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }
}

impl std::fmt::Debug for FftPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPair").field("len", &self.len).finish()
    }
}

/// Wraps a phase to `[-pi, pi)`.
pub fn princarg(phase: f64) -> f64 {
    phase - 2.0 * PI * ((phase + PI) / (2.0 * PI)).floor()
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let n = values.len();
    let mid = n / 2;
    let (_, m, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    if n % 2 == 1 {
        upper
    } else {
        let lower = values[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Linear convolution of `x` with `kernel` via FFT, truncated to `x.len()`.
pub fn convolve_causal(x: &[f64], kernels: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let longest = kernels.iter().map(Vec::len).max().unwrap_or(1);
    let size = (x.len() + longest).next_power_of_two();
    let fft = FftPair::new(size);
    let mut xs: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    xs.resize(size, C64::new(0.0, 0.0));
    fft.forward(&mut xs);
    let scale = 1.0 / size as f64;
    kernels
        .iter()
        .map(|k| {
            let mut ks: Vec<C64> = k.iter().map(|&v| C64::new(v, 0.0)).collect();
            ks.resize(size, C64::new(0.0, 0.0));
            fft.forward(&mut ks);
            for (a, b) in ks.iter_mut().zip(&xs) {
                *a *= b;
            }
            fft.inverse(&mut ks);
            ks[..x.len()].iter().map(|c| c.re * scale).collect()
        })
        .collect()
}

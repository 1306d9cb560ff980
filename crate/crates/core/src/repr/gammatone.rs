use std::f64::consts::PI;

use super::{FreqAxis, TimeFreqMatrix};
use crate::audio::AudioClip;
use crate::dsp::convolve_causal;
use crate::error::{invalid, Error, Result};

/// Glasberg & Moore equivalent rectangular bandwidth in Hz.
pub fn erb(f: f64) -> f64 {
    24.7 * (4.37 * f / 1000.0 + 1.0)
}

/// Gammatone decay parameter `1.019 * ERB(f)`.
pub fn erb_bandwidth(f: f64) -> f64 {
    1.019 * erb(f)
}

fn erb_rate(f: f64) -> f64 {
    21.4 * (1.0 + 0.00437 * f).log10()
}

fn erb_rate_to_hz(e: f64) -> f64 {
    (10f64.powf(e / 21.4) - 1.0) / 0.00437
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammatoneFilter {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub order: u32,
    pub gain: f64,
    pub phase: f64,
}

impl GammatoneFilter {
    /// Filter with gain chosen for unit magnitude response at the centre.
    pub fn unit_peak(center_hz: f64, order: u32) -> Self {
        let bandwidth_hz = erb_bandwidth(center_hz);
        let fact: f64 = (1..order).map(f64::from).product();
        let gain = 2.0 * (2.0 * PI * bandwidth_hz).powi(order as i32) / fact;
        Self { center_hz, bandwidth_hz, order, gain, phase: 0.0 }
    }

    /// `a t^(n-1) exp(-2 pi B t) cos(2 pi f t + phi)` for `t >= 0`, else 0.
    pub fn response(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.gain
            * t.powi(self.order as i32 - 1)
            * (-2.0 * PI * self.bandwidth_hz * t).exp()
            * (2.0 * PI * self.center_hz * t + self.phase).cos()
    }

    /// Impulse response sampled at `rate` and scaled by the sampling interval,
    /// truncated once the envelope has decayed by ~100 dB.
    fn kernel(&self, rate: f64) -> Vec<f64> {
        let t_max = (self.order as f64 + 16.0) / (2.0 * PI * self.bandwidth_hz);
        let len = (t_max * rate).ceil() as usize + 1;
        (0..len).map(|m| self.response(m as f64 / rate) / rate).collect()
    }
}

/// Bank of gammatone filters ordered by increasing centre frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct GammatoneBank {
    filters: Vec<GammatoneFilter>,
    sample_rate: u32,
}

impl GammatoneBank {
    pub fn new(filters: Vec<GammatoneFilter>, sample_rate: u32) -> Result<Self> {
        if filters.is_empty() {
            return Err(invalid("gammatone bank needs at least one channel"));
        }
        for f in &filters {
            if !(f.bandwidth_hz > 0.0 && f.order >= 1 && f.center_hz >= 0.0) {
                return Err(invalid(format!("bad gammatone filter {f:?}")));
            }
        }
        Ok(Self { filters, sample_rate })
    }

    /// Order-4, zero-phase filters with centres equally spaced on the ERB-rate
    /// scale between `f_lo` and `f_hi`.
    pub fn erb_spaced(n_channels: usize, f_lo: f64, f_hi: f64, sample_rate: u32) -> Result<Self> {
        if n_channels == 0 || !(0.0 < f_lo && f_lo < f_hi) {
            return Err(invalid(format!("bad gammatone band [{f_lo}, {f_hi}] x {n_channels}")));
        }
        let (e_lo, e_hi) = (erb_rate(f_lo), erb_rate(f_hi));
        let step = if n_channels > 1 { (e_hi - e_lo) / (n_channels - 1) as f64 } else { 0.0 };
        let filters = (0..n_channels)
            .map(|i| GammatoneFilter::unit_peak(erb_rate_to_hz(e_lo + step * i as f64), 4))
            .collect();
        Self::new(filters, sample_rate)
    }

    pub fn filters(&self) -> &[GammatoneFilter] {
        &self.filters
    }

    pub fn n_channels(&self) -> usize {
        self.filters.len()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn centers_hz(&self) -> Vec<f64> {
        self.filters.iter().map(|f| f.center_hz).collect()
    }

    /// Copy with every gain multiplied by `scale`.
    pub fn with_gain_scale(&self, scale: f64) -> Self {
        let filters = self
            .filters
            .iter()
            .map(|f| GammatoneFilter { gain: f.gain * scale, ..*f })
            .collect();
        Self { filters, sample_rate: self.sample_rate }
    }

    /// Each channel's output for `x`, same length as `x`.
    pub fn filter(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let rate = self.sample_rate as f64;
        let kernels: Vec<Vec<f64>> = self.filters.iter().map(|f| f.kernel(rate)).collect();
        convolve_causal(x, &kernels)
    }

    fn check_rate(&self, clip: &AudioClip) -> Result<()> {
        if clip.sample_rate() != self.sample_rate {
            return Err(invalid(format!(
                "bank built for {} Hz, clip is {} Hz",
                self.sample_rate,
                clip.sample_rate()
            )));
        }
        Ok(())
    }
}

/// Impulse response of one channel at time `t` seconds.
pub fn gammatone_response(bank: &GammatoneBank, channel: usize, t: f64) -> Result<f64> {
    bank.filters
        .get(channel)
        .map(|f| f.response(t))
        .ok_or_else(|| invalid(format!("channel {channel} out of range 0..{}", bank.n_channels())))
}

fn framed(
    clip: &AudioClip,
    bank: &GammatoneBank,
    frame_len: usize,
    hop: usize,
    reduce: impl Fn(&[f64]) -> f64,
) -> Result<TimeFreqMatrix> {
    bank.check_rate(clip)?;
    if frame_len == 0 || hop == 0 {
        return Err(invalid("frame length and hop must be positive"));
    }
    if clip.len() < frame_len {
        return Err(Error::TooShort { needed: frame_len, got: clip.len() });
    }
    let channels = bank.filter(clip.samples());
    let rows = channels.len();
    let cols = 1 + (clip.len() - frame_len) / hop;
    let mut values = Vec::with_capacity(rows * cols);
    for y in &channels {
        values.extend((0..cols).map(|j| reduce(&y[j * hop..j * hop + frame_len])));
    }
    TimeFreqMatrix::new(
        rows,
        cols,
        values,
        FreqAxis::Centers(bank.centers_hz()),
        hop as f64 / clip.sample_rate() as f64,
    )
}

/// Per-frame RMS of each gammatone channel.
pub fn gammatone_spectrogram(
    clip: &AudioClip,
    bank: &GammatoneBank,
    frame_len: usize,
    hop: usize,
) -> Result<TimeFreqMatrix> {
    framed(clip, bank, frame_len, hop, |w| {
        (w.iter().map(|v| v * v).sum::<f64>() / w.len() as f64).sqrt()
    })
}

/// Windowed energy (sum of squares) of each gammatone channel.
pub fn cochleagram(clip: &AudioClip, bank: &GammatoneBank, win_s: f64, hop_s: f64) -> Result<TimeFreqMatrix> {
    if !(hop_s > 0.0 && win_s >= hop_s) {
        return Err(invalid(format!("need win ({win_s}) >= hop ({hop_s}) > 0")));
    }
    let rate = clip.sample_rate() as f64;
    let win = ((win_s * rate).round() as usize).max(1);
    let hop = ((hop_s * rate).round() as usize).max(1);
    framed(clip, bank, win, hop, |w| w.iter().map(|v| v * v).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::sine;

    fn bank(rate: u32) -> GammatoneBank {
        GammatoneBank::erb_spaced(32, 50.0, 0.45 * rate as f64, rate).unwrap()
    }

    #[test]
    fn causal_and_zero_at_origin() {
        let b = bank(16000);
        assert_eq!(gammatone_response(&b, 3, -0.001).unwrap(), 0.0);
        assert_eq!(gammatone_response(&b, 3, 0.0).unwrap(), 0.0);
        assert!(gammatone_response(&b, 32, 0.01).is_err());
    }

    #[test]
    fn first_order_direct_evaluation() {
        let f = GammatoneFilter { center_hz: 0.0, bandwidth_hz: 100.0, order: 1, gain: 1.0, phase: 0.0 };
        let b = GammatoneBank::new(vec![f], 16000).unwrap();
        let v = gammatone_response(&b, 0, 0.001).unwrap();
        assert!((v - (-0.2 * PI).exp()).abs() < 1e-12);
        assert!((v - 0.5335).abs() < 1e-4);
    }

    #[test]
    fn bandwidth_grows_with_centre() {
        let b = GammatoneBank::erb_spaced(64, 50.0, 14400.0, 32000).unwrap();
        for w in b.filters().windows(2) {
            assert!(w[1].center_hz > w[0].center_hz);
            assert!(w[1].bandwidth_hz > w[0].bandwidth_hz);
        }
    }

    #[test]
    fn unit_gain_at_centre() {
        // steady-state amplitude of a centre-frequency tone through the FIR
        let rate = 16000;
        let b = bank(rate);
        for ch in [4, 16, 28] {
            let fc = b.filters()[ch].center_hz;
            let clip = sine(fc, rate, 0.5);
            let y = &b.filter(clip.samples())[ch];
            let tail = &y[y.len() / 2..];
            let amp = tail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!((amp - 1.0).abs() < 0.03, "channel {ch}: {amp}");
        }
    }

    #[test]
    fn silence_gives_zero_rows() {
        let b = bank(16000);
        let clip = AudioClip::new(vec![0.0; 2000], 16000).unwrap();
        let m = gammatone_spectrogram(&clip, &b, 400, 160).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.0));
        let c = cochleagram(&clip, &b, 0.02, 0.01).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tone_selects_its_channel() {
        let rate = 16000;
        let b = bank(rate);
        for ch in [5, 15, 25] {
            let clip = sine(b.filters()[ch].center_hz, rate, 0.5);
            let m = gammatone_spectrogram(&clip, &b, 512, 256).unwrap();
            for j in 2..m.cols() - 1 {
                let arg = (0..m.rows()).max_by(|&x, &y| m.get(x, j).total_cmp(&m.get(y, j))).unwrap();
                assert_eq!(arg, ch, "frame {j}");
            }
        }
    }

    #[test]
    fn doubling_gain_doubles_rms() {
        let rate = 16000;
        let b = bank(rate);
        let clip = sine(900.0, rate, 0.25);
        let m1 = gammatone_spectrogram(&clip, &b, 512, 256).unwrap();
        let m2 = gammatone_spectrogram(&clip, &b.with_gain_scale(2.0), 512, 256).unwrap();
        for (a, b) in m1.values().iter().zip(m2.values()) {
            assert!((b - 2.0 * a).abs() <= 1e-9 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn cochleagram_of_doubled_clip() {
        let rate = 16000;
        let b = bank(rate);
        let mut rng = crate::RngStream::new(8);
        let x: Vec<f64> = (0..3200).map(|_| rng.gaussian() * 0.3).collect();
        let clip = AudioClip::new(x.clone(), rate).unwrap();
        let doubled = AudioClip::new([x.clone(), x].concat(), rate).unwrap();
        // 20 ms windows with 20 ms hop at 16 kHz: 320 samples, 3200 = 10 windows
        let c1 = cochleagram(&clip, &b, 0.02, 0.02).unwrap();
        let c2 = cochleagram(&doubled, &b, 0.02, 0.02).unwrap();
        assert_eq!(c2.cols(), 2 * c1.cols());
        for i in 0..c1.rows() {
            for j in 0..c1.cols() {
                let (a, d) = (c1.get(i, j), c2.get(i, j));
                assert!((a - d).abs() <= 1e-9 * a.max(1e-12), "({i},{j})");
                assert!(a >= 0.0);
            }
        }
    }

    #[test]
    fn cochleagram_window_validation() {
        let b = bank(16000);
        let clip = AudioClip::new(vec![0.1; 100], 16000).unwrap();
        assert!(cochleagram(&clip, &b, 0.01, 0.02).is_err());
        assert!(matches!(cochleagram(&clip, &b, 0.02, 0.01), Err(Error::TooShort { .. })));
    }
}

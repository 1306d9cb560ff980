use std::f64::consts::PI;

use super::{normalize_output, TsmParams};
use crate::audio::AudioClip;
use crate::dsp::{hann, princarg, FftPair, C64};
use crate::error::Result;

/// Local maxima that beat both neighbours on each side.
fn spectral_peaks(mag: &[f64]) -> Vec<usize> {
    let at = |i: isize| {
        if i < 0 || i as usize >= mag.len() {
            f64::NEG_INFINITY
        } else {
            mag[i as usize]
        }
    };
    (0..mag.len())
        .filter(|&k| {
            let (v, k) = (mag[k], k as isize);
            v > 0.0 && v > at(k - 1) && v > at(k - 2) && v >= at(k + 1) && v >= at(k + 2)
        })
        .collect()
}

/// Assigns each bin to a peak; the boundary between two peaks is the lowest bin
/// between them.
fn peak_regions(mag: &[f64], peaks: &[usize]) -> Vec<usize> {
    let mut owner = vec![peaks[0]; mag.len()];
    for pair in peaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let split = (a..=b).min_by(|&i, &j| mag[i].total_cmp(&mag[j])).unwrap_or(a);
        for o in &mut owner[split..] {
            *o = b;
        }
    }
    owner
}

fn vocode(clip: &AudioClip, p: &TsmParams, locking: bool) -> Result<AudioClip> {
    p.check_input(clip)?;
    let x = clip.samples();
    let n = p.window_len();
    let hs = p.synthesis_hop();
    let bins = n / 2 + 1;
    let window = hann(n);
    let fft = FftPair::new(n);
    let omega: Vec<f64> = (0..bins).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let out_len = p.output_len(clip.len());
    // Frames start at sample 0 rather than being centred on it: the initial
    // phases are taken from a complete frame and propagated from there.
    let frames = out_len.div_ceil(hs) + 1;
    let buf_len = (frames - 1) * hs + n;
    let mut y = vec![0.0; buf_len];
    let mut env = vec![0.0; buf_len];

    let mut prev: Option<(isize, Vec<f64>, Vec<f64>)> = None;
    for m in 0..frames {
        let start = p.analysis_start(m) + (n / 2) as isize;
        let spec = fft.frame_spectrum(x, start, &window);
        let mag: Vec<f64> = spec[..bins].iter().map(|c| c.norm()).collect();
        let phi: Vec<f64> = spec[..bins].iter().map(|c| c.arg()).collect();
        let theta = match &prev {
            None => phi.clone(),
            Some((prev_start, prev_phi, prev_theta)) => {
                let da = (start - prev_start) as f64;
                let inst: Vec<f64> = (0..bins)
                    .map(|k| {
                        if da == 0.0 {
                            omega[k]
                        } else {
                            omega[k] + princarg(phi[k] - prev_phi[k] - omega[k] * da) / da
                        }
                    })
                    .collect();
                let propagated: Vec<f64> =
                    (0..bins).map(|k| prev_theta[k] + inst[k] * hs as f64).collect();
                let peaks = if locking { spectral_peaks(&mag) } else { Vec::new() };
                if peaks.is_empty() {
                    propagated
                } else {
                    // bins keep their phase offset relative to the peak they belong to
                    peak_regions(&mag, &peaks)
                        .iter()
                        .enumerate()
                        .map(|(k, &pk)| phi[k] + propagated[pk] - phi[pk])
                        .collect()
                }
            }
        };
        let half: Vec<C64> = (0..bins).map(|k| C64::from_polar(mag[k], theta[k])).collect();
        let frame = fft.real_inverse(&half);
        let out_at = m * hs;
        for i in 0..n {
            y[out_at + i] += frame[i] * window[i];
            env[out_at + i] += window[i] * window[i];
        }
        prev = Some((start, phi, theta));
    }
    Ok(clip.with_samples(normalize_output(&y, &env, 0, out_len)))
}

/// Phase vocoder: every bin's phase advances by its instantaneous frequency
/// times the synthesis hop.
pub fn phase_vocoder(clip: &AudioClip, p: &TsmParams) -> Result<AudioClip> {
    vocode(clip, p, false)
}

/// Phase vocoder with identity phase locking around spectral peaks.
pub fn pv_identity_phase_locking(clip: &AudioClip, p: &TsmParams) -> Result<AudioClip> {
    vocode(clip, p, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{peak_frequency, rel_l2, sine};

    #[test]
    fn unit_stretch_reconstructs() {
        let mut rng = crate::RngStream::new(8);
        let clip = AudioClip::new((0..8000).map(|_| rng.gaussian()).collect(), 16000).unwrap();
        let p = TsmParams::pv_default(1.0).unwrap();
        for out in [phase_vocoder(&clip, &p).unwrap(), pv_identity_phase_locking(&clip, &p).unwrap()] {
            assert_eq!(out.len(), clip.len());
            // the periodic Hann window is zero at sample 0, nothing to recover there
            let d = rel_l2(&clip.samples()[1..], &out.samples()[1..]);
            assert!(d < 1e-9, "{d}");
        }
    }

    #[test]
    fn stretched_tone_keeps_frequency() {
        let clip = sine(1000.0, 32000, 1.0);
        for alpha in [0.8, 1.5] {
            let p = TsmParams::pv_default(alpha).unwrap();
            for out in [phase_vocoder(&clip, &p).unwrap(), pv_identity_phase_locking(&clip, &p).unwrap()] {
                let f = peak_frequency(&out);
                assert!((f - 1000.0).abs() < 5.0, "{alpha}: {f}");
                // a steady tone stays steady: RMS in the middle matches the input
                let mid = &out.samples()[out.len() / 4..3 * out.len() / 4];
                let rms = (mid.iter().map(|v| v * v).sum::<f64>() / mid.len() as f64).sqrt();
                assert!((rms - clip.rms()).abs() < 0.05 * clip.rms(), "{alpha}: rms {rms}");
            }
        }
    }

    #[test]
    fn locking_is_vacuous_on_single_sine() {
        let clip = sine(440.0, 16000, 1.0);
        let p = TsmParams::pv_default(1.5).unwrap();
        let a = phase_vocoder(&clip, &p).unwrap();
        let b = pv_identity_phase_locking(&clip, &p).unwrap();
        // Away from the ends the two only differ on far sidelobe bins, whose
        // phase step per analysis hop exceeds pi and is misread by plain PV.
        let mid = 1024..a.len() - 2048;
        let d = rel_l2(&a.samples()[mid.clone()], &b.samples()[mid]);
        assert!(d < 5e-3, "{d}");
    }

    #[test]
    fn chord_keeps_both_peaks() {
        let clip = AudioClip::from_fn(16000, 16000, |t| {
            (2.0 * PI * 440.0 * t).sin() + (2.0 * PI * 1320.0 * t).sin()
        })
        .unwrap();
        let out = pv_identity_phase_locking(&clip, &TsmParams::pv_default(1.5).unwrap()).unwrap();
        let lo = AudioClip::new(out.samples().to_vec(), 16000).unwrap();
        // split the two partials with a crude two-band check on the FFT peak
        let low: Vec<f64> = lo.samples().windows(8).map(|w| w.iter().sum::<f64>() / 8.0).collect();
        let f_lo = peak_frequency(&AudioClip::new(low, 16000).unwrap());
        let f_hi = peak_frequency(&out.with_samples(
            out.samples().windows(2).map(|w| w[1] - w[0]).collect(),
        ));
        assert!((f_lo - 440.0).abs() < 4.4, "{f_lo}");
        assert!((f_hi - 1320.0).abs() < 13.2, "{f_hi}");
    }

    #[test]
    fn regions_split_at_minimum() {
        let mag = [0.0, 1.0, 5.0, 1.0, 0.2, 2.0, 6.0, 2.0, 0.0];
        let peaks = spectral_peaks(&mag);
        assert_eq!(peaks, vec![2, 6]);
        assert_eq!(peak_regions(&mag, &peaks), vec![2, 2, 2, 2, 6, 6, 6, 6, 6]);
    }
}

use super::{normalize_output, TsmParams, WsolaParams};
use crate::audio::AudioClip;
use crate::dsp::hann;
use crate::error::Result;

fn sample(x: &[f64], idx: isize) -> f64 {
    if idx >= 0 && (idx as usize) < x.len() {
        x[idx as usize]
    } else {
        0.0
    }
}

fn dot_at(x: &[f64], a: isize, b: isize, n: usize) -> f64 {
    (0..n as isize).map(|i| sample(x, a + i) * sample(x, b + i)).sum()
}

/// Shared overlap-add core: frame `m` is read from `analysis_start(m) + offsets[m]`.
fn overlap_add(clip: &AudioClip, p: &TsmParams, tolerance: usize) -> Result<AudioClip> {
    p.check_input(clip)?;
    let x = clip.samples();
    let n = p.window_len();
    let hs = p.synthesis_hop();
    let window = hann(n);
    let out_len = p.output_len(clip.len());
    let frames = p.frame_count(out_len);
    let buf_len = (frames - 1) * hs + n;
    let mut y = vec![0.0; buf_len];
    let mut env = vec![0.0; buf_len];
    let tol = tolerance as isize;
    let mut prev_start: Option<isize> = None;
    for m in 0..frames {
        let nominal = p.analysis_start(m);
        let start = match prev_start {
            Some(prev) if tol > 0 => {
                // continue the previous frame naturally and look for the most
                // similar candidate around the nominal position
                let natural = prev + hs as isize;
                let mut best = (f64::NEG_INFINITY, nominal);
                for delta in -tol..=tol {
                    let c = dot_at(x, nominal + delta, natural, n);
                    if c > best.0 {
                        best = (c, nominal + delta);
                    }
                }
                best.1
            }
            _ => nominal,
        };
        prev_start = Some(start);
        let out_at = m * hs;
        for i in 0..n {
            y[out_at + i] += sample(x, start + i as isize) * window[i];
            env[out_at + i] += window[i];
        }
    }
    Ok(clip.with_samples(normalize_output(&y, &env, n / 2, out_len)))
}

/// Overlap-add stretch normalized by the summed window envelope.
pub fn ola(clip: &AudioClip, p: &TsmParams) -> Result<AudioClip> {
    overlap_add(clip, p, 0)
}

/// Overlap-add where each analysis frame may move by up to `tolerance`
/// samples to best match the natural continuation of the previous frame.
pub fn wsola(clip: &AudioClip, p: &WsolaParams) -> Result<AudioClip> {
    overlap_add(clip, &p.base, p.tolerance)
}

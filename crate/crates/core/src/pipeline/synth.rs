//! Small synthetic dataset: steady tones, rising chirps and noise bursts.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use super::manifest::{manifest_csv, ManifestRow};
use crate::audio::{save_wav, AudioClip};
use crate::error::{invalid, Result};
use crate::fsutil::write_atomic;
use crate::rng::RngStream;

pub const SYNTH_CLASSES: [&str; 3] = ["burst", "chirp", "tone"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub per_class: usize,
    pub folds: usize,
    pub sample_rate: u32,
    pub duration_s: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self { per_class: 10, folds: 2, sample_rate: 16000, duration_s: 1.0, seed: 7 }
    }
}

/// One clip of `class` (an entry of [`SYNTH_CLASSES`]).
pub fn synth_clip(class: &str, spec: &SynthSpec, rng: &mut RngStream) -> Result<AudioClip> {
    let sr = spec.sample_rate as f64;
    let n = (spec.duration_s * sr).round() as usize;
    let mut x = vec![0.0; n];
    match class {
        "tone" => {
            let f = rng.uniform(400.0, 600.0)?;
            let phase = rng.uniform(0.0, 2.0 * PI)?;
            for (i, v) in x.iter_mut().enumerate() {
                *v = 0.5 * (2.0 * PI * f * i as f64 / sr + phase).sin();
            }
        }
        "chirp" => {
            let (f0, f1) = (1000.0, 6000.0);
            let t_end = spec.duration_s;
            let phase = rng.uniform(0.0, 2.0 * PI)?;
            for (i, v) in x.iter_mut().enumerate() {
                let t = i as f64 / sr;
                *v = 0.5 * (2.0 * PI * (f0 * t + (f1 - f0) * t * t / (2.0 * t_end)) + phase).sin();
            }
        }
        "burst" => {
            let burst = (0.05 * sr) as usize;
            for _ in 0..5 {
                let start = rng.int_inclusive(0, (n - burst) as i64) as usize;
                for v in &mut x[start..start + burst] {
                    *v += 0.25 * rng.gaussian();
                }
            }
        }
        other => return Err(invalid(format!("unknown synthetic class '{other}'"))),
    }
    for v in &mut x {
        *v = (*v + 0.005 * rng.gaussian()).clamp(-1.0, 1.0);
    }
    AudioClip::new(x, spec.sample_rate)
}

/// Writes `per_class` WAVs per class and a `manifest.csv` into `dir`, with
/// folds assigned round-robin inside each class. Returns the manifest path.
pub fn write_synthetic_dataset(dir: impl AsRef<Path>, spec: &SynthSpec) -> Result<PathBuf> {
    if spec.folds == 0 || spec.per_class < spec.folds {
        return Err(invalid("need at least one clip per class and fold"));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let root = RngStream::new(spec.seed);
    let mut rows = Vec::new();
    for (c, class) in SYNTH_CLASSES.iter().enumerate() {
        for i in 0..spec.per_class {
            let mut rng = root.fork((c * spec.per_class + i) as u64);
            let clip = synth_clip(class, spec, &mut rng)?;
            let id = format!("{class}_{i:02}");
            let file = format!("{id}.wav");
            save_wav(&clip, dir.join(&file))?;
            rows.push(ManifestRow {
                pattern_id: id,
                wav_path: PathBuf::from(file),
                label: class.to_string(),
                fold: i % spec.folds + 1,
            });
        }
    }
    let path = dir.join("manifest.csv");
    write_atomic(&path, manifest_csv(&rows).as_bytes())?;
    Ok(path)
}

//! WebAssembly bindings for the browser demo: render a spectrogram, preview a
//! protocol's augmented copies, and time-stretch a clip for playback.

use sonoforge::audio::resample;
use sonoforge::augment::{AugmentConfig, Domain, Protocol};
use sonoforge::repr::{GrayImage, Renderer, ReprConfig, Representation};
use sonoforge::tsm::TsmAlgorithm;
use sonoforge::{AudioClip, Result, RngStream};
use wasm_bindgen::prelude::*;

/// Rate everything is brought to before rendering.
pub const WORK_RATE: u32 = 16000;

fn clip_at_work_rate(samples: &[f32], sample_rate: u32) -> Result<AudioClip> {
    let clip = AudioClip::new(samples.iter().map(|&v| v as f64).collect(), sample_rate)?;
    if sample_rate == WORK_RATE {
        Ok(clip)
    } else {
        resample(&clip, WORK_RATE)
    }
}

fn renderer(repr: &str) -> Result<Renderer> {
    let kind: Representation = repr.parse()?;
    Renderer::new(ReprConfig::with_kind(kind), WORK_RATE)
}

pub fn render_image(samples: &[f32], sample_rate: u32, repr: &str) -> Result<GrayImage> {
    renderer(repr)?.render(&clip_at_work_rate(samples, sample_rate)?)
}

/// Every copy `protocol` makes of the clip, as images.
pub fn augment_images(samples: &[f32], sample_rate: u32, repr: &str, protocol: &str, seed: u64) -> Result<Vec<GrayImage>> {
    let protocol: Protocol = protocol.parse()?;
    let r = renderer(repr)?;
    let clip = clip_at_work_rate(samples, sample_rate)?;
    let config = AugmentConfig::default();
    let rng = RngStream::new(seed);
    match protocol.domain() {
        Domain::Signal => config.augment_clip(protocol, &clip, &rng)?.iter().map(|c| r.render(c)).collect(),
        Domain::Spectrogram => config.augment_image(protocol, &r.render(&clip)?, &rng),
    }
}

/// Time-stretched samples at the original rate.
pub fn stretch_samples(samples: &[f32], sample_rate: u32, algorithm: &str, alpha: f64) -> Result<Vec<f32>> {
    let algorithm: TsmAlgorithm = algorithm.parse()?;
    let clip = AudioClip::new(samples.iter().map(|&v| v as f64).collect(), sample_rate)?;
    Ok(algorithm.stretch(&clip, alpha)?.samples().iter().map(|&v| v as f32).collect())
}

/// RGBA pixels ready for `ImageData`, low frequencies at the bottom.
#[wasm_bindgen]
pub struct Picture {
    width: u32,
    height: u32,
    rgba: Vec<u8>,
}

#[wasm_bindgen]
impl Picture {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }
}

impl From<&GrayImage> for Picture {
    fn from(img: &GrayImage) -> Self {
        let mut rgba = Vec::with_capacity(img.rows() * img.cols() * 4);
        for r in (0..img.rows()).rev() {
            for &v in img.row(r) {
                rgba.extend_from_slice(&[v, v, v, 255]);
            }
        }
        Self { width: img.cols() as u32, height: img.rows() as u32, rgba }
    }
}

#[wasm_bindgen]
pub struct Gallery {
    pictures: Vec<Picture>,
}

#[wasm_bindgen]
impl Gallery {
    #[wasm_bindgen(getter)]
    pub fn length(&self) -> usize {
        self.pictures.len()
    }

    /// Copy `i`, wrapping around.
    pub fn get(&self, i: usize) -> Picture {
        let p = &self.pictures[i % self.pictures.len()];
        Picture { width: p.width, height: p.height, rgba: p.rgba.clone() }
    }
}

fn js(e: sonoforge::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Spectrogram image of mono samples.
#[wasm_bindgen]
pub fn render(samples: &[f32], sample_rate: u32, repr: &str) -> std::result::Result<Picture, JsError> {
    Ok((&render_image(samples, sample_rate, repr).map_err(js)?).into())
}

/// All augmented copies under `protocol` (sgn, ssa, ssia, tsm, sspa, susa).
#[wasm_bindgen]
pub fn augment(samples: &[f32], sample_rate: u32, repr: &str, protocol: &str, seed: u32) -> std::result::Result<Gallery, JsError> {
    let images = augment_images(samples, sample_rate, repr, protocol, seed as u64).map_err(js)?;
    Ok(Gallery { pictures: images.iter().map(Picture::from).collect() })
}

/// Stretched copy for playback (ola, wsola, pv, pvpl, hpss).
#[wasm_bindgen]
pub fn stretch(samples: &[f32], sample_rate: u32, algorithm: &str, alpha: f64) -> std::result::Result<Vec<f32>, JsError> {
    stretch_samples(samples, sample_rate, algorithm, alpha).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(sr: u32, secs: f64) -> Vec<f32> {
        let n = (sr as f64 * secs) as usize;
        (0..n).map(|i| (0.5 * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / sr as f64).sin()) as f32).collect()
    }

    #[test]
    fn render_resamples_to_work_rate() {
        let a = render_image(&tone(44100, 0.5), 44100, "dgt").unwrap();
        let b = render_image(&tone(WORK_RATE, 0.5), WORK_RATE, "dgt").unwrap();
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
        assert!(render_image(&tone(WORK_RATE, 0.5), WORK_RATE, "wavelet").is_err());
    }

    #[test]
    fn picture_is_flipped_rgba() {
        let img = GrayImage::from_fn(2, 3, |r, c| (r * 3 + c) as u8).unwrap();
        let p = Picture::from(&img);
        assert_eq!((p.width(), p.height()), (3, 2));
        assert_eq!(&p.rgba()[..4], &[3, 3, 3, 255]);
        assert_eq!(p.rgba().len(), 24);
    }

    #[test]
    fn augment_counts() {
        let x = tone(WORK_RATE, 0.5);
        assert_eq!(augment_images(&x, WORK_RATE, "mel", "sspa", 1).unwrap().len(), 5);
        assert_eq!(augment_images(&x, WORK_RATE, "dgt", "ssa", 1).unwrap().len(), 10);
        assert!(augment_images(&x, WORK_RATE, "dgt", "xyz", 1).is_err());
    }

    #[test]
    fn stretch_length() {
        let x = tone(WORK_RATE, 0.5);
        let y = stretch_samples(&x, WORK_RATE, "pvpl", 1.5).unwrap();
        assert_eq!(y.len(), (x.len() as f64 * 1.5).round() as usize);
    }
}

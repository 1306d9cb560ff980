//! Manifest-driven batch runs: per fold, training clips are rendered and
//! augmented, test clips are only rendered.
//!
//! Output layout under `out_dir`:
//!
//! ```text
//! {fold}/train/none/{id}_00.{ext}          original only
//! {fold}/train/{protocol}/{id}_{copy}.{ext} copy 00 is the original
//! {fold}/test/none/{id}_00.{ext}
//! preview/{id}.png                          optional, low frequencies at the bottom
//! summary.json
//! ```

mod manifest;
mod synth;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use manifest::{manifest_csv, parse_manifest, Manifest, ManifestRow};
pub use synth::{synth_clip, write_synthetic_dataset, SynthSpec, SYNTH_CLASSES};

use crate::audio::{load_wav, resample, AudioClip};
use crate::augment::{AugmentConfig, Domain, Protocol};
use crate::error::{invalid, Error, Result};
use crate::fsutil::write_atomic;
use crate::fusion::{prototype_score, prototype_train, ScoreMatrix};
use crate::repr::{
    encode_image, read_image, resize_bilinear, GrayImage, ImageFormat, Renderer, ReprConfig,
};
use crate::rng::{mix64, RngStream};

pub const SCHEMA_VERSION: u32 = 1;

/// Directory name for unaugmented images.
pub const NO_PROTOCOL: &str = "none";

const SEED_SALT: u64 = 0x5EED_0F50_40F0_463E;

fn absorb(h: u64, x: u64) -> u64 {
    mix64(h.wrapping_add(0x9E37_79B9_7F4A_7C15) ^ x)
}

/// Stream for one (pattern, copy, operation) under a global seed. The pattern
/// id is absorbed in 8-byte little-endian words followed by its length, so
/// the result is the same on every platform.
pub fn derive_seed(global: u64, pattern_id: &str, copy: u64, op: u64) -> RngStream {
    let mut h = absorb(SEED_SALT, global);
    for chunk in pattern_id.as_bytes().chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        h = absorb(h, u64::from_le_bytes(word));
    }
    h = absorb(h, pattern_id.len() as u64);
    h = absorb(h, copy);
    RngStream::new(absorb(h, op))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema_version: u32,
    /// Clips at other rates are resampled on load.
    pub sample_rate: u32,
    pub repr: ReprConfig,
    pub protocols: Vec<Protocol>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: ImageFormat,
    /// `[rows, cols]` applied to every written image.
    pub resize: Option<[usize; 2]>,
    pub augment: AugmentConfig,
    pub preview: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            sample_rate: 22050,
            repr: ReprConfig::default(),
            protocols: vec![Protocol::Ssa],
            seed: 0,
            out_dir: PathBuf::from("out"),
            format: ImageFormat::Pgm,
            resize: None,
            augment: AugmentConfig::default(),
            preview: false,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.sample_rate == 0 {
            return Err(Error::Config("sample_rate must be positive".into()));
        }
        let mut seen = self.protocols.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.protocols.len() {
            return Err(Error::Config("protocol listed twice".into()));
        }
        if self.augment.tsm_alphas.is_empty() || self.augment.tsm_alphas.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::Config("tsm_alphas must be positive and non-empty".into()));
        }
        if let Some([r, c]) = self.resize {
            if r == 0 || c == 0 {
                return Err(Error::Config("resize dimensions must be positive".into()));
            }
        }
        Renderer::new(self.repr.clone(), self.sample_rate).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

/// Options that affect scheduling and error policy but never the outputs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    pub skip_errors: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub train_patterns: usize,
    pub test_patterns: usize,
    pub test_images: usize,
    /// Images per training directory, including `none`.
    pub train_images: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub pattern_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub seed: u64,
    pub representation: String,
    pub sample_rate: u32,
    pub format: ImageFormat,
    pub protocols: Vec<Protocol>,
    pub patterns: usize,
    pub copies: BTreeMap<String, usize>,
    pub folds: Vec<FoldSummary>,
    pub images_written: usize,
    pub failures: Vec<Failure>,
}

/// Loads a WAV and brings it to `rate`.
pub fn load_clip(path: &Path, rate: u32) -> Result<AudioClip> {
    let clip = load_wav(path)?;
    if clip.sample_rate() == rate {
        Ok(clip)
    } else {
        resample(&clip, rate)
    }
}

/// Image rotated for viewing: low frequencies at the bottom.
pub fn preview_image(img: &GrayImage) -> GrayImage {
    img.flipped_vertically()
}

fn op_index(p: Protocol) -> u64 {
    Protocol::ALL.iter().position(|&q| q == p).unwrap() as u64
}

/// Original and augmented images of one clip.
struct PatternImages {
    raw: GrayImage,
    original: GrayImage,
    sets: Vec<(Protocol, Vec<GrayImage>)>,
}

struct Job<'a> {
    config: &'a PipelineConfig,
    renderer: Renderer,
}

impl Job<'_> {
    fn finish(&self, img: GrayImage) -> Result<GrayImage> {
        match self.config.resize {
            Some([r, c]) => resize_bilinear(&img, r, c),
            None => Ok(img),
        }
    }

    fn images(&self, row: &ManifestRow, augment: bool) -> Result<PatternImages> {
        let clip = load_clip(&row.wav_path, self.config.sample_rate)?;
        let raw = self.renderer.render(&clip)?;
        let original = self.finish(raw.clone())?;
        let mut sets = Vec::new();
        if augment {
            for &p in &self.config.protocols {
                let rng = derive_seed(self.config.seed, &row.pattern_id, 0, op_index(p));
                let copies = match p.domain() {
                    Domain::Signal => self
                        .config
                        .augment
                        .augment_clip(p, &clip, &rng)?
                        .iter()
                        .map(|c| self.renderer.render(c).and_then(|img| self.finish(img)))
                        .collect::<Result<Vec<_>>>()?,
                    Domain::Spectrogram => self
                        .config
                        .augment
                        .augment_image(p, &raw, &rng)?
                        .into_iter()
                        .map(|img| self.finish(img))
                        .collect::<Result<Vec<_>>>()?,
                };
                sets.push((p, copies));
            }
        }
        Ok(PatternImages { raw, original, sets })
    }

    fn write(&self, dir: &Path, id: &str, copy: usize, img: &GrayImage) -> Result<()> {
        let name = format!("{id}_{copy:02}.{}", self.config.format.extension());
        write_atomic(&dir.join(name), &encode_image(img, self.config.format)?)
    }

    /// Renders, augments and writes one pattern into every fold it belongs to.
    fn run(&self, row: &ManifestRow, n_folds: usize) -> Result<()> {
        let out = &self.config.out_dir;
        let train_somewhere = n_folds > 1;
        let imgs = self.images(row, train_somewhere)?;
        let id = row.pattern_id.as_str();
        for fold in 1..=n_folds {
            let fold_dir = out.join(fold.to_string());
            if row.fold == fold {
                self.write(&fold_dir.join("test").join(NO_PROTOCOL), id, 0, &imgs.original)?;
                continue;
            }
            let train = fold_dir.join("train");
            self.write(&train.join(NO_PROTOCOL), id, 0, &imgs.original)?;
            for (p, copies) in &imgs.sets {
                let dir = train.join(p.name());
                self.write(&dir, id, 0, &imgs.original)?;
                for (i, img) in copies.iter().enumerate() {
                    self.write(&dir, id, i + 1, img)?;
                }
            }
        }
        if self.config.preview {
            let path = out.join("preview").join(format!("{id}.png"));
            write_atomic(&path, &encode_image(&preview_image(&imgs.raw), ImageFormat::Png)?)?;
        }
        Ok(())
    }
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(invalid("workers must be at least 1"));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| invalid(format!("thread pool: {e}")))
}

/// Runs the whole manifest and writes `summary.json` into the output
/// directory. Fails with [`Error::Batch`] if any pattern failed, unless
/// `opts.skip_errors` is set; the summary is written either way.
pub fn run_pipeline(config: &PipelineConfig, manifest: &Manifest, opts: RunOptions) -> Result<RunSummary> {
    config.validate()?;
    let job = Job { config, renderer: Renderer::new(config.repr.clone(), config.sample_rate)? };
    let k = manifest.n_folds();
    let out = &config.out_dir;
    for fold in 1..=k {
        let fold_dir = out.join(fold.to_string());
        fs::create_dir_all(fold_dir.join("test").join(NO_PROTOCOL))?;
        fs::create_dir_all(fold_dir.join("train").join(NO_PROTOCOL))?;
        for p in &config.protocols {
            fs::create_dir_all(fold_dir.join("train").join(p.name()))?;
        }
    }
    if config.preview {
        fs::create_dir_all(out.join("preview"))?;
    }

    let pool = thread_pool(opts.workers)?;
    let results: Vec<Result<()>> = pool.install(|| manifest.rows().par_iter().map(|row| job.run(row, k)).collect());
    let mut failures = Vec::new();
    let mut ok = HashMap::new();
    for (row, r) in manifest.rows().iter().zip(results) {
        match r {
            Ok(()) => {
                ok.insert(row.pattern_id.as_str(), row.fold);
            }
            Err(e) => {
                log::warn!("{}: {e}", row.pattern_id);
                failures.push(Failure { pattern_id: row.pattern_id.clone(), message: e.to_string() });
            }
        }
    }

    let copies: BTreeMap<String, usize> =
        config.protocols.iter().map(|&p| (p.name().to_string(), config.augment.copies(p))).collect();
    let mut folds = Vec::with_capacity(k);
    let mut images_written = 0;
    for fold in 1..=k {
        let test = ok.values().filter(|&&f| f == fold).count();
        let train = ok.len() - test;
        let mut train_images = BTreeMap::new();
        train_images.insert(NO_PROTOCOL.to_string(), train);
        for (name, n) in &copies {
            train_images.insert(name.clone(), train * (1 + n));
        }
        images_written += test + train_images.values().sum::<usize>();
        folds.push(FoldSummary {
            fold,
            train_patterns: train,
            test_patterns: test,
            test_images: test,
            train_images,
        });
    }
    if config.preview {
        images_written += ok.len();
    }
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        representation: config.repr.kind.name().to_string(),
        sample_rate: config.sample_rate,
        format: config.format,
        protocols: config.protocols.clone(),
        patterns: manifest.len(),
        copies,
        folds,
        images_written,
        failures,
    };
    write_atomic(&out.join("summary.json"), &serde_json::to_vec_pretty(&summary)?)?;
    if !summary.failures.is_empty() && !opts.skip_errors {
        let f = &summary.failures[0];
        return Err(Error::Batch { count: summary.failures.len(), first: format!("{}: {}", f.pattern_id, f.message) });
    }
    Ok(summary)
}

/// Image files in `dir` keyed by pattern id, sorted by file name.
fn read_image_dir(dir: &Path) -> Result<Vec<(String, GrayImage)>> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| ImageFormat::from_path(p).is_some())
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|p| {
            let stem = p.file_stem().unwrap_or_default().to_string_lossy();
            let id = stem.rsplit_once('_').map_or(&*stem, |(id, _)| id).to_string();
            Ok((id, read_image(&p)?))
        })
        .collect()
}

/// Nearest-centroid scores for every test pattern of a finished run, training
/// each fold on `out_dir/{fold}/train/{train_set}`. Rows follow manifest order
/// and only patterns with a test image are included.
pub fn prototype_scores(out_dir: &Path, manifest: &Manifest, train_set: &str, down: usize) -> Result<ScoreMatrix> {
    let classes = manifest.classes();
    let truth = manifest.truth();
    let mut scored: HashMap<String, Vec<f64>> = HashMap::new();
    for fold in 1..=manifest.n_folds() {
        let fold_dir = out_dir.join(fold.to_string());
        let train = read_image_dir(&fold_dir.join("train").join(train_set))?;
        let mut labels = Vec::with_capacity(train.len());
        for (id, _) in &train {
            labels.push(*truth.get(id).ok_or_else(|| Error::MissingPattern(id.clone()))?);
        }
        let images: Vec<GrayImage> = train.into_iter().map(|(_, img)| img).collect();
        let model = prototype_train(&images, &labels, classes.len(), down)?;
        for (id, img) in read_image_dir(&fold_dir.join("test").join(NO_PROTOCOL))? {
            scored.insert(id, prototype_score(&img, &model)?);
        }
    }
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for r in manifest.rows() {
        if let Some(s) = scored.remove(&r.pattern_id) {
            ids.push(r.pattern_id.clone());
            rows.push(s);
        }
    }
    ScoreMatrix::from_rows(ids, classes, &rows, train_set)
}

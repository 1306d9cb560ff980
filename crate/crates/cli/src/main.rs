use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sonoforge::audio::save_wav;
use sonoforge::augment::{Domain, Protocol};
use sonoforge::fusion::{evaluate, load_scores, normalize, save_scores, sum_rule, write_report, ScoreMatrix};
use sonoforge::pipeline::{
    load_clip, parse_manifest, preview_image, prototype_scores, run_pipeline, write_synthetic_dataset,
    PipelineConfig, RunOptions, SynthSpec,
};
use sonoforge::repr::{export_image, read_image, ImageFormat, Renderer, Representation};
use sonoforge::RngStream;

#[derive(Parser)]
#[command(name = "sonoforge", version, about = "Audio to image representations, augmentation and score fusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Pipeline config (JSON); supplies representation, sample rate and presets
    #[arg(long)]
    config: Option<PathBuf>,
    /// Representation: dgt, mel, gamma or cochlea
    #[arg(long)]
    repr: Option<Representation>,
    /// Global seed
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p).with_context(|| format!("reading config {}", p.display()))?,
            None => PipelineConfig::default(),
        };
        if let Some(r) = self.repr {
            c.repr.kind = r;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render a WAV file to a grayscale image (PNG or PGM, by extension)
    Repr {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write the augmented copies of one WAV or image into a directory
    Augment {
        input: PathBuf,
        #[arg(long)]
        protocol: Protocol,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated stretch factors for the TSM protocol
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Sum-rule fusion of score files
    Fuse {
        #[arg(required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Standardize each member before averaging (for heterogeneous sources)
        #[arg(long)]
        normalize: bool,
    },
    /// Fold-wise accuracy of a score file, using the folds of a manifest
    Eval {
        scores: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Report directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Render and augment a whole manifest
    Pipeline {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Protocols to run (repeat or comma-separate); overrides the config
        #[arg(long, value_delimiter = ',')]
        protocol: Vec<Protocol>,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        skip_errors: bool,
        #[arg(long, env = "SONOFORGE_WORKERS")]
        workers: Option<usize>,
        /// Also write PNG previews
        #[arg(long)]
        preview: bool,
        #[command(flatten)]
        common: Common,
    },
    /// PNG spectrogram plot of a WAV file, low frequencies at the bottom
    Preview {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Nearest-centroid scores from a finished pipeline run
    Baseline {
        /// Output directory of the pipeline run
        run: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Training directory to use: none or a protocol name
        #[arg(long, default_value = "none")]
        train_set: String,
        /// Side of the pooled feature grid
        #[arg(long, default_value_t = 32)]
        down: usize,
        /// Score file to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a small synthetic dataset (tones, chirps, noise bursts) and its manifest
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        per_class: usize,
        #[arg(long, default_value_t = 2)]
        folds: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn image_format(path: &Path) -> Result<ImageFormat> {
    ImageFormat::from_path(path).with_context(|| format!("{}: expected a .png or .pgm file name", path.display()))
}

fn is_image(path: &Path) -> bool {
    ImageFormat::from_path(path).is_some()
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "clip".into())
}

fn cmd_repr(input: &Path, out: &Path, common: &Common, preview: bool) -> Result<()> {
    let config = common.config()?;
    let format = if preview { ImageFormat::Png } else { image_format(out)? };
    let clip = load_clip(input, config.sample_rate).with_context(|| format!("loading {}", input.display()))?;
    let img = Renderer::new(config.repr, config.sample_rate)?.render(&clip)?;
    let img = if preview { preview_image(&img) } else { img };
    export_image(&img, out, format)?;
    println!("{} ({}x{})", out.display(), img.rows(), img.cols());
    Ok(())
}

fn cmd_augment(input: &Path, protocol: Protocol, out: &Path, alphas: Option<Vec<f64>>, common: &Common) -> Result<()> {
    let mut config = common.config()?;
    if let Some(a) = alphas {
        config.augment.tsm_alphas = a;
    }
    std::fs::create_dir_all(out)?;
    let rng = RngStream::new(config.seed);
    let name = stem(input);
    let written = match protocol.domain() {
        Domain::Signal => {
            if is_image(input) {
                bail!("{protocol} works on audio; {} is an image", input.display());
            }
            let clip = load_clip(input, config.sample_rate)?;
            let copies = config.augment.augment_clip(protocol, &clip, &rng)?;
            for (i, c) in copies.iter().enumerate() {
                save_wav(c, out.join(format!("{name}_{:02}.wav", i + 1)))?;
            }
            copies.len()
        }
        Domain::Spectrogram => {
            let (img, format) = if is_image(input) {
                (read_image(input)?, image_format(input)?)
            } else {
                let clip = load_clip(input, config.sample_rate)?;
                (Renderer::new(config.repr.clone(), config.sample_rate)?.render(&clip)?, config.format)
            };
            let copies = config.augment.augment_image(protocol, &img, &rng)?;
            for (i, c) in copies.iter().enumerate() {
                export_image(c, out.join(format!("{name}_{:02}.{}", i + 1, format.extension())), format)?;
            }
            copies.len()
        }
    };
    println!("{written} {protocol} copies written to {}", out.display());
    Ok(())
}

fn cmd_fuse(inputs: &[PathBuf], out: &Path, norm: bool) -> Result<()> {
    let mut members: Vec<ScoreMatrix> = Vec::with_capacity(inputs.len());
    let mut truth = None;
    for p in inputs {
        let (m, t) = load_scores(p).with_context(|| format!("loading {}", p.display()))?;
        let m = match members.first() {
            Some(first) => m.select(first.pattern_ids())?,
            None => m,
        };
        members.push(if norm { normalize(&m)? } else { m });
        truth.get_or_insert(t);
    }
    let fused = sum_rule(&members)?;
    save_scores(out, &fused, truth.as_ref().unwrap())?;
    println!("fused {} members over {} patterns into {}", members.len(), fused.n_patterns(), out.display());
    Ok(())
}

fn cmd_eval(scores: &Path, manifest: &Path, out: &Path) -> Result<()> {
    let (m, truth) = load_scores(scores).with_context(|| format!("loading {}", scores.display()))?;
    let manifest = parse_manifest(manifest)?;
    let report = evaluate(&manifest.splits(), &m, &truth)?;
    write_report(&report, out, "eval")?;
    print!("{}", report.summary());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_pipeline(
    manifest: &Path,
    out: Option<PathBuf>,
    protocols: Vec<Protocol>,
    alphas: Option<Vec<f64>>,
    skip_errors: bool,
    workers: Option<usize>,
    preview: bool,
    common: &Common,
) -> Result<()> {
    let mut config = common.config()?;
    if let Some(o) = out {
        config.out_dir = o;
    }
    if !protocols.is_empty() {
        config.protocols = protocols;
    }
    if let Some(a) = alphas {
        config.augment.tsm_alphas = a;
    }
    config.preview |= preview;
    let manifest = parse_manifest(manifest)?;
    let summary = run_pipeline(&config, &manifest, RunOptions { workers, skip_errors })?;
    for f in &summary.failures {
        eprintln!("skipped {}: {}", f.pattern_id, f.message);
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Repr { input, out, common } => cmd_repr(&input, &out, &common, false),
        Command::Preview { input, out, common } => cmd_repr(&input, &out, &common, true),
        Command::Augment { input, protocol, out, alphas, common } => cmd_augment(&input, protocol, &out, alphas, &common),
        Command::Fuse { inputs, out, normalize } => cmd_fuse(&inputs, &out, normalize),
        Command::Eval { scores, manifest, out } => cmd_eval(&scores, &manifest, &out),
        Command::Pipeline { manifest, out, protocol, alphas, skip_errors, workers, preview, common } => {
            cmd_pipeline(&manifest, out, protocol, alphas, skip_errors, workers, preview, &common)
        }
        Command::Baseline { run, manifest, train_set, down, out } => {
            let manifest = parse_manifest(manifest)?;
            let scores = prototype_scores(&run, &manifest, &train_set, down)?;
            save_scores(&out, &scores, &manifest.truth())?;
            println!("{} patterns scored into {}", scores.n_patterns(), out.display());
            Ok(())
        }
        Command::Synth { out, per_class, folds, seed } => {
            let spec = SynthSpec { per_class, folds, seed, ..SynthSpec::default() };
            let path = write_synthetic_dataset(&out, &spec)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

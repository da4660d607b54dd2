//! Command-line front end: each subcommand is one pipeline invocation over
//! a preset or config file, writing checksummed artifacts to an output
//! directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bisense::config::ScenarioConfig;
use bisense::error::{Error, Result};
use bisense::output::RENDER_FLOOR_DB;
use bisense::pipeline;

#[derive(Parser)]
#[command(
    name = "bisense",
    version,
    about = "Bi-static 60 GHz Wi-Fi sensing simulator and processing pipelines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in preset name (see `presets`).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario config TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to the config's `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated output formats: csv, json, pgm.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<(ScenarioConfig, PathBuf)> {
        let mut cfg = match (&self.preset, &self.config) {
            (Some(name), None) => ScenarioConfig::preset(name)?,
            (None, Some(path)) => ScenarioConfig::load(path)?,
            (None, None) => {
                return Err(Error::InvalidArgument(
                    "pass either --preset <name> or --config <file>".into(),
                ))
            }
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
        };
        if let Some(seed) = self.seed {
            cfg.noise.seed = seed;
        }
        if let Some(formats) = &self.format {
            cfg.output.formats = formats.clone();
        }
        let out = self
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
        cfg.validate()?;
        Ok((cfg, out))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the scenario and store the raw CIR artifact.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Override the directional codebook ("2x2", "2x8", "8x8", or a
        /// codebook TOML path).
        #[arg(long)]
        codebook: Option<String>,
    },
    /// Micro-Doppler and range-Doppler products from a stored SISO artifact.
    Process {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Directory holding the simulate artifact.
        #[arg(long)]
        artifact: PathBuf,
        /// Override the STFT overlap fraction.
        #[arg(long)]
        overlap: Option<f64>,
        /// Override the STFT window kind.
        #[arg(long)]
        window: Option<String>,
    },
    /// Threshold feedback study over a stored SISO artifact.
    Threshold {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        artifact: PathBuf,
        /// Override the threshold levels.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// Angle estimation and accuracy from a stored directional artifact.
    Angles {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        artifact: PathBuf,
    },
    /// Render a stored spectrogram/range-Doppler product as a PGM heatmap.
    Render {
        /// Path to the product's `.meta.json`.
        #[arg(long)]
        meta: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// dB floor for the grayscale mapping.
        #[arg(long, default_value_t = RENDER_FLOOR_DB)]
        floor_db: f64,
    },
    /// List built-in presets.
    Presets,
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { scenario, codebook } => {
            let (mut cfg, out) = scenario.resolve()?;
            if let Some(book) = codebook {
                cfg.directional.codebook = book;
                cfg.validate()?;
            }
            let manifest = pipeline::run_simulate(&cfg, &out)?;
            eprintln!(
                "simulate: wrote {} artifacts to {}",
                manifest.artifacts.len(),
                out.display()
            );
        }
        Command::Process {
            scenario,
            artifact,
            overlap,
            window,
        } => {
            let (mut cfg, out) = scenario.resolve()?;
            if let Some(o) = overlap {
                cfg.processing.overlap = o;
            }
            if let Some(w) = window {
                cfg.processing.window = w.parse()?;
            }
            cfg.validate()?;
            let manifest = pipeline::run_process(&cfg, &artifact, &out)?;
            eprintln!(
                "process: wrote {} artifacts to {}",
                manifest.artifacts.len(),
                out.display()
            );
        }
        Command::Threshold {
            scenario,
            artifact,
            levels,
        } => {
            let (mut cfg, out) = scenario.resolve()?;
            if let Some(levels) = levels {
                cfg.threshold.levels = levels;
                cfg.validate()?;
            }
            let manifest = pipeline::run_threshold(&cfg, &artifact, &out)?;
            eprintln!(
                "threshold: wrote {} artifacts to {}",
                manifest.artifacts.len(),
                out.display()
            );
        }
        Command::Angles { scenario, artifact } => {
            let (cfg, out) = scenario.resolve()?;
            let manifest = pipeline::run_angles(&cfg, &artifact, &out)?;
            eprintln!(
                "angles: wrote {} artifacts to {}",
                manifest.artifacts.len(),
                out.display()
            );
        }
        Command::Render { meta, out, floor_db } => {
            let path = pipeline::run_render(&meta, &out, floor_db)?;
            eprintln!("render: wrote {}", path.display());
        }
        Command::Presets => {
            for (name, description) in ScenarioConfig::preset_names() {
                println!("{name}\t{description}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::FAILURE
        }
    }
}

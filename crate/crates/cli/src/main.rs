//! `islr`: training, evaluation and streaming tools.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use islr_core::grid_features::GridSpec;
use islr_core::pipeline::PipelineConfig;

#[derive(Parser, Debug)]
#[command(name = "islr", version, about = "Sign-language pose and gesture recognition")]
pub struct Cli {
    /// Pipeline configuration file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for splits, synthesis and impostor streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Override one configuration key, e.g. `--set k=3`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct EvalOutput {
    /// Also write the table as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic pose and gesture dataset.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 33)]
        classes: usize,
        #[arg(long, default_value_t = 40)]
        per_class: usize,
        #[arg(long, default_value_t = 40)]
        intermediate_per_class: usize,
        #[arg(long, default_value_t = 12)]
        gestures: usize,
        /// Takes per gesture rendered as frames.
        #[arg(long, default_value_t = 2)]
        frame_takes: usize,
        /// Takes per gesture stored only as tuple streams.
        #[arg(long, default_value_t = 18)]
        tuple_takes: usize,
        /// Disable pose jitter and take noise.
        #[arg(long)]
        no_jitter: bool,
    },
    /// Fit k-NN pose models from `poses/` and `intermediate/`.
    TrainPose {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        models: PathBuf,
    },
    /// Train the gesture bank with Baum-Welch over the takes.
    TrainGestures {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        models: PathBuf,
        /// Gesture definition file; defaults to `<data>/gestures.def`.
        #[arg(long)]
        defs: Option<PathBuf>,
        /// Derive sequences from frames even when tuples.txt exists.
        #[arg(long)]
        from_frames: bool,
    },
    /// Classify still pose images.
    ClassifyImage {
        #[arg(long)]
        models: PathBuf,
        /// Use the intermediate-pose model instead of the static one.
        #[arg(long)]
        intermediate: bool,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Run a take through the pipeline and print per-frame results and
    /// gesture decisions.
    ClassifyTake {
        #[arg(long)]
        models: PathBuf,
        take: PathBuf,
        /// Classify the take's tuples.txt instead of its frames.
        #[arg(long)]
        tuples: bool,
        /// Print only GESTURE lines.
        #[arg(long)]
        quiet: bool,
        /// Print average per-stage timings.
        #[arg(long)]
        timings: bool,
    },
    /// Seeded train/test split, fit and confusion matrix for poses.
    EvaluatePoses {
        #[arg(long)]
        data: PathBuf,
        /// Evaluate the intermediate poses instead of the static ones.
        #[arg(long)]
        intermediate: bool,
        /// Test on the training set itself.
        #[arg(long)]
        self_test: bool,
        #[command(flatten)]
        out: EvalOutput,
    },
    /// Gesture confusion matrix with a rejection column.
    EvaluateGestures {
        #[arg(long)]
        data: PathBuf,
        /// Score all takes with this bank instead of a seeded split.
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        defs: Option<PathBuf>,
        /// Random-symbol streams that should be rejected.
        #[arg(long, default_value_t = 20)]
        impostors: usize,
        #[arg(long)]
        from_frames: bool,
        #[command(flatten)]
        out: EvalOutput,
    },
    /// Accuracy per grid size over one seeded split.
    SweepGrid {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated grids; defaults to the six-grid sweep set.
        #[arg(long, value_delimiter = ',')]
        grids: Vec<GridSpec>,
        #[arg(long)]
        intermediate: bool,
        #[command(flatten)]
        out: EvalOutput,
    },
    /// Feature vectors as `label,f0,...` CSV.
    ExportFeatures {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        intermediate: bool,
    },
    /// Serve the frame-streaming protocol.
    Serve {
        #[arg(long)]
        models: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
    },
    /// Stream a directory of frames to a server.
    Stream {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        #[arg(long)]
        frames: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        fps: f64,
    },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => PipelineConfig::default(),
    };
    for kv in &cli.overrides {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("override `{kv}` is not KEY=VALUE"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = load_config(&cli).and_then(|cfg| commands::run(&cli, &cfg));
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::run;

pub const SEED_ENV: &str = "MATTEFORGE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "matteforge",
    version,
    about = "Guidance synthesis, matting metrics and losses"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every randomized step (falls back to the config, then MATTEFORGE_SEED, then 0)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: one per logical core)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Composite a foreground over a background with an alpha matte
    Composite {
        #[arg(long)]
        fg: PathBuf,
        #[arg(long)]
        bg: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trimap from a ground-truth alpha by disk erosion
    Trimap {
        #[arg(long)]
        alpha: PathBuf,
        /// Foreground erosion radius in px (random from the seed if omitted)
        #[arg(long)]
        fg_shrink: Option<u32>,
        /// Background erosion radius in px (random from the seed if omitted)
        #[arg(long)]
        bg_shrink: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scribblemap from a trimap at a training step
    Guide {
        #[arg(long)]
        trimap: PathBuf,
        #[arg(long, default_value_t = 0)]
        step: u64,
        /// Fixed stroke thickness in px, overriding the schedule
        #[arg(long)]
        thickness: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Clickmap from a trimap
    Clickmap {
        #[arg(long)]
        trimap: PathBuf,
        #[arg(long, default_value_t = matteforge::guidance::CLICK_DIAMETER)]
        diameter: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scribble thickness at a step, or the whole table
    Schedule {
        #[arg(long)]
        step: Option<u64>,
        /// Table spacing in steps
        #[arg(long, default_value_t = 10_000)]
        every: u64,
    },
    /// SAD / MSE / Grad / Conn for one prediction
    Metrics {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        trimap: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Training loss breakdown for one prediction
    Loss {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        trimap: PathBuf,
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Run the seeded semantic fusion module once and print its checksum
    SfmDemo {
        #[arg(long, default_value_t = 8)]
        channels: usize,
        /// Stride-4 base size
        #[arg(long, default_value_t = 32)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        n_fpem: usize,
        /// Also write the weights as `<out>.bin` + `<out>.json`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate procedural scenes under a dataset root
    Synth {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 128)]
        size: usize,
        /// Dataset root
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a guidance test set for every scene under a root
    Testset {
        #[arg(long)]
        root: Option<PathBuf>,
        #[arg(long)]
        kind: String,
        /// Output directory (default `<root>/guidance`)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a prediction directory against ground truth
    Eval {
        #[arg(long)]
        root: Option<PathBuf>,
        /// Predictions (default `<root>/pred`)
        #[arg(long)]
        pred: Option<PathBuf>,
        /// Ground-truth alphas (default `<root>/alpha`)
        #[arg(long)]
        gt: Option<PathBuf>,
        /// Evaluation trimaps (default `<root>/trimap`)
        #[arg(long)]
        trimap: Option<PathBuf>,
        /// Report stem; writes `<out>.csv` and `<out>.json`
        #[arg(long)]
        out: PathBuf,
    },
    /// Metric spread across re-sampled guidance test sets
    Stability {
        #[arg(long)]
        root: Option<PathBuf>,
        #[arg(long, default_value = "scribblemap")]
        kind: String,
        #[arg(long, default_value_t = 3)]
        variants: usize,
        /// `blur` or `gt`
        #[arg(long, default_value = "blur")]
        predictor: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

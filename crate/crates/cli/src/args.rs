use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Fit and evaluate k-means / k-flats reconstructions of manifold data.
#[derive(Debug, Parser)]
#[command(name = "manrec", version)]
pub struct Cli {
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed (default 0).
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw points from a manifold and store them as a dataset file.
    Sample(SampleArgs),
    /// Fit k centers (best of several k-means++ / Lloyd runs).
    FitKmeans(FitKmeansArgs),
    /// Fit k affine d-flats.
    FitKflats(FitKflatsArgs),
    /// Evaluate the error bounds for a preset manifold.
    Bounds(BoundsArgs),
    /// Two samples on S^100: hold-out error of one mean versus two.
    Example1(Example1Args),
    /// Hold-out error over a grid of training sizes and k.
    Tradeoff(TradeoffArgs),
    /// Log-log rate fits under the theoretical k schedules.
    Rates(RatesArgs),
    /// Choose k by validation error.
    SelectK(SelectKArgs),
    /// Compare a fit with the exhaustive optimum on a tiny dataset.
    OracleCheck(OracleCheckArgs),
}

impl Command {
    /// Section name in the config file.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::FitKmeans(_) => "fit-kmeans",
            Command::FitKflats(_) => "fit-kflats",
            Command::Bounds(_) => "bounds",
            Command::Example1(_) => "example1",
            Command::Tradeoff(_) => "tradeoff",
            Command::Rates(_) => "rates",
            Command::SelectK(_) => "select-k",
            Command::OracleCheck(_) => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldName {
    Sphere,
    Circle,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmName {
    Kmeans,
    KmeansPpSeeding,
    Kflats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Kmeans,
    Kflats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleName {
    Kmeans,
    Kflats,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallName {
    /// Reject points outside the unit ball.
    Require,
    /// Rescale by the largest norm.
    Scale,
    /// Accept as is.
    Ignore,
}

// Every field is optional so that a config-file section can fill it in; the
// defaults are applied after merging.

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub manifold: Option<ManifoldName>,
    /// Intrinsic dimension (ignored for the circle).
    #[arg(long)]
    pub d: Option<usize>,
    /// Ambient dimension (default: d + 1 for spheres, d for disks).
    #[arg(long)]
    pub ambient: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Also write data.csv.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub csv: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FitKmeansArgs {
    /// Dataset file (MRC1 container, or .csv).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ball: Option<BallName>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FitKflatsArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ball: Option<BallName>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Flat dimension.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub preset: Option<ManifoldName>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Measured training error to report alongside the bounds.
    #[arg(long)]
    pub empirical: Option<f64>,
    /// Measured hold-out error to report alongside the bounds.
    #[arg(long)]
    pub holdout: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Example1Args {
    /// Run this many consecutive seeds starting at --seed.
    #[arg(long)]
    pub runs: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TradeoffArgs {
    #[arg(long, value_enum)]
    pub manifold: Option<ManifoldName>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub ambient: Option<usize>,
    /// IDX image file used instead of a synthetic manifold (needs --d).
    #[arg(long)]
    pub mnist: Option<PathBuf>,
    /// Read at most this many images.
    #[arg(long)]
    pub mnist_limit: Option<usize>,
    /// Fraction of the images kept aside for evaluation.
    #[arg(long)]
    pub mnist_holdout_fraction: Option<f64>,
    /// Comma-separated training sizes.
    #[arg(long, value_delimiter = ',')]
    pub train_sizes: Option<Vec<usize>>,
    /// `auto`, a range `a..b` (inclusive), or a comma-separated list.
    #[arg(long)]
    pub ks: Option<String>,
    #[arg(long)]
    pub holdout: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmName>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub flat_dim: Option<usize>,
    /// Warm-start each k from the k - 1 solution.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub nested: Option<bool>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Also write plot-ready .dat files.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub curves: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RatesArgs {
    #[arg(long, value_enum)]
    pub manifold: Option<ManifoldName>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub ambient: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub train_sizes: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleName>,
    #[arg(long)]
    pub holdout: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SelectKArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ball: Option<BallName>,
    /// A range `a..b` (inclusive) or a comma-separated list.
    #[arg(long)]
    pub ks: Option<String>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmName>,
    #[arg(long)]
    pub flat_dim: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OracleCheckArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ball: Option<BallName>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Also compare k-flats of this dimension.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

//! Experiment runner: hold-out risk, tradeoff curves, model selection, the
//! two-sample high-dimensional example, and convergence-rate fits.
//!
//! Seed layout for a grid experiment with base seed `s`:
//! - hold-out set: `s.derive([HOLDOUT_STREAM])`;
//! - training set for `(n, repeat)`: `s.derive([n, repeat])`, shared by every `k`;
//! - fit for `(n, k, repeat)`: `s.derive([n, k, repeat])`.
//!
//! Sharing the training set across `k` makes each curve a function of `k`
//! alone, so differences between neighbouring `k` are not swamped by
//! resampling noise.

mod example1;
mod output;
mod rates;
mod select;
mod tradeoff;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Dataset, ManifoldSpec};
use crate::kflats::{self, FlatsModel};
use crate::kmeans::{self, FitConfig, MeansModel};
use crate::model::{reconstruction_error, Approximant};
use crate::rng::RngSeed;

pub use example1::{example1, Example1, EXAMPLE1_HOLDOUT, EXAMPLE1_SPHERE_DIM};
pub use output::{write_curve_files, write_report_csv, write_report_json, CSV_HEADER};
pub use rates::{fit_loglog, rate_experiment, RateFit, RateReport, Schedule};
pub use select::{argmin_k, select_k, select_k_with_validation, Selection};
pub use tradeoff::{
    mean_curve, tradeoff_experiment, tradeoff_experiment_with, CellResult, ExperimentReport,
};

/// Stream tag for hold-out sampling.
pub const HOLDOUT_STREAM: u64 = 0x0068_6f6c_646f_7574;
/// Default hold-out size.
pub const DEFAULT_HOLDOUT: usize = 100_000;
/// Absolute slack on per-iteration objective increases.
pub const DESCENT_SLACK: f64 = 1e-12;

/// Which estimator an experiment fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    /// Lloyd iterations from k-means++ seeds.
    #[serde(rename = "kmeans")]
    KMeans,
    /// k-means++ seeds without Lloyd refinement.
    #[serde(rename = "kmeans_pp_seeding")]
    KMeansPpSeeding,
    /// Lloyd-type k-flats.
    #[serde(rename = "kflats")]
    KFlats,
}

/// Model sizes to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KGrid {
    Values(Vec<usize>),
    /// `max(1, round(k_n))` from the theoretical schedule for the algorithm.
    Auto,
}

/// A grid experiment over training sizes and model sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub manifold: ManifoldSpec,
    pub train_sizes: Vec<usize>,
    pub k_grid: KGrid,
    #[serde(default = "default_holdout")]
    pub holdout_size: usize,
    pub algorithm: Algorithm,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: RngSeed,
    #[serde(default)]
    pub fit: FitConfig,
    /// Flat dimension for k-flats; defaults to the manifold's intrinsic dimension.
    #[serde(default)]
    pub flat_dim: Option<usize>,
    /// Also start each `k` from the `k − 1` solution plus its worst-fit point.
    #[serde(default)]
    pub nested_warm_start: bool,
    /// Confidence level used for the reported bounds.
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_holdout() -> usize {
    DEFAULT_HOLDOUT
}

fn default_repeats() -> usize {
    5
}

fn default_delta() -> f64 {
    0.05
}

impl ExperimentSpec {
    pub fn new(
        manifold: ManifoldSpec,
        train_sizes: Vec<usize>,
        k_grid: KGrid,
        algorithm: Algorithm,
    ) -> Self {
        Self {
            manifold,
            train_sizes,
            k_grid,
            holdout_size: DEFAULT_HOLDOUT,
            algorithm,
            repeats: default_repeats(),
            base_seed: RngSeed::default(),
            fit: FitConfig::default(),
            flat_dim: None,
            nested_warm_start: false,
            delta: default_delta(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.manifold.validate()?;
        self.fit.validate()?;
        if self.train_sizes.is_empty() || self.train_sizes.contains(&0) {
            return Err(Error::param("train_sizes must be non-empty and positive"));
        }
        if let KGrid::Values(ks) = &self.k_grid {
            if ks.is_empty() || ks.contains(&0) {
                return Err(Error::param("k_grid must be non-empty and positive"));
            }
        }
        if self.holdout_size < 1000 {
            return Err(Error::param("holdout_size must be at least 1000"));
        }
        if self.repeats == 0 {
            return Err(Error::param("repeats must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("delta must lie in (0, 1)"));
        }
        if self
            .flat_dim
            .is_some_and(|d| d > self.manifold.ambient_dim())
        {
            return Err(Error::param("flat_dim exceeds the ambient dimension"));
        }
        Ok(())
    }

    pub fn flat_dim(&self) -> usize {
        self.flat_dim
            .unwrap_or_else(|| self.manifold.intrinsic_dim())
    }

    /// Model sizes evaluated at training size `n`.
    pub fn ks_for(&self, n: usize) -> Vec<usize> {
        match &self.k_grid {
            KGrid::Values(ks) => ks.iter().copied().filter(|&k| k <= n).collect(),
            KGrid::Auto => {
                let schedule = match self.algorithm {
                    Algorithm::KFlats => Schedule::KFlats,
                    _ => Schedule::KMeans,
                };
                vec![schedule.k_for(&self.manifold, n).min(n)]
            }
        }
    }
}

/// Where training and hold-out points come from.
pub trait DataSource: Sync {
    fn ambient_dim(&self) -> usize;
    fn train(&self, n: usize, seed: RngSeed) -> Result<Dataset<f64>>;
    fn holdout(&self, size: usize, seed: RngSeed) -> Result<Dataset<f64>>;
}

impl DataSource for ManifoldSpec {
    fn ambient_dim(&self) -> usize {
        ManifoldSpec::ambient_dim(self)
    }

    fn train(&self, n: usize, seed: RngSeed) -> Result<Dataset<f64>> {
        self.sample(n, seed)
    }

    fn holdout(&self, size: usize, seed: RngSeed) -> Result<Dataset<f64>> {
        self.sample(size, seed)
    }
}

/// A finite pool (e.g. MNIST images) split once into a training reservoir and
/// a hold-out part; training sets are random subsets of the reservoir.
#[derive(Debug, Clone)]
pub struct PoolSource {
    train: Dataset<f64>,
    holdout: Dataset<f64>,
}

impl PoolSource {
    /// Puts the last `holdout_fraction` of the rows aside for evaluation.
    pub fn new(pool: &Dataset<f64>, holdout_fraction: f64) -> Result<Self> {
        let (train, holdout) = pool.split_tail(holdout_fraction)?;
        Ok(Self { train, holdout })
    }
}

impl DataSource for PoolSource {
    fn ambient_dim(&self) -> usize {
        self.train.ambient_dim()
    }

    fn train(&self, n: usize, seed: RngSeed) -> Result<Dataset<f64>> {
        use rand::seq::index::sample;
        if n > self.train.len() {
            return Err(Error::param(format!(
                "requested {n} training points from a reservoir of {}",
                self.train.len()
            )));
        }
        let idx = sample(&mut seed.rng(), self.train.len(), n).into_vec();
        self.train.select(&idx)
    }

    fn holdout(&self, size: usize, _seed: RngSeed) -> Result<Dataset<f64>> {
        if size >= self.holdout.len() {
            return Ok(self.holdout.clone());
        }
        let idx: Vec<usize> = (0..size).collect();
        self.holdout.select(&idx)
    }
}

/// A fitted model of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedModel {
    Means(MeansModel<f64>),
    Flats(FlatsModel<f64>),
}

impl FittedModel {
    pub fn objective(&self) -> f64 {
        match self {
            FittedModel::Means(m) => m.objective(),
            FittedModel::Flats(m) => m.objective(),
        }
    }
}

impl Approximant<f64> for FittedModel {
    fn ambient_dim(&self) -> usize {
        match self {
            FittedModel::Means(m) => m.ambient_dim(),
            FittedModel::Flats(m) => m.ambient_dim(),
        }
    }

    fn distance_sq(&self, x: &[f64]) -> f64 {
        match self {
            FittedModel::Means(m) => m.distance_sq(x),
            FittedModel::Flats(m) => m.distance_sq(x),
        }
    }
}

/// A fit with its wall time and every run's objective trace.
#[derive(Debug, Clone)]
pub struct FitRecord {
    pub model: FittedModel,
    pub traces: Vec<Vec<f64>>,
    pub seconds: f64,
}

impl FitRecord {
    /// Number of iterations, over all runs, where the objective rose by more
    /// than [`DESCENT_SLACK`].
    pub fn descent_violations(&self) -> usize {
        count_descent_violations(&self.traces)
    }
}

pub fn count_descent_violations(traces: &[Vec<f64>]) -> usize {
    traces
        .iter()
        .map(|t| t.windows(2).filter(|w| w[1] > w[0] + DESCENT_SLACK).count())
        .sum()
}

/// Fits one model of the requested family.
pub fn fit_model(
    algorithm: Algorithm,
    data: &Dataset<f64>,
    k: usize,
    flat_dim: usize,
    cfg: &FitConfig,
    seed: RngSeed,
    warm: Option<&FittedModel>,
) -> Result<FitRecord> {
    let start = Instant::now();
    let (model, traces) = match algorithm {
        Algorithm::KMeans => {
            let outcome = match warm {
                Some(FittedModel::Means(prev)) => kmeans::fit_nested(data, k, cfg, seed, prev)?,
                _ => kmeans::fit_traced(data, k, cfg, seed)?,
            };
            (FittedModel::Means(outcome.model), outcome.traces)
        }
        Algorithm::KMeansPpSeeding => {
            let mut best: Option<MeansModel<f64>> = None;
            for r in 0..cfg.restarts {
                let seeding = kmeans::seed_kmeanspp(data, k, seed.derive(&[r as u64]))?;
                let m = MeansModel::from_centers(seeding.centers, data.ambient_dim(), data)?;
                if best.as_ref().is_none_or(|b| m.objective() < b.objective()) {
                    best = Some(m);
                }
            }
            let model = best.ok_or_else(|| Error::Compute("no restarts ran".into()))?;
            (FittedModel::Means(model), Vec::new())
        }
        Algorithm::KFlats => {
            let outcome = kflats::fit_traced(data, k, flat_dim, cfg, seed)?;
            (FittedModel::Flats(outcome.model), outcome.traces)
        }
    };
    Ok(FitRecord {
        model,
        traces,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Monte-Carlo estimate of the expected reconstruction error: mean squared
/// distance from the hold-out rows to the model.
pub fn holdout_error<A: Approximant<f64> + ?Sized>(
    model: &A,
    holdout: &Dataset<f64>,
) -> Result<f64> {
    reconstruction_error(holdout, model)
}

pub(crate) fn train_seed(base: RngSeed, n: usize, repeat: usize) -> RngSeed {
    base.derive(&[n as u64, repeat as u64])
}

pub(crate) fn fit_seed(base: RngSeed, n: usize, k: usize, repeat: usize) -> RngSeed {
    base.derive(&[n as u64, k as u64, repeat as u64])
}

pub(crate) fn holdout_seed(base: RngSeed) -> RngSeed {
    base.derive(&[HOLDOUT_STREAM])
}

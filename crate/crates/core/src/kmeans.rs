//! k-means: Lloyd iterations from k-means++ seeds, best of several restarts.
//!
//! Conventions:
//! - assignment ties go to the lowest center index;
//! - a cell left empty after the mean update is reseeded at the training point
//!   farthest from its (updated) center, which never increases the objective;
//! - a run stops at a fixed point of the assignment, when the relative objective
//!   decrease drops below `rel_tol`, or after `max_iters` assignment passes;
//! - restarts use seeds derived from the caller's seed and run concurrently;
//!   the smallest objective wins, ties to the lowest restart index.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Dataset;
use crate::model::{reconstruction_error, Approximant};
use crate::rng::RngSeed;
use crate::scalar::{compensated_mean, compensated_sum, squared_distance, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyCellPolicy {
    /// Move the empty center onto the worst-represented training point.
    #[default]
    ReseedFarthest,
}

/// Shared Lloyd configuration for k-means and k-flats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub restarts: usize,
    pub empty_cell_policy: EmptyCellPolicy,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            rel_tol: 1e-10,
            restarts: 20,
            empty_cell_policy: EmptyCellPolicy::ReseedFarthest,
        }
    }
}

impl FitConfig {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if self.rel_tol.is_nan() || self.rel_tol < 0.0 {
            return Err(Error::param("rel_tol must be non-negative"));
        }
        if self.restarts == 0 {
            return Err(Error::param("restarts must be at least 1"));
        }
        Ok(())
    }
}

/// A set of `k` centers in `R^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeansModel<T> {
    centers: Vec<T>,
    k: usize,
    dim: usize,
    objective: T,
    iterations: usize,
    seed: RngSeed,
}

impl<T: Real> MeansModel<T> {
    /// Wraps given centers (row-major) and records their objective on `data`.
    pub fn from_centers(centers: Vec<T>, dim: usize, data: &Dataset<T>) -> Result<Self> {
        if dim == 0 || centers.is_empty() || !centers.len().is_multiple_of(dim) {
            return Err(Error::param("centers must be a non-empty k x D buffer"));
        }
        if centers.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("centers must be finite"));
        }
        let mut model = Self {
            k: centers.len() / dim,
            centers,
            dim,
            objective: T::zero(),
            iterations: 0,
            seed: RngSeed::default(),
        };
        model.objective = reconstruction_error(data, &model)?;
        Ok(model)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn center(&self, j: usize) -> &[T] {
        &self.centers[j * self.dim..(j + 1) * self.dim]
    }

    /// Empirical reconstruction error on the training set.
    pub fn objective(&self) -> T {
        self.objective
    }

    /// Number of assignment passes of the winning run.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn seed(&self) -> RngSeed {
        self.seed
    }

    /// Index of the nearest center and the squared distance to it.
    #[inline]
    pub fn nearest(&self, x: &[T]) -> (usize, T) {
        nearest_center(&self.centers, self.dim, x)
    }

    pub fn to_json(&self) -> MeansModelJson<T> {
        MeansModelJson {
            k: self.k,
            ambient_dim: self.dim,
            centers: self.centers.chunks(self.dim).map(<[T]>::to_vec).collect(),
            objective: self.objective,
            iterations: self.iterations,
            seed: self.seed,
        }
    }

    pub fn from_json(json: MeansModelJson<T>) -> Result<Self> {
        if json.centers.len() != json.k || json.centers.iter().any(|c| c.len() != json.ambient_dim)
        {
            return Err(Error::param("center array does not match k x ambient_dim"));
        }
        if json.k == 0 || json.ambient_dim == 0 {
            return Err(Error::param("k and ambient_dim must be at least 1"));
        }
        Ok(Self {
            centers: json.centers.concat(),
            k: json.k,
            dim: json.ambient_dim,
            objective: json.objective,
            iterations: json.iterations,
            seed: json.seed,
        })
    }
}

impl<T: Real> Approximant<T> for MeansModel<T> {
    fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn distance_sq(&self, x: &[T]) -> T {
        self.nearest(x).1
    }
}

/// JSON form of a [`MeansModel`]; `centers` is one array per center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MeansModelJson<T> {
    pub k: usize,
    pub ambient_dim: usize,
    pub centers: Vec<Vec<T>>,
    pub objective: T,
    pub iterations: usize,
    pub seed: RngSeed,
}

impl<T: Real> Serialize for MeansModel<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for MeansModel<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = MeansModelJson::<T>::deserialize(d)?;
        Self::from_json(json).map_err(serde::de::Error::custom)
    }
}

#[inline]
pub(crate) fn nearest_center<T: Real>(centers: &[T], dim: usize, x: &[T]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (j, c) in centers.chunks_exact(dim).enumerate() {
        let d = squared_distance(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// `(1/n) Σ min_j ‖x_i − m_j‖²`.
pub fn empirical_error<T: Real>(data: &Dataset<T>, model: &MeansModel<T>) -> Result<T> {
    reconstruction_error(data, model)
}

/// Centers chosen by k-means++ together with the rows they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Seeding<T> {
    pub centers: Vec<T>,
    pub indices: Vec<usize>,
}

/// k-means++ seeding: the first center is a uniform row, each further center a
/// row drawn with probability proportional to its squared distance to the
/// nearest chosen center. If every remaining row coincides with a chosen center,
/// the next one is drawn uniformly among rows not yet chosen.
pub fn seed_kmeanspp<T: Real>(data: &Dataset<T>, k: usize, seed: RngSeed) -> Result<Seeding<T>> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::param(format!(
            "k must satisfy 1 <= k <= n (k={k}, n={n})"
        )));
    }
    let mut rng = seed.rng();
    seed_with_rng(data, k, &mut rng)
}

pub(crate) fn seed_with_rng<T: Real, R: Rng>(
    data: &Dataset<T>,
    k: usize,
    rng: &mut R,
) -> Result<Seeding<T>> {
    let n = data.len();
    let dim = data.ambient_dim();
    let mut indices = Vec::with_capacity(k);
    let mut centers = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    indices.push(first);
    centers.extend_from_slice(data.row(first));
    let mut dist: Vec<f64> = data
        .rows()
        .map(|x| squared_distance(x, data.row(first)).as_f64())
        .collect();

    while indices.len() < k {
        let total = compensated_sum(dist.iter().copied());
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            let mut last_positive = 0;
            for (i, &w) in dist.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    last_positive = i;
                    if acc > target {
                        chosen = Some(i);
                        break;
                    }
                }
            }
            chosen.unwrap_or(last_positive)
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !indices.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        indices.push(pick);
        let c = data.row(pick);
        centers.extend_from_slice(c);
        for (d, x) in dist.iter_mut().zip(data.rows()) {
            *d = d.min(squared_distance(x, c).as_f64());
        }
    }
    Ok(Seeding { centers, indices })
}

/// One Lloyd run.
#[derive(Debug, Clone)]
pub struct LloydRun<T> {
    pub centers: Vec<T>,
    pub assignment: Vec<usize>,
    pub objective: T,
    /// Objective after every assignment pass, in order.
    pub trace: Vec<T>,
}

/// Result of [`fit_traced`]: the winning model plus every restart's trace.
#[derive(Debug, Clone)]
pub struct FitOutcome<T> {
    pub model: MeansModel<T>,
    pub traces: Vec<Vec<T>>,
}

/// Assigns each row to its nearest center; returns whether any label changed.
fn assign<T: Real>(
    data: &Dataset<T>,
    centers: &[T],
    labels: &mut [usize],
    dists: &mut [T],
) -> bool {
    let dim = data.ambient_dim();
    let mut changed = false;
    for ((x, label), dist) in data.rows().zip(labels.iter_mut()).zip(dists.iter_mut()) {
        let (j, d) = nearest_center(centers, dim, x);
        if *label != j {
            *label = j;
            changed = true;
        }
        *dist = d;
    }
    changed
}

/// Moves each center to its cell mean, then reseeds empty cells.
fn update<T: Real>(data: &Dataset<T>, centers: &mut [T], labels: &[usize], dists: &mut [T]) {
    let dim = data.ambient_dim();
    let k = centers.len() / dim;
    let mut sums = vec![T::zero(); k * dim];
    let mut counts = vec![0usize; k];
    for (x, &j) in data.rows().zip(labels.iter()) {
        counts[j] += 1;
        for (s, &v) in sums[j * dim..(j + 1) * dim].iter_mut().zip(x) {
            *s = *s + v;
        }
    }
    for j in 0..k {
        if counts[j] > 0 {
            let inv = T::one() / T::lit(counts[j] as f64);
            for (c, &s) in centers[j * dim..(j + 1) * dim]
                .iter_mut()
                .zip(&sums[j * dim..(j + 1) * dim])
            {
                *c = s * inv;
            }
        }
    }
    if counts.iter().all(|&c| c > 0) {
        return;
    }
    for (i, x) in data.rows().enumerate() {
        let j = labels[i];
        dists[i] = squared_distance(x, &centers[j * dim..(j + 1) * dim]);
    }
    for j in (0..k).filter(|&j| counts[j] == 0) {
        let mut worst = 0;
        for i in 1..dists.len() {
            if dists[i] > dists[worst] {
                worst = i;
            }
        }
        centers[j * dim..(j + 1) * dim].copy_from_slice(data.row(worst));
        dists[worst] = T::zero();
    }
}

/// Runs Lloyd's algorithm from the given centers.
pub fn lloyd<T: Real>(data: &Dataset<T>, init: Vec<T>, cfg: &FitConfig) -> Result<LloydRun<T>> {
    cfg.validate()?;
    let dim = data.ambient_dim();
    if init.is_empty() || !init.len().is_multiple_of(dim) {
        return Err(Error::param(
            "initial centers must be a non-empty k x D buffer",
        ));
    }
    let n = data.len();
    let mut centers = init;
    let mut labels = vec![usize::MAX; n];
    let mut dists = vec![T::zero(); n];
    let mut trace = Vec::new();
    let rel_tol = T::lit(cfg.rel_tol);
    loop {
        let changed = assign(data, &centers, &mut labels, &mut dists);
        let objective = compensated_mean(dists.iter().copied());
        let stalled = trace
            .last()
            .is_some_and(|&prev: &T| prev - objective <= rel_tol * prev);
        trace.push(objective);
        if !changed || stalled || trace.len() >= cfg.max_iters || objective == T::zero() {
            return Ok(LloydRun {
                centers,
                assignment: labels,
                objective,
                trace,
            });
        }
        update(data, &mut centers, &labels, &mut dists);
    }
}

fn best_run<T: Real>(runs: Vec<Result<LloydRun<T>>>) -> Result<(LloydRun<T>, Vec<Vec<T>>)> {
    let runs: Vec<LloydRun<T>> = runs.into_iter().collect::<Result<_>>()?;
    let traces = runs.iter().map(|r| r.trace.clone()).collect();
    let best = runs
        .into_iter()
        .reduce(|best, r| {
            if r.objective < best.objective {
                r
            } else {
                best
            }
        })
        .ok_or_else(|| Error::Compute("no restarts ran".into()))?;
    Ok((best, traces))
}

fn check_k(data: &Dataset<impl Real>, k: usize) -> Result<()> {
    if k == 0 || k > data.len() {
        return Err(Error::param(format!(
            "k must satisfy 1 <= k <= n (k={k}, n={})",
            data.len()
        )));
    }
    Ok(())
}

/// Best of `cfg.restarts` seeded Lloyd runs, with every run's objective trace.
pub fn fit_traced<T: Real>(
    data: &Dataset<T>,
    k: usize,
    cfg: &FitConfig,
    seed: RngSeed,
) -> Result<FitOutcome<T>> {
    fit_inner(data, k, cfg, seed, None)
}

/// Best of `cfg.restarts` seeded Lloyd runs.
pub fn fit<T: Real>(
    data: &Dataset<T>,
    k: usize,
    cfg: &FitConfig,
    seed: RngSeed,
) -> Result<MeansModel<T>> {
    fit_traced(data, k, cfg, seed).map(|o| o.model)
}

/// Like [`fit_traced`], with one extra candidate started from `previous`'s
/// centers plus the training point farthest from them. When `previous` has
/// `k − 1` centers, the result's objective is at most `previous`'s on `data`.
pub fn fit_nested<T: Real>(
    data: &Dataset<T>,
    k: usize,
    cfg: &FitConfig,
    seed: RngSeed,
    previous: &MeansModel<T>,
) -> Result<FitOutcome<T>> {
    fit_inner(data, k, cfg, seed, Some(previous))
}

fn fit_inner<T: Real>(
    data: &Dataset<T>,
    k: usize,
    cfg: &FitConfig,
    seed: RngSeed,
    previous: Option<&MeansModel<T>>,
) -> Result<FitOutcome<T>> {
    cfg.validate()?;
    check_k(data, k)?;
    let mut runs: Vec<Result<LloydRun<T>>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let init = seed_kmeanspp(data, k, seed.derive(&[r as u64]))?;
            lloyd(data, init.centers, cfg)
        })
        .collect();
    if let Some(prev) = previous {
        if prev.dim != data.ambient_dim() {
            return Err(Error::param("warm-start model dimension mismatch"));
        }
        if prev.k + 1 == k {
            let mut worst = (0, T::neg_infinity());
            for (i, x) in data.rows().enumerate() {
                let d = prev.distance_sq(x);
                if d > worst.1 {
                    worst = (i, d);
                }
            }
            let mut init = prev.centers.clone();
            init.extend_from_slice(data.row(worst.0));
            runs.push(lloyd(data, init, cfg));
        }
    }
    let (best, traces) = best_run(runs)?;
    Ok(FitOutcome {
        model: MeansModel {
            k,
            dim: data.ambient_dim(),
            centers: best.centers,
            objective: best.objective,
            iterations: best.trace.len(),
            seed,
        },
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]]) -> Dataset<f64> {
        Dataset::from_rows_unrestricted(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    fn corners() -> Dataset<f64> {
        ds(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]])
    }

    #[test]
    fn empirical_error_examples() {
        let data = ds(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let model = MeansModel::from_centers(vec![1.0, 0.0], 2, &data).unwrap();
        assert_eq!(empirical_error(&data, &model).unwrap(), 1.0);

        let model = MeansModel::from_centers(data.points().to_vec(), 2, &data).unwrap();
        assert_eq!(empirical_error(&data, &model).unwrap(), 0.0);

        let model = MeansModel::from_centers(vec![1.0, 0.0, -1.0, 0.0], 2, &corners()).unwrap();
        assert!((empirical_error(&corners(), &model).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let data = ds(&[&[0.0, 0.0]]);
        let other = ds(&[&[0.0, 0.0, 0.0]]);
        let model = MeansModel::from_centers(vec![0.0; 3], 3, &other).unwrap();
        assert!(empirical_error(&data, &model).is_err());
    }

    #[test]
    fn kmeanspp_two_points_always_picks_both() {
        let data = ds(&[&[0.0], &[10.0]]);
        for s in 0..50 {
            let seeding = seed_kmeanspp(&data, 2, RngSeed(s)).unwrap();
            let mut idx = seeding.indices.clone();
            idx.sort();
            assert_eq!(idx, vec![0, 1]);
        }
    }

    #[test]
    fn kmeanspp_first_center_is_uniform() {
        let data = ds(&[&[0.0], &[0.25], &[0.5], &[1.0]]);
        let mut counts = [0usize; 4];
        for s in 0..4000 {
            counts[seed_kmeanspp(&data, 1, RngSeed(s)).unwrap().indices[0]] += 1;
        }
        for c in counts {
            assert!((850..1150).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn kmeanspp_handles_duplicates_and_bad_k() {
        let data = ds(&[&[0.5], &[0.5], &[0.5]]);
        let seeding = seed_kmeanspp(&data, 3, RngSeed(1)).unwrap();
        let mut idx = seeding.indices.clone();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2]);
        assert!(seed_kmeanspp(&data, 4, RngSeed(1)).is_err());
        assert!(seed_kmeanspp(&data, 0, RngSeed(1)).is_err());
    }

    #[test]
    fn fit_centroid_case() {
        let data = ds(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let model = fit(&data, 1, &FitConfig::default(), RngSeed(0)).unwrap();
        assert_eq!(model.center(0), &[1.0, 0.0]);
        assert_eq!(model.objective(), 1.0);
    }

    #[test]
    fn fit_corners_reaches_global_optimum() {
        for s in 0..5 {
            let model = fit(&corners(), 2, &FitConfig::default(), RngSeed(s)).unwrap();
            assert!((model.objective() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_cell_is_reseeded_without_ascent() {
        // Two coincident initial centers: the second cell starts empty.
        let data = ds(&[&[0.0], &[0.1], &[0.9], &[1.0]]);
        let run = lloyd(&data, vec![0.0, 0.0], &FitConfig::default()).unwrap();
        for w in run.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!((run.objective - 0.0025).abs() < 1e-12, "{:?}", run.trace);
    }

    #[test]
    fn too_many_centers_is_an_error() {
        let data = ds(&[&[0.0]]);
        assert!(fit(&data, 2, &FitConfig::default(), RngSeed(0)).is_err());
        let bad = FitConfig {
            restarts: 0,
            ..FitConfig::default()
        };
        assert!(fit(&data, 1, &bad, RngSeed(0)).is_err());
    }

    #[test]
    fn json_shape_round_trips() {
        let data = ds(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let model = fit(&data, 2, &FitConfig::default(), RngSeed(8)).unwrap();
        let value = serde_json::to_value(&model).unwrap();
        for key in [
            "k",
            "ambient_dim",
            "centers",
            "objective",
            "iterations",
            "seed",
        ] {
            assert!(value.get(key).is_some(), "{key}");
        }
        assert_eq!(value["centers"].as_array().unwrap().len(), 2);
        let back: MeansModel<f64> = serde_json::from_value(value).unwrap();
        assert_eq!(back, model);
    }
}

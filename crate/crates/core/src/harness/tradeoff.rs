//! Grid experiments: hold-out error as a function of `(n, k)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    fit_model, fit_seed, holdout_error, holdout_seed, train_seed, Algorithm, DataSource,
    ExperimentSpec, FittedModel, RateFit,
};
use crate::bounds::{self, BoundInputs, BoundReport, Family};
use crate::error::{Error, Result};
use crate::model::reconstruction_error;

/// One `(n, k, repeat)` cell of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub n: usize,
    pub k: usize,
    pub repeat: usize,
    pub empirical_error: f64,
    pub holdout_error: f64,
    pub fit_seconds: f64,
    pub descent_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub algorithm: Algorithm,
    /// Ordered by `n`, then `k`, then `repeat`, following the experiment grids.
    pub rows: Vec<CellResult>,
    pub rate_fit: Option<RateFit>,
    /// One per `(n, k)`, from the repeat-averaged errors.
    pub bound_rows: Vec<BoundReport>,
    pub descent_violations: usize,
}

impl ExperimentReport {
    pub fn cells(&self, n: usize) -> impl Iterator<Item = &CellResult> {
        self.rows.iter().filter(move |r| r.n == n)
    }
}

/// Runs the grid on the manifold named in `spec`.
pub fn tradeoff_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    tradeoff_experiment_with(spec, &spec.manifold)
}

/// Runs the grid with points drawn from `source`.
///
/// Every `(n, repeat)` pair is an independent job; within a job the `k` values
/// run in ascending order so that each can warm-start from its predecessor.
pub fn tradeoff_experiment_with(
    spec: &ExperimentSpec,
    source: &dyn DataSource,
) -> Result<ExperimentReport> {
    spec.validate()?;
    if source.ambient_dim() != spec.manifold.ambient_dim() {
        return Err(Error::param(
            "data source and manifold disagree on dimension",
        ));
    }
    let holdout = source.holdout(spec.holdout_size, holdout_seed(spec.base_seed))?;
    let jobs: Vec<(usize, usize)> = spec
        .train_sizes
        .iter()
        .flat_map(|&n| (0..spec.repeats).map(move |r| (n, r)))
        .collect();
    let results: Vec<Result<Vec<CellResult>>> = jobs
        .par_iter()
        .map(|&(n, repeat)| run_job(spec, source, &holdout, n, repeat))
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by_key(|r| {
        let ni = spec.train_sizes.iter().position(|&m| m == r.n);
        (ni, r.k, r.repeat)
    });
    let descent_violations = rows.iter().map(|r| r.descent_violations).sum();
    let bound_rows = bound_rows(spec, &rows)?;
    Ok(ExperimentReport {
        algorithm: spec.algorithm,
        rows,
        rate_fit: None,
        bound_rows,
        descent_violations,
    })
}

fn run_job(
    spec: &ExperimentSpec,
    source: &dyn DataSource,
    holdout: &crate::geometry::Dataset<f64>,
    n: usize,
    repeat: usize,
) -> Result<Vec<CellResult>> {
    let cell_err = |k: usize, e: Error| Error::Cell {
        n,
        k,
        repeat,
        source: Box::new(e),
    };
    let train = source
        .train(n, train_seed(spec.base_seed, n, repeat))
        .map_err(|e| cell_err(0, e))?;
    let mut ks = spec.ks_for(n);
    ks.sort_unstable();
    ks.dedup();
    let mut previous: Option<FittedModel> = None;
    let mut out = Vec::with_capacity(ks.len());
    for k in ks {
        let warm = if spec.nested_warm_start {
            previous.as_ref()
        } else {
            None
        };
        let record = fit_model(
            spec.algorithm,
            &train,
            k,
            spec.flat_dim(),
            &spec.fit,
            fit_seed(spec.base_seed, n, k, repeat),
            warm,
        )
        .map_err(|e| cell_err(k, e))?;
        let empirical_error =
            reconstruction_error(&train, &record.model).map_err(|e| cell_err(k, e))?;
        let holdout_error = holdout_error(&record.model, holdout).map_err(|e| cell_err(k, e))?;
        out.push(CellResult {
            n,
            k,
            repeat,
            empirical_error,
            holdout_error,
            fit_seconds: record.seconds,
            descent_violations: record.descent_violations(),
        });
        previous = Some(record.model);
    }
    Ok(out)
}

fn bound_rows(spec: &ExperimentSpec, rows: &[CellResult]) -> Result<Vec<BoundReport>> {
    let family = match spec.algorithm {
        Algorithm::KFlats => Family::KFlats,
        _ => Family::KMeans,
    };
    let d = match family {
        Family::KFlats => spec.flat_dim(),
        Family::KMeans => spec.manifold.intrinsic_dim(),
    };
    let density_norm = spec
        .manifold
        .density_norm
        .unwrap_or_else(|| bounds::holder_density_bound(d));
    let curvature = match (family, spec.manifold.curvature) {
        (_, Some(c)) => c,
        (Family::KMeans, None) => 0.0,
        // No curvature, no k-flats bound.
        (Family::KFlats, None) => return Ok(Vec::new()),
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let (n, k) = (rows[i].n, rows[i].k);
        let group: Vec<&CellResult> = rows[i..]
            .iter()
            .take_while(|r| r.n == n && r.k == k)
            .collect();
        i += group.len();
        let m = group.len() as f64;
        let empirical = group.iter().map(|r| r.empirical_error).sum::<f64>() / m;
        let holdout = group.iter().map(|r| r.holdout_error).sum::<f64>() / m;
        let inputs = BoundInputs::new(family, n, k, d, spec.delta, density_norm, curvature)?;
        out.push(bounds::decompose(family, empirical, holdout, &inputs)?);
    }
    Ok(out)
}

/// `(k, mean hold-out error over repeats)` at training size `n`, ascending in `k`.
pub fn mean_curve(report: &ExperimentReport, n: usize) -> Vec<(usize, f64)> {
    let mut curve: Vec<(usize, f64, usize)> = Vec::new();
    for r in report.cells(n) {
        match curve.iter_mut().find(|c| c.0 == r.k) {
            Some(c) => {
                c.1 += r.holdout_error;
                c.2 += 1;
            }
            None => curve.push((r.k, r.holdout_error, 1)),
        }
    }
    curve.sort_by_key(|c| c.0);
    curve
        .into_iter()
        .map(|(k, s, m)| (k, s / m as f64))
        .collect()
}

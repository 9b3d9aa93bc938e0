//! Choosing `k` by validation error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_model, fit_seed, holdout_error, Algorithm};
use crate::error::{Error, Result};
use crate::geometry::Dataset;
use crate::kmeans::FitConfig;
use crate::rng::RngSeed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub k: usize,
    /// `(k, validation error)` for every candidate, in grid order.
    pub errors: Vec<(usize, f64)>,
}

/// Smallest `k` among those with the least error.
pub fn argmin_k(errors: &[(usize, f64)]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &(k, e) in errors {
        if e.is_nan() {
            return Err(Error::Compute(format!("validation error for k={k} is NaN")));
        }
        let better = match best {
            None => true,
            Some((bk, be)) => e < be || (e == be && k < bk),
        };
        if better {
            best = Some((k, e));
        }
    }
    best.map(|b| b.0)
        .ok_or_else(|| Error::param("k grid is empty"))
}

/// Holds out the last `validation_fraction` of `data`, fits every `k` on the
/// rest, and returns the `k` with the least validation error.
pub fn select_k(
    algorithm: Algorithm,
    data: &Dataset<f64>,
    ks: &[usize],
    validation_fraction: f64,
    flat_dim: usize,
    cfg: &FitConfig,
    seed: RngSeed,
) -> Result<Selection> {
    let (train, validation) = data.split_tail(validation_fraction)?;
    select_k_with_validation(algorithm, &train, &validation, ks, flat_dim, cfg, seed)
}

/// Like [`select_k`] with an explicit validation set. The fit for `k` uses the
/// seed a grid experiment with the same base seed gives to repeat 0.
pub fn select_k_with_validation(
    algorithm: Algorithm,
    train: &Dataset<f64>,
    validation: &Dataset<f64>,
    ks: &[usize],
    flat_dim: usize,
    cfg: &FitConfig,
    seed: RngSeed,
) -> Result<Selection> {
    if ks.is_empty() {
        return Err(Error::param("k grid is empty"));
    }
    let n = train.len();
    let errors = ks
        .par_iter()
        .map(|&k| {
            let record = fit_model(
                algorithm,
                train,
                k,
                flat_dim,
                cfg,
                fit_seed(seed, n, k, 0),
                None,
            )?;
            Ok((k, holdout_error(&record.model, validation)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Selection {
        k: argmin_k(&errors)?,
        errors,
    })
}

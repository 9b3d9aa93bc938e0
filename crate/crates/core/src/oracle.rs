//! Exhaustive global optima for tiny k-means and k-flats instances.
//!
//! Every assignment of the `n` points to at most `k` non-empty groups is
//! enumerated once as a restricted-growth string (`a[0] = 0`,
//! `a[i] <= max(a[..i]) + 1`, `a[i] < k`). Each group is fit optimally (mean, or
//! `d`-truncated PCA) and the smallest total is the global minimum, since any
//! optimal model induces such a partition through its nearest-element cells.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Dataset;
use crate::kflats::refit_cell;
use crate::scalar::{squared_distance, Real};

pub const MAX_POINTS: usize = 12;
pub const MAX_GROUPS: usize = 4;
pub const MAX_FLAT_DIM: usize = 2;
/// Enumeration budget in partitions.
pub const MAX_PARTITIONS: u128 = 1_000_000;

/// A small problem that the oracle is willing to solve.
#[derive(Debug, Clone)]
pub struct TinyInstance<T> {
    data: Dataset<T>,
    k: usize,
}

impl<T: Real> TinyInstance<T> {
    pub fn new(data: Dataset<T>, k: usize) -> Result<Self> {
        let n = data.len();
        if k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        let cost = partition_count(n, k);
        if n > MAX_POINTS || k > MAX_GROUPS || cost >= MAX_PARTITIONS {
            return Err(Error::Limit {
                message: format!(
                    "oracle accepts n <= {MAX_POINTS}, k <= {MAX_GROUPS} (got n={n}, k={k})"
                ),
                cost,
            });
        }
        Ok(Self { data, k })
    }

    pub fn data(&self) -> &Dataset<T> {
        &self.data
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Number of partitions of `n` items into at most `k` non-empty groups,
/// `Σ_{j ≤ k} S(n, j)`.
pub fn partition_count(n: usize, k: usize) -> u128 {
    // Stirling numbers of the second kind, row by row.
    let k = k.min(n.max(1));
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (1..=k).rev() {
            row[j] = row[j].saturating_mul(j as u128).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row.iter().skip(1).fold(0u128, |a, &b| a.saturating_add(b))
}

/// Global optimum found by enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution<T> {
    /// Minimal empirical reconstruction error.
    pub objective: T,
    /// Group label of every point (restricted-growth form).
    pub partition: Vec<usize>,
}

/// Visits every restricted-growth string of length `n` with labels below `k`.
fn for_each_partition(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut labels = vec![0usize; n];
    // prefix_max[i] = max(labels[..=i])
    let mut prefix_max = vec![0usize; n];
    loop {
        visit(&labels);
        // Advance to the next string: bump the rightmost position that can grow.
        let mut i = n;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            let limit = (prefix_max[i - 1] + 1).min(k - 1);
            if labels[i] < limit {
                labels[i] += 1;
                prefix_max[i] = prefix_max[i - 1].max(labels[i]);
                for j in i + 1..n {
                    labels[j] = 0;
                    prefix_max[j] = prefix_max[i];
                }
                break;
            }
        }
    }
}

fn search<T: Real>(
    inst: &TinyInstance<T>,
    mut group_cost: impl FnMut(&[usize]) -> Result<T>,
) -> Result<OracleSolution<T>> {
    let data = &inst.data;
    let n = data.len();
    let mut best: Option<OracleSolution<T>> = None;
    let mut failure = None;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); inst.k];
    for_each_partition(n, inst.k, |labels| {
        if failure.is_some() {
            return;
        }
        members.iter_mut().for_each(Vec::clear);
        for (i, &g) in labels.iter().enumerate() {
            members[g].push(i);
        }
        let mut total = T::zero();
        for group in members.iter().filter(|g| !g.is_empty()) {
            match group_cost(group) {
                Ok(c) => total = total + c,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        }
        let objective = total / T::lit(n as f64);
        if best.as_ref().is_none_or(|b| objective < b.objective) {
            best = Some(OracleSolution {
                objective,
                partition: labels.to_vec(),
            });
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    best.ok_or_else(|| Error::Compute("no partitions enumerated".into()))
}

/// Global k-means optimum: best partition with each group at its mean.
pub fn global_kmeans<T: Real>(inst: &TinyInstance<T>) -> Result<OracleSolution<T>> {
    let data = &inst.data;
    let dim = data.ambient_dim();
    let mut mean = vec![T::zero(); dim];
    search(inst, |group| {
        mean.iter_mut().for_each(|m| *m = T::zero());
        for &i in group {
            for (m, &x) in mean.iter_mut().zip(data.row(i)) {
                *m = *m + x;
            }
        }
        let inv = T::one() / T::lit(group.len() as f64);
        mean.iter_mut().for_each(|m| *m = *m * inv);
        Ok(group.iter().fold(T::zero(), |acc, &i| {
            acc + squared_distance(data.row(i), &mean)
        }))
    })
}

/// Global k-flats optimum with `d`-dimensional flats.
pub fn global_kflats<T: Real>(inst: &TinyInstance<T>, d: usize) -> Result<OracleSolution<T>> {
    if d > MAX_FLAT_DIM {
        return Err(Error::Limit {
            message: format!("oracle accepts flat dimension <= {MAX_FLAT_DIM} (got {d})"),
            cost: partition_count(inst.data.len(), inst.k),
        });
    }
    let data = &inst.data;
    search(inst, |group| {
        let cell = data.select(group)?;
        let flat = refit_cell(&cell, d)?;
        Ok(cell.rows().fold(T::zero(), |acc, x| {
            acc + crate::kflats::flat_distance_sq(x, &flat).unwrap_or(T::zero())
        }))
    })
}

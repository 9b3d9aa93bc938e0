//! k-flats: Lloyd-type alternation over unions of `k` affine `d`-flats.
//!
//! Each cell is refit by `d`-truncated PCA: the flat passes through the cell
//! mean and spans the top-`d` eigenvectors of the cell covariance. Directions
//! whose eigenvalue is zero up to round-off are stored as zero columns and
//! flagged degenerate, so a flat fit to a rank-`r` cell with `r < d` is an
//! `r`-flat in disguise. Runs are seeded by k-means++ on the points followed by
//! one PCA refit of the resulting Voronoi cells. Empty cells become degenerate
//! (zero-dimensional) flats at the worst-fit training point.
//!
//! The symmetric eigen-decomposition is delegated to `nalgebra`, whose residuals
//! `‖Cv − λv‖` are at round-off level, well inside 1e-10 for unit-ball data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Dataset;
use crate::kmeans::{nearest_center, seed_kmeanspp, FitConfig};
use crate::model::{reconstruction_error, Approximant};
use crate::rng::RngSeed;
use crate::scalar::{compensated_mean, dot, squared_distance, Real};

/// An affine flat `{offset + basis · u}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Flat<T> {
    offset: Vec<T>,
    /// `ambient × dim`, column-major; degenerate columns are zero.
    basis: Vec<T>,
    degenerate: Vec<bool>,
    dim: usize,
}

impl<T: Real> Flat<T> {
    /// Builds a flat from an offset and orthonormal (or zero) basis columns.
    pub fn new(offset: Vec<T>, columns: &[Vec<T>]) -> Result<Self> {
        let ambient = offset.len();
        if ambient == 0 {
            return Err(Error::param("offset must be non-empty"));
        }
        if columns.len() > ambient || columns.iter().any(|c| c.len() != ambient) {
            return Err(Error::param("basis columns must have the offset's length"));
        }
        let degenerate = columns
            .iter()
            .map(|c| c.iter().all(|x| *x == T::zero()))
            .collect();
        let flat = Self {
            offset,
            basis: columns.concat(),
            degenerate,
            dim: columns.len(),
        };
        if flat.orthonormality_defect() > T::lit(1e-9) {
            return Err(Error::param("basis columns are not orthonormal"));
        }
        Ok(flat)
    }

    /// A `dim`-flat with every direction degenerate, i.e. the single point `x`.
    pub fn point(x: &[T], dim: usize) -> Self {
        Self {
            offset: x.to_vec(),
            basis: vec![T::zero(); x.len() * dim],
            degenerate: vec![true; dim],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn offset(&self) -> &[T] {
        &self.offset
    }

    pub fn column(&self, j: usize) -> &[T] {
        let a = self.ambient_dim();
        &self.basis[j * a..(j + 1) * a]
    }

    pub fn degenerate_mask(&self) -> &[bool] {
        &self.degenerate
    }

    /// Largest entry of `|BᵀB − I|` over the non-degenerate columns, and of
    /// `|BᵀB|` for degenerate ones.
    pub fn orthonormality_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let g = dot(self.column(i), self.column(j));
                let target = if i == j && !self.degenerate[i] {
                    T::one()
                } else {
                    T::zero()
                };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Orthogonal projector `BBᵀ` onto the flat's direction space, row-major.
    pub fn projector(&self) -> Vec<T> {
        let a = self.ambient_dim();
        let mut p = vec![T::zero(); a * a];
        for j in 0..self.dim {
            let c = self.column(j);
            for r in 0..a {
                for s in 0..a {
                    p[r * a + s] = p[r * a + s] + c[r] * c[s];
                }
            }
        }
        p
    }

    /// Replaces the basis by `B R` for a `dim × dim` matrix `R` (row-major).
    pub fn rotated(&self, r: &[T]) -> Result<Self> {
        if r.len() != self.dim * self.dim {
            return Err(Error::param("rotation must be dim x dim"));
        }
        let a = self.ambient_dim();
        let mut basis = vec![T::zero(); a * self.dim];
        for j in 0..self.dim {
            for i in 0..self.dim {
                let w = r[i * self.dim + j];
                for (dst, &src) in basis[j * a..(j + 1) * a].iter_mut().zip(self.column(i)) {
                    *dst = *dst + src * w;
                }
            }
        }
        let degenerate = basis
            .chunks(a)
            .map(|c| c.iter().all(|x| x.abs() <= T::epsilon()))
            .collect();
        Ok(Self {
            offset: self.offset.clone(),
            basis,
            degenerate,
            dim: self.dim,
        })
    }

    #[inline]
    fn distance_sq_unchecked(&self, x: &[T], scratch: &mut [T]) -> T {
        for ((s, &xi), &mi) in scratch.iter_mut().zip(x).zip(&self.offset) {
            *s = xi - mi;
        }
        let mut d = dot(scratch, scratch);
        for j in 0..self.dim {
            if !self.degenerate[j] {
                let p = dot(self.column(j), scratch);
                d = d - p * p;
            }
        }
        d.max(T::zero())
    }
}

/// `‖x − m‖² − ‖Bᵀ(x − m)‖²`, clamped at zero.
pub fn flat_distance_sq<T: Real>(x: &[T], flat: &Flat<T>) -> Result<T> {
    if x.len() != flat.ambient_dim() {
        return Err(Error::param(format!(
            "point dimension {} does not match flat dimension {}",
            x.len(),
            flat.ambient_dim()
        )));
    }
    let mut scratch = vec![T::zero(); x.len()];
    Ok(flat.distance_sq_unchecked(x, &mut scratch))
}

/// Relative eigenvalue threshold below which a principal direction is treated
/// as absent.
fn rank_threshold<T: Real>(top: T, ambient: usize) -> T {
    top.max(T::zero()) * T::epsilon() * T::lit(64.0 * ambient as f64)
}

fn refit_rows<'a, T: Real>(
    rows: impl Iterator<Item = &'a [T]> + Clone,
    ambient: usize,
    d: usize,
) -> Result<Flat<T>> {
    let count = rows.clone().count();
    if count == 0 {
        return Err(Error::param("cannot refit an empty cell"));
    }
    if d > ambient {
        return Err(Error::param(format!(
            "flat dimension {d} exceeds ambient {ambient}"
        )));
    }
    let inv = T::one() / T::lit(count as f64);
    let mut mean = vec![T::zero(); ambient];
    for x in rows.clone() {
        for (m, &v) in mean.iter_mut().zip(x) {
            *m = *m + v;
        }
    }
    mean.iter_mut().for_each(|m| *m = *m * inv);
    if d == 0 || count == 1 {
        return Ok(Flat::point(&mean, d));
    }
    let mut cov = vec![T::zero(); ambient * ambient];
    let mut centered = vec![T::zero(); ambient];
    for x in rows {
        for ((c, &v), &m) in centered.iter_mut().zip(x).zip(&mean) {
            *c = v - m;
        }
        for r in 0..ambient {
            let cr = centered[r];
            if cr == T::zero() {
                continue;
            }
            for s in r..ambient {
                cov[r * ambient + s] = cov[r * ambient + s] + cr * centered[s];
            }
        }
    }
    for r in 0..ambient {
        for s in r..ambient {
            let v = cov[r * ambient + s] * inv;
            cov[r * ambient + s] = v;
            cov[s * ambient + r] = v;
        }
    }
    let (values, vectors) = T::symmetric_eigen(&cov, ambient);
    let threshold = rank_threshold(values[0], ambient);
    let mut basis = vec![T::zero(); ambient * d];
    let mut degenerate = vec![true; d];
    for j in 0..d {
        if values[j] > threshold && values[j] > T::zero() {
            basis[j * ambient..(j + 1) * ambient]
                .copy_from_slice(&vectors[j * ambient..(j + 1) * ambient]);
            degenerate[j] = false;
        }
    }
    Ok(Flat {
        offset: mean,
        basis,
        degenerate,
        dim: d,
    })
}

/// `d`-truncated PCA of a non-empty point set.
pub fn refit_cell<T: Real>(points: &Dataset<T>, d: usize) -> Result<Flat<T>> {
    refit_rows(points.rows(), points.ambient_dim(), d)
}

/// A union of `k` affine `d`-flats.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatsModel<T> {
    flats: Vec<Flat<T>>,
    d: usize,
    ambient: usize,
    objective: T,
    iterations: usize,
    seed: RngSeed,
}

impl<T: Real> FlatsModel<T> {
    /// Wraps given flats and records their objective on `data`.
    pub fn from_flats(flats: Vec<Flat<T>>, data: &Dataset<T>) -> Result<Self> {
        let first = flats
            .first()
            .ok_or_else(|| Error::param("at least one flat is required"))?;
        let (d, ambient) = (first.dim, first.ambient_dim());
        if flats
            .iter()
            .any(|f| f.dim != d || f.ambient_dim() != ambient)
        {
            return Err(Error::param("flats must share dimension and ambient space"));
        }
        let mut model = Self {
            flats,
            d,
            ambient,
            objective: T::zero(),
            iterations: 0,
            seed: RngSeed::default(),
        };
        model.objective = reconstruction_error(data, &model)?;
        Ok(model)
    }

    pub fn k(&self) -> usize {
        self.flats.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn flats(&self) -> &[Flat<T>] {
        &self.flats
    }

    pub fn objective(&self) -> T {
        self.objective
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn seed(&self) -> RngSeed {
        self.seed
    }

    /// Index of the nearest flat (ties to the lowest index) and the squared
    /// distance to it.
    pub fn nearest(&self, x: &[T]) -> (usize, T) {
        let mut scratch = vec![T::zero(); self.ambient];
        nearest_flat(&self.flats, x, &mut scratch)
    }

    pub fn to_json(&self) -> FlatsModelJson<T> {
        FlatsModelJson {
            k: self.k(),
            d: self.d,
            ambient_dim: self.ambient,
            flats: self
                .flats
                .iter()
                .map(|f| FlatJson {
                    offset: f.offset.clone(),
                    basis: (0..f.dim).map(|j| f.column(j).to_vec()).collect(),
                    degenerate_mask: f.degenerate.clone(),
                })
                .collect(),
            objective: self.objective,
            iterations: self.iterations,
            seed: self.seed,
        }
    }

    pub fn from_json(json: FlatsModelJson<T>) -> Result<Self> {
        if json.flats.len() != json.k || json.k == 0 {
            return Err(Error::param("flat array does not match k"));
        }
        let mut flats = Vec::with_capacity(json.k);
        for f in json.flats {
            if f.offset.len() != json.ambient_dim
                || f.basis.len() != json.d
                || f.degenerate_mask.len() != json.d
            {
                return Err(Error::param("flat does not match d x ambient_dim"));
            }
            let mut flat = Flat::new(f.offset, &f.basis)?;
            flat.degenerate = f.degenerate_mask;
            flats.push(flat);
        }
        Ok(Self {
            flats,
            d: json.d,
            ambient: json.ambient_dim,
            objective: json.objective,
            iterations: json.iterations,
            seed: json.seed,
        })
    }
}

impl<T: Real> Approximant<T> for FlatsModel<T> {
    fn ambient_dim(&self) -> usize {
        self.ambient
    }

    fn distance_sq(&self, x: &[T]) -> T {
        self.nearest(x).1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FlatJson<T> {
    pub offset: Vec<T>,
    /// One array per basis column.
    pub basis: Vec<Vec<T>>,
    pub degenerate_mask: Vec<bool>,
}

/// JSON form of a [`FlatsModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FlatsModelJson<T> {
    pub k: usize,
    pub d: usize,
    pub ambient_dim: usize,
    pub flats: Vec<FlatJson<T>>,
    pub objective: T,
    pub iterations: usize,
    pub seed: RngSeed,
}

impl<T: Real> Serialize for FlatsModel<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for FlatsModel<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = FlatsModelJson::<T>::deserialize(d)?;
        Self::from_json(json).map_err(serde::de::Error::custom)
    }
}

#[inline]
fn nearest_flat<T: Real>(flats: &[Flat<T>], x: &[T], scratch: &mut [T]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (j, f) in flats.iter().enumerate() {
        let d = f.distance_sq_unchecked(x, scratch);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// One k-flats Lloyd run.
#[derive(Debug, Clone)]
pub struct FlatsRun<T> {
    pub flats: Vec<Flat<T>>,
    pub assignment: Vec<usize>,
    pub objective: T,
    pub trace: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct FlatsFitOutcome<T> {
    pub model: FlatsModel<T>,
    pub traces: Vec<Vec<T>>,
}

/// Refits every cell; empty cells become point flats at the worst-fit row.
fn refit_all<T: Real>(
    data: &Dataset<T>,
    labels: &[usize],
    k: usize,
    d: usize,
) -> Result<Vec<Flat<T>>> {
    let ambient = data.ambient_dim();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &j) in labels.iter().enumerate() {
        members[j].push(i);
    }
    let mut flats: Vec<Option<Flat<T>>> = members
        .iter()
        .map(|idx| {
            if idx.is_empty() {
                Ok(None)
            } else {
                refit_rows(idx.iter().map(|&i| data.row(i)), ambient, d).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    if flats.iter().all(Option::is_some) {
        return Ok(flats.into_iter().flatten().collect());
    }
    let mut scratch = vec![T::zero(); ambient];
    let mut dists: Vec<T> = data
        .rows()
        .zip(labels.iter())
        .map(|(x, &j)| {
            flats[j]
                .as_ref()
                .map_or(T::infinity(), |f| f.distance_sq_unchecked(x, &mut scratch))
        })
        .collect();
    for slot in flats.iter_mut().filter(|f| f.is_none()) {
        let mut worst = 0;
        for i in 1..dists.len() {
            if dists[i] > dists[worst] {
                worst = i;
            }
        }
        *slot = Some(Flat::point(data.row(worst), d));
        dists[worst] = T::zero();
    }
    Ok(flats.into_iter().flatten().collect())
}

/// Lloyd alternation for k-flats from given initial flats.
pub fn lloyd_flats<T: Real>(
    data: &Dataset<T>,
    init: Vec<Flat<T>>,
    cfg: &FitConfig,
) -> Result<FlatsRun<T>> {
    cfg.validate()?;
    let k = init.len();
    let d = init
        .first()
        .ok_or_else(|| Error::param("at least one initial flat is required"))?
        .dim;
    if init
        .iter()
        .any(|f| f.ambient_dim() != data.ambient_dim() || f.dim != d)
    {
        return Err(Error::param("initial flats do not match the data"));
    }
    let n = data.len();
    let mut flats = init;
    let mut labels = vec![usize::MAX; n];
    let mut dists = vec![T::zero(); n];
    let mut scratch = vec![T::zero(); data.ambient_dim()];
    let mut trace: Vec<T> = Vec::new();
    let rel_tol = T::lit(cfg.rel_tol);
    loop {
        let mut changed = false;
        for ((x, label), dist) in data.rows().zip(labels.iter_mut()).zip(dists.iter_mut()) {
            let (j, dd) = nearest_flat(&flats, x, &mut scratch);
            if *label != j {
                *label = j;
                changed = true;
            }
            *dist = dd;
        }
        let objective = compensated_mean(dists.iter().copied());
        let stalled = trace
            .last()
            .is_some_and(|&prev| prev - objective <= rel_tol * prev);
        trace.push(objective);
        if !changed || stalled || trace.len() >= cfg.max_iters || objective == T::zero() {
            return Ok(FlatsRun {
                flats,
                assignment: labels,
                objective,
                trace,
            });
        }
        flats = refit_all(data, &labels, k, d)?;
    }
}

/// Initial flats: k-means++ centers, their Voronoi cells, one PCA refit.
pub fn seed_flats<T: Real>(
    data: &Dataset<T>,
    k: usize,
    d: usize,
    seed: RngSeed,
) -> Result<Vec<Flat<T>>> {
    let seeding = seed_kmeanspp(data, k, seed)?;
    let dim = data.ambient_dim();
    let labels: Vec<usize> = data
        .rows()
        .map(|x| nearest_center(&seeding.centers, dim, x).0)
        .collect();
    refit_all(data, &labels, k, d)
}

pub fn fit_traced<T: Real>(
    data: &Dataset<T>,
    k: usize,
    d: usize,
    cfg: &FitConfig,
    seed: RngSeed,
) -> Result<FlatsFitOutcome<T>> {
    cfg.validate()?;
    if k == 0 || k > data.len() {
        return Err(Error::param(format!(
            "k must satisfy 1 <= k <= n (k={k}, n={})",
            data.len()
        )));
    }
    if d > data.ambient_dim() {
        return Err(Error::param(format!(
            "flat dimension {d} exceeds ambient dimension {}",
            data.ambient_dim()
        )));
    }
    let runs: Vec<FlatsRun<T>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let init = seed_flats(data, k, d, seed.derive(&[r as u64]))?;
            lloyd_flats(data, init, cfg)
        })
        .collect::<Result<_>>()?;
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
    Ok(FlatsFitOutcome {
        model: FlatsModel {
            flats: best.flats,
            d,
            ambient: data.ambient_dim(),
            objective: best.objective,
            iterations: best.trace.len(),
            seed,
        },
        traces,
    })
}

/// Best of `cfg.restarts` seeded k-flats runs.
pub fn fit<T: Real>(
    data: &Dataset<T>,
    k: usize,
    d: usize,
    cfg: &FitConfig,
    seed: RngSeed,
) -> Result<FlatsModel<T>> {
    fit_traced(data, k, d, cfg, seed).map(|o| o.model)
}

/// Largest projector discrepancy between each flat of `model` and the PCA refit
/// of its current cell on `data`, plus the largest offset discrepancy.
pub fn refit_certificate<T: Real>(model: &FlatsModel<T>, data: &Dataset<T>) -> Result<T> {
    let labels: Vec<usize> = data.rows().map(|x| model.nearest(x).0).collect();
    let refit = refit_all(data, &labels, model.k(), model.d)?;
    let mut worst = T::zero();
    for (a, b) in model.flats.iter().zip(&refit) {
        let pa = a.projector();
        let pb = b.projector();
        for (x, y) in pa.iter().zip(&pb) {
            worst = worst.max((*x - *y).abs());
        }
        worst = worst.max(squared_distance(&a.offset, &b.offset).sqrt());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_flat_disk;

    fn ds(rows: &[Vec<f64>]) -> Dataset<f64> {
        Dataset::from_rows_unrestricted(rows).unwrap()
    }

    #[test]
    fn distance_examples() {
        let plane = Flat::new(vec![0.0; 3], &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(flat_distance_sq(&[0.0, 0.0, 1.0], &plane).unwrap(), 1.0);
        assert!(flat_distance_sq(&[0.3, -0.2, 0.0], &plane).unwrap() < 1e-12);
        assert!(flat_distance_sq(&[0.0, 0.0], &plane).is_err());
    }

    #[test]
    fn collinear_cell_has_zero_residual() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = i as f64 / 10.0;
                vec![0.1 + t, 0.2 - 2.0 * t, 0.5 * t]
            })
            .collect();
        let data = ds(&rows);
        let flat = refit_cell(&data, 1).unwrap();
        for x in data.rows() {
            assert!(flat_distance_sq(x, &flat).unwrap() < 1e-12);
        }
        let plane = refit_cell(&data, 2).unwrap();
        assert_eq!(plane.degenerate_mask(), &[false, true]);
    }

    #[test]
    fn tied_eigenvalues_give_basis_invariant_residual() {
        let data = ds(&[
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ]);
        let flat = refit_cell(&data, 1).unwrap();
        assert!(flat.offset().iter().all(|x| x.abs() < 1e-15));
        let total: f64 = data
            .rows()
            .map(|x| flat_distance_sq(x, &flat).unwrap())
            .sum();
        assert!((total - 4.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn single_point_cell_is_degenerate() {
        let data = ds(&[vec![0.1, 0.2, 0.3]]);
        let flat = refit_cell(&data, 2).unwrap();
        assert_eq!(flat.offset(), &[0.1, 0.2, 0.3]);
        assert_eq!(flat.degenerate_mask(), &[true, true]);
        assert_eq!(flat_distance_sq(data.row(0), &flat).unwrap(), 0.0);
    }

    #[test]
    fn parallel_lines_are_separated() {
        let mut rows = Vec::new();
        for i in 0..50 {
            let x = -0.9 + 1.8 * i as f64 / 49.0;
            rows.push(vec![x, 0.0]);
            rows.push(vec![x, 1.0]);
        }
        let data = ds(&rows);
        let model = fit(&data, 2, 1, &FitConfig::default(), RngSeed(4)).unwrap();
        assert!(model.objective() < 1e-10, "{}", model.objective());
        let mut ys: Vec<f64> = model.flats().iter().map(|f| f.offset()[1]).collect();
        ys.sort_by(f64::total_cmp);
        assert!((ys[0]).abs() < 1e-12 && (ys[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_disk_is_exact() {
        let data = sample_flat_disk::<f64>(1, 2, 50, RngSeed(0)).unwrap();
        let model = fit(&data, 1, 1, &FitConfig::default(), RngSeed(0)).unwrap();
        assert!(model.objective() < 1e-18, "{}", model.objective());
    }

    #[test]
    fn empty_cells_are_reseeded() {
        let data = ds(&[vec![0.0, 0.0], vec![0.5, 0.0], vec![0.0, 0.9]]);
        let same = Flat::new(vec![0.0, 0.0], &[vec![1.0, 0.0]]).unwrap();
        let run = lloyd_flats(&data, vec![same.clone(), same], &FitConfig::default()).unwrap();
        for w in run.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(run.objective < 1e-12, "{:?}", run.trace);
    }

    #[test]
    fn rotation_and_errors() {
        let f = Flat::new(vec![0.0; 3], &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let (c, s): (f64, f64) = (0.6, 0.8);
        let g = f.rotated(&[c, -s, s, c]).unwrap();
        assert!(g.orthonormality_defect() < 1e-15);
        let x = [0.2f64, 0.3, 0.4];
        let a = flat_distance_sq(&x, &f).unwrap();
        let b = flat_distance_sq(&x, &g).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(Flat::new(vec![0.0; 2], &[vec![1.0, 1.0]]).is_err());
        let data = ds(&[vec![0.0, 0.0]]);
        assert!(fit(&data, 2, 1, &FitConfig::default(), RngSeed(0)).is_err());
        assert!(fit(&data, 1, 3, &FitConfig::default(), RngSeed(0)).is_err());
    }

    #[test]
    fn json_shape() {
        let data = sample_flat_disk::<f64>(2, 3, 30, RngSeed(2)).unwrap();
        let model = fit(&data, 2, 2, &FitConfig::default(), RngSeed(1)).unwrap();
        let v = serde_json::to_value(&model).unwrap();
        for key in [
            "k",
            "d",
            "ambient_dim",
            "flats",
            "objective",
            "iterations",
            "seed",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let f0 = &v["flats"][0];
        assert_eq!(f0["basis"].as_array().unwrap().len(), 2);
        assert_eq!(f0["basis"][0].as_array().unwrap().len(), 3);
        assert_eq!(f0["degenerate_mask"].as_array().unwrap().len(), 2);
        let back: FlatsModel<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, model);
    }
}

//! Point-cloud containers, manifold descriptions and samplers.

mod io;
mod mnist;
mod sample;

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::scalar::{squared_norm, Real};

pub use io::{
    decode_container, read_container, read_csv, write_container, write_csv, BallPolicy,
    CONTAINER_MAGIC,
};
pub use mnist::{load_mnist, parse_idx3, MNIST_SCALE};
pub use sample::{sample_flat_disk, sample_sphere};

/// Slack allowed on the unit-ball constraint.
pub const UNIT_BALL_SLACK: f64 = 1e-9;

/// `n ≥ 1` finite points in `R^D`, stored row-major.
///
/// [`Dataset::new`] additionally enforces the closed unit ball; samplers and
/// the MNIST reader always go through it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    points: Vec<T>,
    n: usize,
    dim: usize,
}

impl<T: Real> Dataset<T> {
    /// Checked constructor: rejects empty data, non-finite coordinates and rows
    /// outside the unit ball.
    pub fn new(points: Vec<T>, dim: usize) -> Result<Self> {
        Self::build(points, dim, Some(T::lit(1.0 + UNIT_BALL_SLACK)))
    }

    fn build(points: Vec<T>, dim: usize, norm_limit: Option<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("ambient dimension must be at least 1"));
        }
        if points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::param(format!(
                "{} coordinates do not form a non-empty set of rows of width {dim}",
                points.len()
            )));
        }
        let n = points.len() / dim;
        for (i, row) in points.chunks_exact(dim).enumerate() {
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::param(format!("row {i} contains a non-finite value")));
            }
            let norm = squared_norm(row).sqrt();
            if norm_limit.is_some_and(|limit| norm > limit) {
                return Err(Error::param(format!(
                    "row {i} has norm {norm} outside the unit ball"
                )));
            }
        }
        Ok(Self { points, n, dim })
    }

    /// Like [`Dataset::new`] but without the unit-ball check, for general
    /// Euclidean data. Fitting works on any finite data; the learning-rate
    /// bounds assume the unit ball.
    pub fn new_unrestricted(points: Vec<T>, dim: usize) -> Result<Self> {
        Self::build(points, dim, None)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = Self::row_width(rows)?;
        Self::new(rows.concat(), dim)
    }

    pub fn from_rows_unrestricted(rows: &[Vec<T>]) -> Result<Self> {
        let dim = Self::row_width(rows)?;
        Self::new_unrestricted(rows.concat(), dim)
    }

    fn row_width(rows: &[Vec<T>]) -> Result<usize> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::param("rows have differing lengths"));
        }
        Ok(dim)
    }

    /// Whether every row lies in the closed unit ball (up to the slack).
    pub fn in_unit_ball(&self) -> bool {
        let limit = T::lit(1.0 + UNIT_BALL_SLACK);
        self.rows().all(|r| squared_norm(r).sqrt() <= limit)
    }

    /// Rescales all rows by one common factor so the largest norm is at most 1.
    ///
    /// Returns the dataset and the factor applied (1 when already inside the ball).
    pub fn scaled_into_unit_ball(mut points: Vec<T>, dim: usize) -> Result<(Self, T)> {
        if dim == 0 {
            return Err(Error::param("ambient dimension must be at least 1"));
        }
        let max_norm = points
            .chunks(dim)
            .map(|r| squared_norm(r).sqrt())
            .fold(T::zero(), T::max);
        let scale = if max_norm > T::one() {
            T::one() / max_norm
        } else {
            T::one()
        };
        if scale != T::one() {
            for x in &mut points {
                *x = *x * scale;
            }
        }
        Ok((Self::new(points, dim)?, scale))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.points.chunks_exact(self.dim)
    }

    /// New dataset holding the given rows in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut points = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.n {
                return Err(Error::param(format!("row index {i} out of range")));
            }
            points.extend_from_slice(self.row(i));
        }
        Self::new_unrestricted(points, self.dim)
    }

    /// Splits off the last `ceil(fraction * n)` rows as a validation set.
    pub fn split_tail(&self, fraction: f64) -> Result<(Self, Self)> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::param("validation fraction must lie in (0, 1)"));
        }
        let tail = ((self.n as f64) * fraction).ceil() as usize;
        if tail == 0 || tail >= self.n {
            return Err(Error::param(format!(
                "cannot split {} rows with fraction {fraction}",
                self.n
            )));
        }
        let head: Vec<usize> = (0..self.n - tail).collect();
        let rest: Vec<usize> = (self.n - tail..self.n).collect();
        Ok((self.select(&head)?, self.select(&rest)?))
    }
}

/// Which manifold a sample comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldKind {
    /// Unit `d`-sphere in the first `d + 1` coordinates of `R^ambient`.
    UnitSphere { d: usize, ambient: usize },
    /// Unit circle in the first two coordinates of `R^ambient`.
    UnitCircle { ambient: usize },
    /// Unit `d`-ball in the first `d` coordinates of `R^ambient`.
    FlatDisk { d: usize, ambient: usize },
    /// Externally supplied data of known intrinsic dimension.
    Custom { d: usize, ambient: usize },
}

/// A manifold together with the scalars that enter the rate formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    /// `∫_M p^{d/(d+2)} dμ`.
    #[serde(default)]
    pub density_norm: Option<f64>,
    /// Curvature constant of the k-flats bounds.
    #[serde(default)]
    pub curvature: Option<f64>,
}

impl ManifoldSpec {
    /// Uniform distribution on the unit `d`-sphere, with its density norm and
    /// total root curvature filled in.
    pub fn sphere(d: usize, ambient: usize) -> Result<Self> {
        Self::new(ManifoldKind::UnitSphere { d, ambient })
    }

    pub fn circle(ambient: usize) -> Result<Self> {
        Self::new(ManifoldKind::UnitCircle { ambient })
    }

    pub fn flat_disk(d: usize, ambient: usize) -> Result<Self> {
        Self::new(ManifoldKind::FlatDisk { d, ambient })
    }

    /// Builds a spec with the uniform-density defaults for the built-in kinds.
    pub fn new(kind: ManifoldKind) -> Result<Self> {
        let mut spec = Self {
            kind,
            density_norm: None,
            curvature: None,
        };
        spec.validate()?;
        let d = spec.intrinsic_dim();
        let volume = match kind {
            ManifoldKind::UnitSphere { .. } | ManifoldKind::UnitCircle { .. } => {
                Some(bounds::sphere_curvature(d))
            }
            ManifoldKind::FlatDisk { .. } => Some(bounds::unit_ball_volume(d)),
            ManifoldKind::Custom { .. } => None,
        };
        // Uniform density p = 1/Vol gives ∫ p^{d/(d+2)} = Vol^{2/(d+2)}.
        spec.density_norm = volume.map(|v| v.powf(2.0 / (d as f64 + 2.0)));
        spec.curvature = match kind {
            ManifoldKind::UnitSphere { .. } | ManifoldKind::UnitCircle { .. } => {
                Some(bounds::sphere_curvature(d))
            }
            ManifoldKind::FlatDisk { .. } => Some(0.0),
            ManifoldKind::Custom { .. } => None,
        };
        Ok(spec)
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::UnitSphere { d, .. }
            | ManifoldKind::FlatDisk { d, .. }
            | ManifoldKind::Custom { d, .. } => d,
            ManifoldKind::UnitCircle { .. } => 1,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::UnitSphere { ambient, .. }
            | ManifoldKind::UnitCircle { ambient }
            | ManifoldKind::FlatDisk { ambient, .. }
            | ManifoldKind::Custom { ambient, .. } => ambient,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.intrinsic_dim();
        let ambient = self.ambient_dim();
        match self.kind {
            ManifoldKind::UnitSphere { .. } | ManifoldKind::UnitCircle { .. } => {
                if d < 1 || d + 1 > ambient {
                    return Err(Error::param(format!(
                        "sphere needs 1 <= d <= D - 1 (d={d}, D={ambient})"
                    )));
                }
            }
            ManifoldKind::FlatDisk { .. } | ManifoldKind::Custom { .. } => {
                if d < 1 || d > ambient {
                    return Err(Error::param(format!(
                        "needs 1 <= d <= D (d={d}, D={ambient})"
                    )));
                }
            }
        }
        if let Some(rho) = self.density_norm {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::param("density_norm must be positive"));
            }
        }
        if let Some(kappa) = self.curvature {
            if !(kappa >= 0.0 && kappa.is_finite()) {
                return Err(Error::param("curvature must be non-negative"));
            }
        }
        Ok(())
    }

    /// Draws `n` i.i.d. points from the uniform distribution on the manifold.
    pub fn sample<T: Real>(&self, n: usize, seed: RngSeed) -> Result<Dataset<T>> {
        match self.kind {
            ManifoldKind::UnitSphere { d, ambient } => sample_sphere(d, ambient, n, seed),
            ManifoldKind::UnitCircle { ambient } => sample_sphere(1, ambient, n, seed),
            ManifoldKind::FlatDisk { d, ambient } => sample_flat_disk(d, ambient, n, seed),
            ManifoldKind::Custom { .. } => {
                Err(Error::param("custom manifolds have no built-in sampler"))
            }
        }
    }
}

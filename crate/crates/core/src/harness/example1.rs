//! Two samples on a high-dimensional sphere: one mean beats two.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::sample_sphere;
use crate::kmeans::MeansModel;
use crate::model::reconstruction_error;
use crate::rng::RngSeed;

/// Intrinsic dimension of the sphere (ambient dimension is one more).
pub const EXAMPLE1_SPHERE_DIM: usize = 100;
/// Hold-out size for both errors.
pub const EXAMPLE1_HOLDOUT: usize = 100_000;

/// Hold-out errors of the one- and two-center optima of a two-point sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example1 {
    pub seed: RngSeed,
    /// Error of the midpoint.
    pub e_k1: f64,
    /// Error of the two samples themselves.
    pub e_k2: f64,
    /// `⟨x₁, x₂⟩`; near zero in high dimension.
    pub inner_product: f64,
}

impl Example1 {
    /// Whether the single center generalizes better.
    pub fn one_beats_two(&self) -> bool {
        self.e_k1 < self.e_k2
    }
}

/// Draws two points on `S^100 ⊂ R^101`, takes the exact `k = 1` and `k = 2`
/// minimizers of the empirical error, and evaluates both on a fresh hold-out.
pub fn example1(seed: RngSeed) -> Result<Example1> {
    let d = EXAMPLE1_SPHERE_DIM;
    let train = sample_sphere::<f64>(d, d + 1, 2, seed.derive(&[0]))?;
    let holdout = sample_sphere::<f64>(d, d + 1, EXAMPLE1_HOLDOUT, seed.derive(&[1]))?;
    let (x1, x2) = (train.row(0), train.row(1));
    let mid: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| 0.5 * (a + b)).collect();
    let one = MeansModel::from_centers(mid, d + 1, &train)?;
    let two = MeansModel::from_centers(train.points().to_vec(), d + 1, &train)?;
    Ok(Example1 {
        seed,
        e_k1: reconstruction_error(&holdout, &one)?,
        e_k2: reconstruction_error(&holdout, &two)?,
        inner_product: x1.iter().zip(x2).map(|(a, b)| a * b).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_ordered() {
        let a = example1(RngSeed(7)).unwrap();
        assert_eq!(a, example1(RngSeed(7)).unwrap());
        assert!(a.one_beats_two());
        assert!(a.inner_product.abs() < 0.5);
        // E‖x − (x₁+x₂)/2‖² = 1 + (1 + ⟨x₁,x₂⟩)/2 for zero-mean x.
        let expected = 1.5 + 0.5 * a.inner_product;
        assert!((a.e_k1 - expected).abs() < 0.01, "{a:?}");
    }
}

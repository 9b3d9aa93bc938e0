//! Scalar abstraction shared by the fitting code.
//!
//! Datasets, models and the Lloyd iterations are generic over [`Real`], which is
//! implemented for `f32` and `f64`. Tolerances quoted throughout the crate assume
//! `f64`; `f32` works but only to single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal or computed value into this scalar.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// Eigen-decomposition of a symmetric `dim × dim` matrix stored row-major.
    ///
    /// Returns eigenvalues in descending order and the matching unit
    /// eigenvectors as columns of a column-major `dim × dim` buffer.
    fn symmetric_eigen(matrix: &[Self], dim: usize) -> (Vec<Self>, Vec<Self>);
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            fn symmetric_eigen(matrix: &[Self], dim: usize) -> (Vec<Self>, Vec<Self>) {
                let m = DMatrix::<$t>::from_row_slice(dim, dim, matrix);
                let eig = SymmetricEigen::new(m);
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&a, &b| {
                    eig.eigenvalues[b]
                        .partial_cmp(&eig.eigenvalues[a])
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
                let mut vectors = Vec::with_capacity(dim * dim);
                for &i in &order {
                    vectors.extend(eig.eigenvectors.column(i).iter().copied());
                }
                (values, vectors)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Compensated mean; `NaN` for an empty iterator.
pub fn compensated_mean<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut acc = CompensatedSum::new();
    let mut count = 0usize;
    for v in values {
        acc.add(v);
        count += 1;
    }
    acc.total() / T::lit(count as f64)
}

#[inline]
pub(crate) fn squared_distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let diff = x - y;
        acc + diff * diff
    })
}

#[inline]
pub(crate) fn squared_norm<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc + x * x)
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1.0e16, 1.0, -1.0e16];
        assert_eq!(compensated_sum(values), 1.0);
    }

    #[test]
    fn eigen_is_sorted_descending_with_unit_vectors() {
        let m = [2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0];
        let (values, vectors) = f64::symmetric_eigen(&m, 3);
        assert!((values[0] - 5.0).abs() < 1e-12);
        assert!((values[1] - 3.0).abs() < 1e-12);
        assert!((values[2] - 1.0).abs() < 1e-12);
        for c in 0..3 {
            let col = &vectors[c * 3..c * 3 + 3];
            assert!((squared_norm(col) - 1.0).abs() < 1e-12);
        }
        assert!((vectors[2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f32_path_matches_f64() {
        let m32 = [4.0f32, 0.0, 0.0, 1.0];
        let (v32, _) = f32::symmetric_eigen(&m32, 2);
        assert!((v32[0] - 4.0).abs() < 1e-6);
    }
}

//! The set-distance abstraction shared by point and flat models.

use crate::error::{Error, Result};
use crate::geometry::Dataset;
use crate::scalar::{CompensatedSum, Real};

/// A closed set in `R^D` that data points are reconstructed onto.
pub trait Approximant<T: Real> {
    fn ambient_dim(&self) -> usize;

    /// Squared distance from `x` to the set.
    fn distance_sq(&self, x: &[T]) -> T;
}

/// Mean squared distance from the rows of `data` to `model`, summed with
/// compensation in row order.
///
/// On training data this is the empirical reconstruction error; on an
/// independent sample it is a Monte-Carlo estimate of the expected error.
pub fn reconstruction_error<T: Real, A: Approximant<T> + ?Sized>(
    data: &Dataset<T>,
    model: &A,
) -> Result<T> {
    if data.ambient_dim() != model.ambient_dim() {
        return Err(Error::param(format!(
            "data dimension {} does not match model dimension {}",
            data.ambient_dim(),
            model.ambient_dim()
        )));
    }
    let mut acc = CompensatedSum::new();
    for row in data.rows() {
        acc.add(model.distance_sq(row));
    }
    Ok(acc.total() / T::lit(data.len() as f64))
}

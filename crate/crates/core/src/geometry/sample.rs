//! Uniform samplers on spheres and flat disks.
//!
//! Gaussian variates come from `rand_distr::StandardNormal` (ziggurat method)
//! driven by a `ChaCha8Rng` seeded from the caller's [`RngSeed`]. A sphere point
//! is `d + 1` standard normals divided by their Euclidean norm; a disk point is
//! such a direction on `S^{d-1}` scaled by `U^{1/d}` with `U ~ Uniform[0, 1)`.
//! Coordinates are generated in `f64` and then converted to the target scalar.

use rand::Rng;
use rand_distr::StandardNormal;

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::scalar::Real;

fn unit_direction<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut sq = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            sq += *x * *x;
        }
        if sq > 0.0 {
            let inv = 1.0 / sq.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// `n` i.i.d. uniform points on the unit `d`-sphere, embedded in the first
/// `d + 1` coordinates of `R^ambient`.
pub fn sample_sphere<T: Real>(
    d: usize,
    ambient: usize,
    n: usize,
    seed: RngSeed,
) -> Result<Dataset<T>> {
    if d < 1 || d + 1 > ambient {
        return Err(Error::param(format!(
            "sphere needs 1 <= d <= D - 1 (d={d}, D={ambient})"
        )));
    }
    if n == 0 {
        return Err(Error::param("sample size must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut dir = vec![0.0; d + 1];
    let mut points = vec![T::zero(); n * ambient];
    for row in points.chunks_exact_mut(ambient) {
        unit_direction(&mut rng, &mut dir);
        for (dst, &src) in row.iter_mut().zip(&dir) {
            *dst = T::lit(src);
        }
    }
    Dataset::new(points, ambient)
}

/// `n` i.i.d. uniform points in the unit `d`-ball, embedded in the first `d`
/// coordinates of `R^ambient`.
pub fn sample_flat_disk<T: Real>(
    d: usize,
    ambient: usize,
    n: usize,
    seed: RngSeed,
) -> Result<Dataset<T>> {
    if d < 1 || d > ambient {
        return Err(Error::param(format!(
            "disk needs 1 <= d <= D (d={d}, D={ambient})"
        )));
    }
    if n == 0 {
        return Err(Error::param("sample size must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut dir = vec![0.0; d];
    let mut points = vec![T::zero(); n * ambient];
    let inv_d = 1.0 / d as f64;
    for row in points.chunks_exact_mut(ambient) {
        unit_direction(&mut rng, &mut dir);
        let radius = rng.random::<f64>().powf(inv_d);
        for (dst, &src) in row.iter_mut().zip(&dir) {
            *dst = T::lit(src * radius);
        }
    }
    Dataset::new(points, ambient)
}

//! Piecewise-constant (k-means) and piecewise-linear (k-flats) reconstruction
//! of point clouds supported on manifolds.
//!
//! The fitting code is generic over the scalar type through [`Real`]; the
//! aliases below fix it to `f64`, which is what the experiments and the
//! command-line front end use.
//!
//! ```
//! use manrec::{kmeans, sample_sphere, FitConfig, RngSeed};
//!
//! let data: manrec::Dataset = sample_sphere(2, 3, 500, RngSeed(1)).unwrap();
//! let model = kmeans::fit(&data, 8, &FitConfig::default(), RngSeed(2)).unwrap();
//! assert!(model.objective() < 0.2);
//! ```

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod kflats;
pub mod kmeans;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod scalar;

pub use error::{Error, ErrorCategory, Result};
pub use geometry::{load_mnist, sample_flat_disk, sample_sphere, ManifoldKind, ManifoldSpec};
pub use kmeans::FitConfig;
pub use model::{reconstruction_error, Approximant};
pub use rng::RngSeed;
pub use scalar::Real;

pub type Dataset = geometry::Dataset<f64>;
pub type MeansModel = kmeans::MeansModel<f64>;
pub type FlatsModel = kflats::FlatsModel<f64>;
pub type Flat = kflats::Flat<f64>;
pub type TinyInstance = oracle::TinyInstance<f64>;

pub type Dataset32 = geometry::Dataset<f32>;
pub type MeansModel32 = kmeans::MeansModel<f32>;
pub type FlatsModel32 = kflats::FlatsModel<f32>;

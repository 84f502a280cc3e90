//! FSketch: compression of high-dimensional sparse categorical vectors
//! into short mod-p integer sketches that preserve pairwise Hamming
//! distances.
//!
//! A sketch packs an n-dimensional vector over {0..c} into d cells over
//! {0..p-1}: cell j is the mod-p sum of value * multiplier over the
//! attributes randomly mapped to j. Sketches support exact in-place
//! updates under attribute changes, and the Hamming distance between
//! two sketches inverts through a closed form into an estimate of the
//! original distance.
//!
//! ```
//! use fsketch::{
//!     estimator::{estimate_pair, EstimatorConfig},
//!     params::{next_prime, SketchParams},
//!     sketch::create_sketch,
//!     vector::{CategoricalVector, Sparsity},
//! };
//!
//! let x = CategoricalVector::new(1000, vec![(3, 7), (512, 2)]).unwrap();
//! let y = CategoricalVector::new(1000, vec![(3, 7), (801, 4)]).unwrap();
//!
//! let p = next_prime(7);
//! let params = SketchParams::new(1000, 8, p, 42).unwrap();
//! let (sx, sy) = (
//!     create_sketch(&x, &params).unwrap(),
//!     create_sketch(&y, &params).unwrap(),
//! );
//!
//! let cfg = EstimatorConfig::new(8, p, Sparsity(2)).unwrap();
//! let est = estimate_pair(&sx, &sy, &cfg).unwrap();
//! assert!(est.h_hat >= 0.0 && est.h_hat <= 4.0);
//! ```
//!
//! Batch operations run in parallel via rayon under the default
//! `parallel` feature; disabling it gives a fully sequential build.

pub mod baselines;
pub mod data;
pub mod error;
pub mod estimator;
pub mod eval;
pub mod median;
pub mod params;
pub mod persist;
pub mod rng;
pub mod sketch;
pub mod synth;
pub mod vector;

pub use error::{Error, Result};
pub use estimator::{DistanceEstimate, EstimatorConfig};
pub use params::{next_prime, SketchParams};
pub use sketch::{create_sketch, update_sketch, FSketchVector};
pub use vector::{CategoricalVector, Sparsity};

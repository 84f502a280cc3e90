//! Hamming distance estimation from sketches.
//!
//! With D = 1 - 1/d and P = 1 - 1/p, the expected number of disagreeing
//! cells between sketches of vectors at distance h is f* = dP(1 - D^h).
//! Inverting that closed form on an observed count f gives the estimate,
//! clamped to 2*sigma when f >= dP.

use crate::error::{Error, Result};
use crate::sketch::FSketchVector;
use crate::vector::Sparsity;

/// Fixed estimation context for one sketch configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    d: usize,
    p: u64,
    sigma: usize,
}

impl EstimatorConfig {
    pub fn new(d: usize, p: u64, sigma: Sparsity) -> Result<Self> {
        if d <= 1 {
            return Err(Error::InvalidParameter(
                "estimator requires d >= 2 (ln(1 - 1/d) vanishes at d = 1)".into(),
            ));
        }
        if !crate::params::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { d, p, sigma: sigma.0 })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// D = 1 - 1/d.
    pub fn cell_retention(&self) -> f64 {
        1.0 - 1.0 / self.d as f64
    }

    /// P = 1 - 1/p.
    pub fn modulus_retention(&self) -> f64 {
        1.0 - 1.0 / self.p as f64
    }
}

/// Estimate of an original-space Hamming distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEstimate {
    /// Estimated distance, in [0, 2*sigma].
    pub h_hat: f64,
    /// Observed sketch Hamming distance it was derived from.
    pub f: usize,
    /// True when f >= dP forced the 2*sigma fallback.
    pub clamped: bool,
}

/// Number of cells where the two sketches disagree.
pub fn sketch_hamming(a: &FSketchVector, b: &FSketchVector) -> Result<usize> {
    if a.d() != b.d() || a.p() != b.p() {
        return Err(Error::SketchMismatch {
            d_left: a.d(),
            d_right: b.d(),
            p_left: a.p(),
            p_right: b.p(),
        });
    }
    Ok(a.cells()
        .iter()
        .zip(b.cells())
        .filter(|(x, y)| x != y)
        .count())
}

/// Probability that one fixed cell disagrees between the sketches of
/// two vectors at Hamming distance h: (1 - 1/p)(1 - (1 - 1/d)^h).
pub fn collision_probability(h: usize, cfg: &EstimatorConfig) -> f64 {
    cfg.modulus_retention() * (1.0 - cfg.cell_retention().powi(h as i32))
}

/// Expected sketch Hamming distance f* = d * collision_probability(h).
pub fn expected_collisions(h: usize, cfg: &EstimatorConfig) -> f64 {
    cfg.d as f64 * collision_probability(h, cfg)
}

/// Invert the expectation on an observed f. Real-valued; callers may
/// round. The unclamped branch is additionally capped at 2*sigma since
/// no true distance can exceed it.
pub fn estimate_hamming(f: usize, cfg: &EstimatorConfig) -> Result<DistanceEstimate> {
    if f > cfg.d {
        return Err(Error::InvalidParameter(format!(
            "observed sketch distance {f} exceeds d = {}",
            cfg.d
        )));
    }
    let dp = cfg.d as f64 * cfg.modulus_retention();
    let cap = 2.0 * cfg.sigma as f64;
    if (f as f64) >= dp {
        return Ok(DistanceEstimate {
            h_hat: cap,
            f,
            clamped: true,
        });
    }
    let raw = (1.0 - f as f64 / dp).ln() / cfg.cell_retention().ln();
    Ok(DistanceEstimate {
        h_hat: raw.min(cap),
        f,
        clamped: false,
    })
}

/// Estimate the distance between the source vectors of two sketches.
pub fn estimate_pair(
    a: &FSketchVector,
    b: &FSketchVector,
    cfg: &EstimatorConfig,
) -> Result<DistanceEstimate> {
    estimate_hamming(sketch_hamming(a, b)?, cfg)
}

//! Median aggregation over k independent sketch rows.
//!
//! Each row has its own independently seeded params (same d and p); a
//! point's median sketch is its k row sketches. The pairwise estimate is
//! the median of the k per-row estimates, which concentrates much better
//! than a single row. Min and mean are kept as labeled alternatives for
//! variance comparisons.

use crate::error::{Error, Result};
use crate::estimator::{estimate_pair, DistanceEstimate, EstimatorConfig};
use crate::params::SketchParams;
use crate::sketch::{create_sketch, FSketchVector};
use crate::vector::CategoricalVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    Median,
    Mean,
    Min,
}

/// The k per-row params, shared by every point of a dataset.
#[derive(Debug, Clone)]
pub struct MedianParams {
    rows: Vec<SketchParams>,
}

impl MedianParams {
    /// k rows with independently derived seeds.
    pub fn new(k: usize, n: usize, d: usize, p: u64, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("arity k must be positive".into()));
        }
        let rows = (0..k)
            .map(|i| SketchParams::new(n, d, p, crate::rng::splitmix64(seed ^ (i as u64 + 1))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SketchParams] {
        &self.rows
    }

    pub fn sketch(&self, x: &CategoricalVector) -> Result<MedianSketch> {
        let rows = self
            .rows
            .iter()
            .map(|params| create_sketch(x, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(MedianSketch { rows })
    }
}

/// The k row sketches of one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianSketch {
    rows: Vec<FSketchVector>,
}

impl MedianSketch {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[FSketchVector] {
        &self.rows
    }
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        // even arity: mean of the two central order statistics
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}

/// Per-row estimates, aggregated by the requested statistic.
pub fn aggregate_estimate(
    a: &MedianSketch,
    b: &MedianSketch,
    cfg: &EstimatorConfig,
    stat: Aggregate,
) -> Result<DistanceEstimate> {
    if a.k() != b.k() {
        return Err(Error::ArityMismatch {
            left: a.k(),
            right: b.k(),
        });
    }
    let per_row = a
        .rows
        .iter()
        .zip(&b.rows)
        .map(|(sa, sb)| estimate_pair(sa, sb, cfg))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = per_row.iter().map(|e| e.h_hat).collect();
    let h_hat = match stat {
        Aggregate::Median => median_of(values),
        Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
        Aggregate::Min => values.iter().cloned().fold(f64::INFINITY, f64::min),
    };
    // report the row whose estimate is closest to the aggregate
    let nearest = per_row
        .iter()
        .min_by(|x, y| {
            (x.h_hat - h_hat)
                .abs()
                .partial_cmp(&(y.h_hat - h_hat).abs())
                .unwrap()
        })
        .unwrap();
    Ok(DistanceEstimate {
        h_hat,
        f: nearest.f,
        clamped: per_row.iter().all(|e| e.clamped),
    })
}

/// Median of the k per-row estimates.
pub fn median_estimate(
    a: &MedianSketch,
    b: &MedianSketch,
    cfg: &EstimatorConfig,
) -> Result<DistanceEstimate> {
    aggregate_estimate(a, b, cfg, Aggregate::Median)
}

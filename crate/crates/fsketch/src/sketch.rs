//! Sketch construction, in-place updates, and cell-level queries.
//!
//! Cell j of a sketch is the mod-p sum of value * multiplier over all
//! attributes mapped to j. Everything here is integer arithmetic, so
//! sketches are bit-identical across platforms.

use crate::error::{Error, Result};
use crate::params::SketchParams;
use crate::vector::CategoricalVector;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A dense length-d sketch with cells in [0, p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FSketchVector {
    p: u64,
    cells: Vec<u64>,
}

impl FSketchVector {
    pub(crate) fn from_cells(p: u64, cells: Vec<u64>) -> Self {
        debug_assert!(cells.iter().all(|&c| c < p));
        Self { p, cells }
    }

    pub fn d(&self) -> usize {
        self.cells.len()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    /// Count of strictly positive cells.
    pub fn nnz(&self) -> usize {
        self.cells.iter().filter(|&&c| c > 0).count()
    }
}

/// One pass over the stored entries of `x`; O(nnz(x)) after init.
pub fn create_sketch(x: &CategoricalVector, params: &SketchParams) -> Result<FSketchVector> {
    if x.dim() != params.n() {
        return Err(Error::DimensionMismatch {
            vector: x.dim(),
            params: params.n(),
        });
    }
    let p = params.p();
    let mut cells = vec![0u64; params.d()];
    for &(i, v) in x.entries() {
        let i = i as usize;
        let j = params.cell_of(i);
        // v <= 2^31 and multiplier < p <= 2^32, so the product fits u64.
        let term = (v as u64 % p) * params.multiplier(i) % p;
        cells[j] = (cells[j] + term) % p;
    }
    Ok(FSketchVector::from_cells(p, cells))
}

/// Cell `j` (1-based) of the sketch of `x`, computed from the per-cell
/// closed form without building the full sketch.
pub fn sketch_entry(x: &CategoricalVector, params: &SketchParams, j: usize) -> Result<u64> {
    if x.dim() != params.n() {
        return Err(Error::DimensionMismatch {
            vector: x.dim(),
            params: params.n(),
        });
    }
    if j == 0 || j > params.d() {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: params.d(),
        });
    }
    let p = params.p();
    let mut acc = 0u64;
    for &(i, v) in x.entries() {
        let i = i as usize;
        if params.cell_of(i) == j - 1 {
            acc = (acc + (v as u64 % p) * params.multiplier(i) % p) % p;
        }
    }
    Ok(acc)
}

/// Apply the attribute change x_i: v -> v_new to an existing sketch.
/// Only cell rho(i) moves, by (v_new - v) * r_i reduced to a
/// non-negative remainder. Insertion is v = 0, deletion is v_new = 0.
pub fn update_sketch(
    s: &FSketchVector,
    i: usize,
    v: u32,
    v_new: u32,
    params: &SketchParams,
) -> Result<FSketchVector> {
    if s.d() != params.d() || s.p() != params.p() {
        return Err(Error::SketchMismatch {
            d_left: s.d(),
            d_right: params.d(),
            p_left: s.p(),
            p_right: params.p(),
        });
    }
    if i == 0 || i > params.n() {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: params.n(),
        });
    }
    let p = params.p();
    let delta = (v_new as i64 - v as i64).rem_euclid(p as i64) as u64;
    let j = params.cell_of(i);
    let mut out = s.clone();
    out.cells[j] = (out.cells[j] + delta * params.multiplier(i) % p) % p;
    Ok(out)
}

fn sketch_all_seq(
    points: &[CategoricalVector],
    params: &SketchParams,
) -> Result<Vec<FSketchVector>> {
    points.iter().map(|x| create_sketch(x, params)).collect()
}

/// Sketch every vector of a batch. Parallel over vectors when the
/// `parallel` feature is on; no shared mutable state either way.
#[cfg(feature = "parallel")]
pub fn sketch_all(points: &[CategoricalVector], params: &SketchParams) -> Result<Vec<FSketchVector>> {
    points
        .par_iter()
        .map(|x| create_sketch(x, params))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn sketch_all(points: &[CategoricalVector], params: &SketchParams) -> Result<Vec<FSketchVector>> {
    sketch_all_seq(points, params)
}

/// Sequential batch sketching, kept available for benchmarking against
/// the parallel path.
pub fn sketch_all_sequential(
    points: &[CategoricalVector],
    params: &SketchParams,
) -> Result<Vec<FSketchVector>> {
    sketch_all_seq(points, params)
}

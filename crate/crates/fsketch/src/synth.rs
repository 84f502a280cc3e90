//! Seeded synthetic categorical data, for tests and desk-scale runs.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::vector::CategoricalVector;

const SYNTH_TAG: u64 = 0x5d;

/// A vector with exactly `nnz` non-zero attributes at distinct random
/// indices, values uniform in [1, c].
pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, nnz: usize, c: u32) -> CategoricalVector {
    assert!(nnz <= n && c >= 1);
    let entries = sample(rng, n, nnz)
        .into_iter()
        .map(|i| (i as u32 + 1, rng.random_range(1..=c)))
        .collect();
    CategoricalVector::new(n, entries).expect("sampled entries are valid")
}

/// Dataset of `count` points, each with nnz drawn uniformly from
/// [1, sigma].
pub fn random_dataset(n: usize, count: usize, sigma: usize, c: u32, seed: u64) -> Result<Dataset> {
    if sigma == 0 || sigma > n || c == 0 || count == 0 {
        return Err(Error::InvalidParameter(
            "need 1 <= sigma <= n, c >= 1, count >= 1".into(),
        ));
    }
    let mut rng = stream(seed, SYNTH_TAG);
    let points = (0..count)
        .map(|_| {
            let nnz = rng.random_range(1..=sigma);
            random_vector(&mut rng, n, nnz, c)
        })
        .collect();
    Dataset::new(format!("synthetic-{seed}"), points)
}

/// A pair of vectors with exactly `sigma` non-zeros each and Hamming
/// distance exactly `h`, for any h <= 2 * sigma (with room in n).
///
/// For h <= sigma, y changes h values of x in place. Beyond that, every
/// extra unit of distance comes in pairs: one support coordinate is
/// dropped and a fresh one is inserted, which keeps nnz(y) = sigma.
pub fn pair_with_distance(
    rng: &mut ChaCha8Rng,
    n: usize,
    sigma: usize,
    c: u32,
    h: usize,
) -> Result<(CategoricalVector, CategoricalVector)> {
    if sigma == 0 || sigma > n || c < 2 {
        return Err(Error::InvalidParameter(
            "need 1 <= sigma <= n and c >= 2".into(),
        ));
    }
    if h > 2 * sigma {
        return Err(Error::InvalidParameter(format!(
            "h = {h} exceeds 2 * sigma = {}",
            2 * sigma
        )));
    }
    let moves = h.saturating_sub(sigma); // coordinates moved off x's support
    let changes = h - 2 * moves;
    if sigma + moves > n {
        return Err(Error::InvalidParameter(format!(
            "n = {n} too small for sigma = {sigma} plus {moves} moved coordinates"
        )));
    }

    let slots = sample(rng, n, sigma + moves).into_vec();
    let (support, spare) = slots.split_at(sigma);

    let x_entries: Vec<(u32, u32)> = support
        .iter()
        .map(|&i| (i as u32 + 1, rng.random_range(1..=c)))
        .collect();
    let x = CategoricalVector::new(n, x_entries.clone())?;

    let mut y_entries: Vec<(u32, u32)> = Vec::with_capacity(sigma);
    for (k, &(i, v)) in x_entries.iter().enumerate() {
        if k < moves {
            // dropped from y; replaced below at a spare index
        } else if k < moves + changes {
            let mut v2 = rng.random_range(1..=c - 1);
            if v2 >= v {
                v2 += 1;
            }
            y_entries.push((i, v2));
        } else {
            y_entries.push((i, v));
        }
    }
    for &i in spare {
        y_entries.push((i as u32 + 1, rng.random_range(1..=c)));
    }
    let y = CategoricalVector::new(n, y_entries)?;

    debug_assert_eq!(x.hamming(&y).unwrap(), h);
    Ok((x, y))
}

//! In-repo comparison sketches: one-hot encoding, feature hashing,
//! SimHash, and a binary bucket sketch standing in for OHE + BinSketch.
//!
//! Feature hashing and SimHash sketches are compared by plain Hamming
//! distance over their cells/bits. The bucket sketch reports raw sketch
//! Hamming distance and is labeled PROXY wherever it is surfaced; the
//! original binary-sketch estimator is out of scope here.

use crate::error::{Error, Result};
use crate::rng::hash3;
use crate::vector::CategoricalVector;

const FH_BUCKET_TAG: u64 = 0xfb;
const FH_SIGN_TAG: u64 = 0xf5;
const SH_PLANE_TAG: u64 = 0x51;
const OHE_BUCKET_TAG: u64 = 0x0b;

/// A binary vector stored as a sorted set of 1-based set-bit positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryVector {
    dim: usize,
    set_bits: Vec<u64>,
}

impl BinaryVector {
    pub fn new(dim: usize, mut set_bits: Vec<u64>) -> Result<Self> {
        set_bits.sort_unstable();
        set_bits.dedup();
        if set_bits.iter().any(|&b| b == 0 || b > dim as u64) {
            return Err(Error::InvalidParameter(format!(
                "set bit out of range [1, {dim}]"
            )));
        }
        Ok(Self { dim, set_bits })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.set_bits.len()
    }

    pub fn set_bits(&self) -> &[u64] {
        &self.set_bits
    }

    /// Hamming distance = size of the symmetric difference of set bits.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                vector: other.dim,
                params: self.dim,
            });
        }
        let (a, b) = (&self.set_bits, &other.set_bits);
        let (mut i, mut j, mut h) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    h += 1;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    h += 1;
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(h + a.len() - i + b.len() - j)
    }
}

/// Integer-celled sketch shared by feature hashing (signed sums) and
/// SimHash (cells restricted to 0/1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSketch {
    cells: Vec<i64>,
}

impl SignedSketch {
    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn hamming(&self, other: &Self) -> Result<usize> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                vector: other.dim(),
                params: self.dim(),
            });
        }
        Ok(self
            .cells
            .iter()
            .zip(&other.cells)
            .filter(|(a, b)| a != b)
            .count())
    }
}

/// Expand each attribute into a length-c block; value v sets bit v of
/// block i, value 0 leaves the block all-zero. Output dim is n*c and
/// nnz is preserved.
pub fn one_hot_encode(x: &CategoricalVector, c: u32) -> Result<BinaryVector> {
    let mut bits = Vec::with_capacity(x.nnz());
    for &(i, v) in x.entries() {
        if v > c {
            return Err(Error::ValueOutOfRange { value: v, max: c });
        }
        bits.push((i as u64 - 1) * c as u64 + v as u64);
    }
    BinaryVector::new(x.dim() * c as usize, bits)
}

/// Both the raw Hamming distance and the distance between the one-hot
/// encodings; the latter always sits in [HD, 2*HD].
pub fn ohe_distance_bounds(
    x: &CategoricalVector,
    y: &CategoricalVector,
    c: u32,
) -> Result<(usize, usize)> {
    let hd = x.hamming(y)?;
    let hd_ohe = one_hot_encode(x, c)?.hamming(&one_hot_encode(y, c)?)?;
    Ok((hd, hd_ohe))
}

fn sign_of(bit: u64) -> i64 {
    if bit & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Feature hashing: cells[j] = sum of sign(i) * x_i over attributes i
/// with bucket(i) = j, with seeded uniform bucket and sign hashes.
pub fn feature_hash_sketch(x: &CategoricalVector, d: usize, seed: u64) -> Result<SignedSketch> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let mut cells = vec![0i64; d];
    for &(i, v) in x.entries() {
        let j = (hash3(seed, FH_BUCKET_TAG, i as u64) % d as u64) as usize;
        cells[j] += sign_of(hash3(seed, FH_SIGN_TAG, i as u64)) * v as i64;
    }
    Ok(SignedSketch { cells })
}

/// SimHash: bit j is the sign of the dot product of x with the j-th
/// seeded random +-1 hyperplane (sign of 0 maps to bit 0).
pub fn simhash_sketch(x: &CategoricalVector, d: usize, seed: u64) -> Result<SignedSketch> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let cells = (0..d)
        .map(|j| {
            let dot: i64 = x
                .entries()
                .iter()
                .map(|&(i, v)| {
                    sign_of(hash3(seed, SH_PLANE_TAG ^ ((j as u64) << 8), i as u64)) * v as i64
                })
                .sum();
            if dot > 0 {
                1
            } else {
                0
            }
        })
        .collect();
    Ok(SignedSketch { cells })
}

/// PROXY for OHE + binary sketching: hash every one-hot bit position to
/// one of d buckets, bucket bit = OR of assigned bits. Its raw Hamming
/// distance underestimates; no estimator is attached on purpose.
pub fn ohe_binary_bucket_sketch(
    x: &CategoricalVector,
    c: u32,
    d: usize,
    seed: u64,
) -> Result<BinaryVector> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let ohe = one_hot_encode(x, c)?;
    let bits = ohe
        .set_bits()
        .iter()
        .map(|&pos| hash3(seed, OHE_BUCKET_TAG, pos) % d as u64 + 1)
        .collect();
    BinaryVector::new(d, bits)
}

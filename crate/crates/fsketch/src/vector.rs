//! Sparse categorical vectors over {0, 1, ..., c}^n. The value 0 denotes
//! a missing attribute and is represented by absence.

use crate::error::{Error, Result};

/// Maximum nnz over a dataset's vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sparsity(pub usize);

/// A sparse vector with 1-based attribute indices and non-zero integer
/// labels. Entries are kept sorted by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalVector {
    dim: usize,
    entries: Vec<(u32, u32)>,
}

impl CategoricalVector {
    /// Build from (index, value) pairs. Rejects out-of-range indices,
    /// zero values, and duplicate indices.
    pub fn new(dim: usize, mut entries: Vec<(u32, u32)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dim must be positive".into()));
        }
        entries.sort_unstable_by_key(|&(i, _)| i);
        let mut prev = 0u32;
        for &(i, v) in &entries {
            if i == 0 || i as usize > dim {
                return Err(Error::IndexOutOfRange {
                    index: i as usize,
                    max: dim,
                });
            }
            if v == 0 {
                return Err(Error::InvalidParameter(format!(
                    "explicit zero value at index {i}; omit the entry instead"
                )));
            }
            if i == prev {
                return Err(Error::InvalidParameter(format!("duplicate index {i}")));
            }
            prev = i;
        }
        Ok(Self { dim, entries })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn from_dense(values: &[u32]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0)
            .map(|(i, &v)| (i as u32 + 1, v))
            .collect();
        Self::new(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Value at 1-based index `i` (0 when absent).
    pub fn get(&self, i: usize) -> u32 {
        debug_assert!(i >= 1 && i <= self.dim);
        match self.entries.binary_search_by_key(&(i as u32), |&(j, _)| j) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0,
        }
    }

    /// Sorted (1-based index, value) pairs of the non-zero entries.
    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn max_value(&self) -> u32 {
        self.entries.iter().map(|&(_, v)| v).max().unwrap_or(0)
    }

    /// Copy with attribute `i` set to `v` (v = 0 removes the entry).
    pub fn with_value(&self, i: usize, v: u32) -> Result<Self> {
        if i == 0 || i > self.dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.dim,
            });
        }
        let mut entries = self.entries.clone();
        match entries.binary_search_by_key(&(i as u32), |&(j, _)| j) {
            Ok(pos) => {
                if v == 0 {
                    entries.remove(pos);
                } else {
                    entries[pos].1 = v;
                }
            }
            Err(pos) => {
                if v != 0 {
                    entries.insert(pos, (i as u32, v));
                }
            }
        }
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    /// Exact Hamming distance, counting coordinates where the vectors
    /// disagree (absence counts as 0). Linear in nnz(self) + nnz(other).
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                vector: other.dim,
                params: self.dim,
            });
        }
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut h) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    h += 1;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    h += 1;
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a[i].1 != b[j].1 {
                        h += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        h += a.len() - i + b.len() - j;
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_range() {
        assert!(CategoricalVector::new(4, vec![(1, 2), (1, 3)]).is_err());
        assert!(CategoricalVector::new(4, vec![(5, 1)]).is_err());
        assert!(CategoricalVector::new(4, vec![(0, 1)]).is_err());
        assert!(CategoricalVector::new(4, vec![(2, 0)]).is_err());
        assert!(CategoricalVector::new(0, vec![]).is_err());
    }

    #[test]
    fn get_and_nnz() {
        let x = CategoricalVector::new(4, vec![(3, 7), (1, 2)]).unwrap();
        assert_eq!(x.nnz(), 2);
        assert_eq!(x.get(1), 2);
        assert_eq!(x.get(2), 0);
        assert_eq!(x.get(3), 7);
    }

    #[test]
    fn hamming_counts_disagreements() {
        let x = CategoricalVector::from_dense(&[1, 2, 0, 3]).unwrap();
        let y = CategoricalVector::from_dense(&[1, 5, 4, 0]).unwrap();
        assert_eq!(x.hamming(&y).unwrap(), 3);
        assert_eq!(x.hamming(&x).unwrap(), 0);
        assert_eq!(y.hamming(&x).unwrap(), 3);
    }

    #[test]
    fn with_value_insert_change_delete() {
        let x = CategoricalVector::from_dense(&[1, 0, 3]).unwrap();
        let y = x.with_value(2, 9).unwrap();
        assert_eq!(y.get(2), 9);
        let z = y.with_value(1, 0).unwrap();
        assert_eq!(z.nnz(), 2);
        assert_eq!(z.get(1), 0);
        assert!(x.with_value(4, 1).is_err());
    }
}

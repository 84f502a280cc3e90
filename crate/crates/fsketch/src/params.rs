//! Sketch parameters: the random attribute-to-cell mapping, the random
//! multipliers, and the modulus. Fully determined by (n, d, p, seed).

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

const RHO_TAG: u64 = 0x52484f;
const R_TAG: u64 = 0x52;

/// Deterministic primality check by trial division up to floor(sqrt(n)).
/// Exact for every u64, no probabilistic rounds.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut k = 5u64;
    while k.checked_mul(k).map(|kk| kk <= n).unwrap_or(false) {
        if n % k == 0 || n % (k + 2) == 0 {
            return false;
        }
        k += 6;
    }
    true
}

/// Smallest prime strictly greater than `c`. By Bertrand's postulate a
/// prime exists below 2c, so the scan terminates after at most c steps.
pub fn next_prime(c: u64) -> u64 {
    let mut n = c + 1;
    while !is_prime(n) {
        n += 1;
    }
    n
}

/// Internal variables of one sketch row. `rho` maps each of the n
/// attributes to a cell in [0, d), `r` holds one multiplier in [0, p)
/// per attribute. Both are regenerable from the seed alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchParams {
    n: usize,
    d: usize,
    p: u64,
    seed: u64,
    rho: Vec<u32>,
    r: Vec<u64>,
}

impl SketchParams {
    pub fn new(n: usize, d: usize, p: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("d must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut rho_rng = rng::stream(seed, RHO_TAG);
        let rho = (0..n).map(|_| rho_rng.random_range(0..d as u32)).collect();
        let mut r_rng = rng::stream(seed, R_TAG);
        let r = (0..n).map(|_| r_rng.random_range(0..p)).collect();
        Ok(Self {
            n,
            d,
            p,
            seed,
            rho,
            r,
        })
    }

    /// Build from explicit tables instead of a seed. `rho` holds 0-based
    /// cell indices, one per attribute; `r` holds multipliers in [0, p).
    pub fn from_tables(d: usize, p: u64, rho: Vec<u32>, r: Vec<u64>) -> Result<Self> {
        if rho.is_empty() || rho.len() != r.len() {
            return Err(Error::InvalidParameter(
                "rho and r must be non-empty and equal-length".into(),
            ));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("d must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if rho.iter().any(|&j| j as usize >= d) {
            return Err(Error::InvalidParameter("rho entry out of [0, d)".into()));
        }
        if r.iter().any(|&v| v >= p) {
            return Err(Error::InvalidParameter("r entry out of [0, p)".into()));
        }
        let n = rho.len();
        Ok(Self {
            n,
            d,
            p,
            seed: 0,
            rho,
            r,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Cell index (0-based) that 1-based attribute `i` maps to.
    pub fn cell_of(&self, i: usize) -> usize {
        self.rho[i - 1] as usize
    }

    /// Multiplier for 1-based attribute `i`, in [0, p).
    pub fn multiplier(&self, i: usize) -> u64 {
        self.r[i - 1]
    }
}

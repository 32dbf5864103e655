//! Balanced hashes F_2^n -> F_2^k realized as full-rank k x n bit matrices.
//!
//! A full-rank linear map has a kernel of size 2^(n-k), so every output value
//! has exactly 2^(n-k) preimages. For a uniformly random full-rank matrix the
//! kernel is a uniform (n-k)-dimensional subspace, and two fixed distinct
//! inputs collide with probability (2^(n-k) - 1) / (2^n - 1).

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Upper bound on n for exhaustive input enumeration.
pub const ENUMERATION_MAX_N: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearHash {
    n: u32,
    rows: Vec<u64>,
}

fn mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_widths(n: u32, k: u32) -> Result<()> {
    if !(1..=64).contains(&n) {
        return Err(Error::BitWidth(n));
    }
    if k < 1 || k > n {
        return Err(Error::HashWidth { n, k });
    }
    Ok(())
}

/// Rank over GF(2) by elimination on a copy of the rows.
pub fn rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..64 {
        let pivot_mask = 1u64 << bit;
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] & pivot_mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && *row & pivot_mask != 0 {
                *row ^= pivot;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

impl LinearHash {
    /// Builds a hash from explicit rows; rejects rank-deficient matrices.
    pub fn from_rows(n: u32, rows: Vec<u64>) -> Result<Self> {
        check_widths(n, rows.len() as u32)?;
        if let Some(&r) = rows.iter().find(|&&r| r & !mask(n) != 0) {
            return Err(Error::OutOfRange { value: r, n });
        }
        if rank(&rows) != rows.len() {
            return Err(Error::InvalidParameter(format!(
                "matrix has rank {} < k = {}",
                rank(&rows),
                rows.len()
            )));
        }
        Ok(Self { n, rows })
    }

    pub fn identity(n: u32) -> Result<Self> {
        Self::from_rows(n, (0..n).map(|i| 1u64 << i).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Output bit j is the parity of `row_j & x`.
    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        debug_assert!(x & !mask(self.n) == 0);
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &row)| acc | (((row & x).count_ones() & 1) as u64) << j)
    }

    /// Number of inputs mapping to each of the 2^k outputs.
    pub fn preimage_histogram(&self) -> Result<Vec<u64>> {
        if self.n > ENUMERATION_MAX_N {
            return Err(Error::TooLarge {
                n: self.n,
                limit: ENUMERATION_MAX_N,
                what: "preimage enumeration",
            });
        }
        let mut counts = vec![0u64; 1usize << self.k()];
        for x in 0..1u64 << self.n {
            counts[self.apply(x) as usize] += 1;
        }
        Ok(counts)
    }

    /// Header line `n k`, then one `0x`-prefixed hex row per line.
    pub fn to_dump(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k());
        for r in &self.rows {
            writeln!(out, "{r:#x}").unwrap();
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix dump".into()))?;
        let mut parts = header.split_whitespace().map(str::parse::<u32>);
        let (Some(Ok(n)), Some(Ok(k)), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("bad header `{header}`")));
        };
        let rows = lines.map(crate::model::parse_hex).collect::<Result<Vec<_>>>()?;
        if rows.len() != k as usize {
            return Err(Error::Parse(format!("header says k={k}, found {} rows", rows.len())));
        }
        Self::from_rows(n, rows)
    }
}

/// Samples a k x n matrix uniformly among rank-k matrices by rejecting
/// rank-deficient draws. Returns the hash and the number of draws used.
pub fn sample_full_rank_counted<R: Rng + ?Sized>(n: u32, k: u32, rng: &mut R) -> Result<(LinearHash, u64)> {
    check_widths(n, k)?;
    let m = mask(n);
    let mut attempts = 0;
    loop {
        attempts += 1;
        let rows: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & m).collect();
        if rank(&rows) == k as usize {
            return Ok((LinearHash { n, rows }, attempts));
        }
    }
}

pub fn sample_full_rank<R: Rng + ?Sized>(n: u32, k: u32, rng: &mut R) -> Result<LinearHash> {
    sample_full_rank_counted(n, k, rng).map(|(h, _)| h)
}

/// Probability that k uniform rows of length n are independent:
/// prod_{i<k} (1 - 2^(i-n)).
pub fn full_rank_probability(n: u32, k: u32) -> f64 {
    (0..k).map(|i| 1.0 - 2f64.powi(i as i32 - n as i32)).product()
}

/// Shared, index-addressable sequence h_0, h_1, ... derived from one seed.
/// Element i is drawn from ChaCha stream i, so it does not depend on which
/// other elements were generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashSequence {
    seed: u64,
    n: u32,
    k: u32,
}

impl HashSequence {
    pub fn new(seed: u64, n: u32, k: u32) -> Result<Self> {
        check_widths(n, k)?;
        Ok(Self { seed, n, k })
    }

    pub fn get(&self, index: u64) -> LinearHash {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        sample_full_rank(self.n, self.k, &mut rng).expect("widths validated at construction")
    }
}

/// Fraction of trials where a fresh hash maps a fresh random pair x != y
/// to the same output.
pub fn collision_rate_mc<R: Rng + ?Sized>(n: u32, k: u32, trials: u64, rng: &mut R) -> Result<f64> {
    check_widths(n, k)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let m = mask(n);
    let mut hits = 0u64;
    for _ in 0..trials {
        let h = sample_full_rank(n, k, rng)?;
        let x = rng.gen::<u64>() & m;
        let y = loop {
            let y = rng.gen::<u64>() & m;
            if y != x {
                break y;
            }
        };
        if h.apply(x) == h.apply(y) {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

//! Hamming distance and Hamming-distance-preserving functions (HDFs) on
//! n-bit strings.
//!
//! Bit `m` of a string `x` is the coefficient of `2^m`. Every HDF factors
//! uniquely as a bit reorder followed by an XOR with a mask:
//! `table[x] = reorder(x) ^ mask`, where `reorder` moves input bit `m` to
//! output position `reorder[m]`. There are exactly `2ⁿ·n!` of them.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest string length `enumerate_hdf` accepts.
pub const MAX_HDF_BITS: usize = 4;

/// popcount(x XOR y), no range checks.
#[inline]
pub fn hd(x: usize, y: usize) -> u32 {
    (x ^ y).count_ones()
}

/// Hamming distance between two n-bit strings.
pub fn hamming_distance(x: usize, y: usize, n: usize) -> Result<u32> {
    let size = 1usize << n;
    for v in [x, y] {
        if v >= size {
            return Err(Error::OutOfRange {
                what: "bit string",
                value: v as i64,
                range: format!("[0, {size})"),
            });
        }
    }
    Ok(hd(x, y))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HdFunction {
    n: usize,
    table: Vec<usize>,
    mask: usize,
    reorder: Vec<usize>,
}

impl HdFunction {
    /// q_mask ∘ r_reorder.
    pub fn from_factors(n: usize, mask: usize, reorder: &[usize]) -> Result<Self> {
        if reorder.len() != n || !is_permutation(reorder) {
            return Err(Error::InvalidArgument(format!(
                "reorder {reorder:?} is not a permutation of {n} bit positions"
            )));
        }
        if mask >= 1 << n {
            return Err(Error::OutOfRange {
                what: "mask",
                value: mask as i64,
                range: format!("[0, {})", 1usize << n),
            });
        }
        let table = (0..1usize << n)
            .map(|x| permute_bits(x, reorder) ^ mask)
            .collect();
        Ok(HdFunction {
            n,
            table,
            mask,
            reorder: reorder.to_vec(),
        })
    }

    /// Validates `table` and factors it.
    pub fn from_table(table: &[usize], n: usize) -> Result<Self> {
        let (mask, reorder) = factor_hdf(table, n)?;
        Ok(HdFunction {
            n,
            table: table.to_vec(),
            mask,
            reorder,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_factors(n, 0, &(0..n).collect::<Vec<_>>()).expect("identity is an HDF")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn mask(&self) -> usize {
        self.mask
    }

    pub fn reorder(&self) -> &[usize] {
        &self.reorder
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &HdFunction) -> HdFunction {
        assert_eq!(self.n, other.n);
        let table: Vec<usize> = other.table.iter().map(|&y| self.table[y]).collect();
        HdFunction::from_table(&table, self.n).expect("HDFs are closed under composition")
    }

    pub fn inverse(&self) -> HdFunction {
        let mut table = vec![0; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y] = x;
        }
        HdFunction::from_table(&table, self.n).expect("HDFs are closed under inversion")
    }
}

fn permute_bits(x: usize, reorder: &[usize]) -> usize {
    reorder
        .iter()
        .enumerate()
        .filter(|(m, _)| x >> m & 1 == 1)
        .fold(0, |acc, (_, &dest)| acc | 1 << dest)
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v >= p.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

fn check_bijection(table: &[usize], n: usize) -> Result<()> {
    if n > usize::BITS as usize - 1 || table.len() != 1usize << n || !is_permutation(table) {
        return Err(Error::NotBijective(n));
    }
    Ok(())
}

/// True iff the bijection `table` preserves Hamming distance on every pair.
pub fn is_hdf(table: &[usize], n: usize) -> Result<bool> {
    check_bijection(table, n)?;
    let size = table.len();
    for x in 0..size {
        for y in (x + 1)..size {
            if hd(x, y) != hd(table[x], table[y]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Splits an HDF into its (mask, reorder) factors.
pub fn factor_hdf(table: &[usize], n: usize) -> Result<(usize, Vec<usize>)> {
    if !is_hdf(table, n)? {
        return Err(Error::NotHammingPreserving);
    }
    let mask = table[0];
    let reorder = (0..n)
        .map(|m| (table[1 << m] ^ mask).trailing_zeros() as usize)
        .collect();
    Ok((mask, reorder))
}

/// All HDFs on n-bit strings, mask-major, then reorders in lexicographic
/// order of the `reorder` vector.
pub fn enumerate_hdf(n: usize) -> Result<Vec<HdFunction>> {
    if !(1..=MAX_HDF_BITS).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as i64,
            range: format!("[1, {MAX_HDF_BITS}]"),
        });
    }
    let reorders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut out = Vec::with_capacity((1 << n) * reorders.len());
    for mask in 0..1usize << n {
        for r in &reorders {
            out.push(HdFunction::from_factors(n, mask, r)?);
        }
    }
    Ok(out)
}

//! Dense matrices over F_2 with rows packed into machine words.
//!
//! Column `j` of a row lives in bit `j` of its word, so a binary row vector
//! `x` acts on the right: `x·M` is the XOR of the rows of `M` selected by the
//! set bits of `x`. At most 32 columns are supported, enough for the
//! `2m × 2m` symplectic matrices with `m ≤ 16`.

use std::fmt;

use crate::error::{Error, Result};

/// Parity of the set bits of `x`.
#[inline]
pub fn parity(x: u32) -> u32 {
    x.count_ones() & 1
}

/// Row vector times matrix, both over F_2.
#[inline]
pub fn vec_mul(x: u32, rows: &[u32]) -> u32 {
    let mut acc = 0;
    let mut bits = x;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        acc ^= rows[i];
        bits &= bits - 1;
    }
    acc
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<u32>,
    ncols: usize,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        assert!(ncols <= 32, "at most 32 columns");
        BitMatrix { rows: vec![0; nrows], ncols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    /// Builds a matrix from packed rows; bits at or above `ncols` are rejected.
    pub fn from_rows(rows: Vec<u32>, ncols: usize) -> Result<Self> {
        if ncols > 32 {
            return Err(Error::Dimension(format!("{ncols} columns exceeds 32")));
        }
        let mask = col_mask(ncols);
        if let Some(r) = rows.iter().find(|&&r| r & !mask != 0) {
            return Err(Error::Dimension(format!("row {r:#x} has bits beyond column {ncols}")));
        }
        Ok(BitMatrix { rows, ncols })
    }

    /// Builds a matrix from a 0/1 table, handy in tests.
    pub fn from_bits(table: &[&[u8]]) -> Self {
        let ncols = table.first().map_or(0, |r| r.len());
        let rows = table
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols);
                r.iter().enumerate().fold(0u32, |acc, (j, &b)| acc | (u32::from(b & 1) << j))
            })
            .collect();
        BitMatrix { rows, ncols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> u32 {
        self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// `x·M` for a row vector `x` of length `nrows`.
    pub fn left_mul_vec(&self, x: u32) -> u32 {
        vec_mul(x, &self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.rows.len());
        for (i, &r) in self.rows.iter().enumerate() {
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                t.rows[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        t
    }

    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.ncols != rhs.nrows() {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.ncols,
                rhs.nrows(),
                rhs.ncols
            )));
        }
        let rows = self.rows.iter().map(|&r| vec_mul(r, &rhs.rows)).collect();
        Ok(BitMatrix { rows, ncols: rhs.ncols })
    }

    pub fn add(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.nrows() != rhs.nrows() || self.ncols != rhs.ncols {
            return Err(Error::Dimension("addition of differently shaped matrices".into()));
        }
        let rows = self.rows.iter().zip(&rhs.rows).map(|(a, b)| a ^ b).collect();
        Ok(BitMatrix { rows, ncols: self.ncols })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.ncols {
            let bit = 1u32 << col;
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Gauss-Jordan inverse; `None` when singular or not square.
    pub fn inverse(&self) -> Option<BitMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.ncols;
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let bit = 1u32 << col;
            let p = (col..n).find(|&i| a[i] & bit != 0)?;
            a.swap(col, p);
            inv.swap(col, p);
            for i in 0..n {
                if i != col && a[i] & bit != 0 {
                    a[i] ^= a[col];
                    inv[i] ^= inv[col];
                }
            }
        }
        Some(BitMatrix { rows: inv, ncols: n })
    }

    /// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn from_blocks(a: &BitMatrix, b: &BitMatrix, c: &BitMatrix, d: &BitMatrix) -> Result<BitMatrix> {
        let m = a.nrows();
        for blk in [a, b, c, d] {
            if blk.nrows() != m || blk.ncols != m {
                return Err(Error::Dimension("blocks must all be m x m".into()));
            }
        }
        if 2 * m > 32 {
            return Err(Error::Dimension(format!("2m = {} exceeds 32", 2 * m)));
        }
        let top = a.rows.iter().zip(&b.rows).map(|(&x, &y)| x | (y << m));
        let bottom = c.rows.iter().zip(&d.rows).map(|(&x, &y)| x | (y << m));
        Ok(BitMatrix { rows: top.chain(bottom).collect(), ncols: 2 * m })
    }

    /// Splits a `2m × 2m` matrix into its `[[A, B], [C, D]]` blocks.
    pub fn blocks(&self) -> Result<[BitMatrix; 4]> {
        if !self.is_square() || self.ncols % 2 != 0 {
            return Err(Error::Dimension("blocks need an even square matrix".into()));
        }
        let m = self.ncols / 2;
        let lo = col_mask(m);
        let pick = |range: std::ops::Range<usize>, shift: usize| BitMatrix {
            rows: self.rows[range].iter().map(|&r| (r >> shift) & lo).collect(),
            ncols: m,
        };
        Ok([pick(0..m, 0), pick(0..m, m), pick(m..2 * m, 0), pick(m..2 * m, m)])
    }
}

pub(crate) fn col_mask(ncols: usize) -> u32 {
    if ncols >= 32 {
        u32::MAX
    } else {
        (1u32 << ncols) - 1
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.nrows(), self.ncols)?;
        for &r in &self.rows {
            let s: String = (0..self.ncols).map(|j| if (r >> j) & 1 == 1 { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let a = BitMatrix::from_bits(&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(3));
        assert_eq!(inv.mul(&a).unwrap(), BitMatrix::identity(3));
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = BitMatrix::from_bits(&[&[1, 1], &[1, 1]]);
        assert!(a.inverse().is_none());
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn blocks_round_trip() {
        let a = BitMatrix::from_bits(&[&[1, 0], &[1, 1]]);
        let b = BitMatrix::from_bits(&[&[0, 1], &[0, 0]]);
        let c = BitMatrix::zeros(2, 2);
        let d = BitMatrix::identity(2);
        let full = BitMatrix::from_blocks(&a, &b, &c, &d).unwrap();
        assert_eq!(full.blocks().unwrap(), [a, b, c, d]);
    }

    #[test]
    fn transpose_and_symmetry() {
        let a = BitMatrix::from_bits(&[&[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().nrows(), 3);
        assert!(BitMatrix::from_bits(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]).is_symmetric());
    }

    #[test]
    fn from_rows_rejects_stray_bits() {
        assert!(BitMatrix::from_rows(vec![0b100], 2).is_err());
    }
}

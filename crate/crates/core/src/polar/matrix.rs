use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Dense matrix over GF(2), rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.data[i * self.words_per_row + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let word = &mut self.data[i * self.words_per_row + j / 64];
        if value {
            *word |= 1 << (j % 64);
        } else {
            *word &= !(1 << (j % 64));
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn row(&self, i: usize) -> Vec<u8> {
        (0..self.cols).map(|j| self.get(i, j) as u8).collect()
    }

    pub fn column_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kronecker(&self, other: &BinaryMatrix) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        if other.get(k, l) {
                            out.set(i * other.rows + k, j * other.cols + l, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix over GF(2).
    pub fn left_mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        crate::error::check_len(self.rows, v.len())?;
        let mut acc = vec![0u64; self.words_per_row];
        for (i, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                for (a, w) in acc.iter_mut().zip(self.row_words(i)) {
                    *a ^= w;
                }
            }
        }
        Ok((0..self.cols)
            .map(|j| ((acc[j / 64] >> (j % 64)) & 1) as u8)
            .collect())
    }
}

impl Mul for &BinaryMatrix {
    type Output = BinaryMatrix;

    fn mul(self, rhs: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = BinaryMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let dst = i * out.words_per_row;
                    for w in 0..out.words_per_row {
                        out.data[dst + w] ^= rhs.data[k * rhs.words_per_row + w];
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Largest supported log2 block length.
pub const MAX_LOG2_N: u32 = 16;

/// `F₂^⊗n` in natural index order: entry `(i, j)` is set iff `i & j == j`.
pub fn generator_matrix(n: u32) -> Result<BinaryMatrix> {
    if n > MAX_LOG2_N {
        return Err(Error::Size(n));
    }
    let size = 1usize << n;
    let mut g = BinaryMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            if i & j == j {
                g.set(i, j, true);
            }
        }
    }
    Ok(g)
}

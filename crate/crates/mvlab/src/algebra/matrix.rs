//! Dense matrices of exact rationals and fraction-free rank computation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A dense rows×cols matrix of `BigRational` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    /// Matrix with the given rows kept (in order).
    pub fn take_rows(&self, rows: &[usize]) -> RationalMatrix {
        Self::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// Return a copy with one row multiplied by a scalar.
    pub fn scale_row(&self, row: usize, c: &BigRational) -> RationalMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| {
            if i == row {
                self.get(i, j) * c
            } else {
                self.get(i, j).clone()
            }
        })
    }

    /// Exact rank over the rationals.
    ///
    /// Denominators are cleared row by row (row scaling preserves rank), and
    /// the resulting integer matrix is reduced by Bareiss fraction-free
    /// elimination. Pivots are chosen per column with the smallest bit size
    /// to keep intermediate entries small. No rounding anywhere.
    pub fn rank_exact(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    lcm = lcm.lcm(self.get(i, j).denom());
                }
                (0..self.cols)
                    .map(|j| {
                        let e = self.get(i, j);
                        (e * BigRational::from_integer(lcm.clone())).to_integer()
                    })
                    .collect()
            })
            .collect();
        bareiss_rank(&mut m)
    }
}

/// Rank of an integer matrix by one-step Bareiss elimination with column
/// skipping. All divisions are exact.
fn bareiss_rank(m: &mut [Vec<BigInt>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0usize;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        // Smallest-bitsize nonzero pivot in this column.
        let pivot_row = (rank..rows)
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| m[i][col].magnitude().bits());
        let Some(p) = pivot_row else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let num = &m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j];
                let (q, r) = num.div_rem(&prev);
                assert!(r.is_zero(), "fraction-free elimination division not exact");
                m[i][j] = q;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

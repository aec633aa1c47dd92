//! Sparse matrices over the integers.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Bound;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major sparse integer matrix. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseIntegerMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl fmt::Debug for SparseIntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for c in 0..self.cols {
                write!(f, " {}", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl SparseIntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntegerMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (c, x) in row.iter().enumerate() {
                m.set(r, c, x.clone().into());
            }
        }
        m
    }

    pub fn from_dense(dense: &[Vec<BigInt>], rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (r, row) in dense.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    m.entries.insert((r, c), x.clone());
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, x: BigInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if x.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), x);
        }
    }

    pub fn add_at(&mut self, r: usize, c: usize, x: &BigInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if x.is_zero() {
            return;
        }
        let e = self.entries.entry((r, c)).or_default();
        *e += x;
        if e.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.entries.iter().map(|(&(r, c), x)| (r, c, x))
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &BigInt)> + '_ {
        self.entries
            .range((Bound::Included((r, 0)), Bound::Excluded((r + 1, 0))))
            .map(|(&(_, c), x)| (c, x))
    }

    pub fn column(&self, c: usize) -> BTreeMap<usize, BigInt> {
        self.entries
            .iter()
            .filter(|((_, cc), _)| *cc == c)
            .map(|(&(r, _), x)| (r, x.clone()))
            .collect()
    }

    /// All columns as sparse vectors.
    pub fn columns(&self) -> Vec<BTreeMap<usize, BigInt>> {
        let mut cols = vec![BTreeMap::new(); self.cols];
        for (&(r, c), x) in &self.entries {
            cols[c].insert(r, x.clone());
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        SparseIntegerMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(r, c), x)| ((c, r), x.clone())).collect(),
        }
    }

    pub fn mul(&self, rhs: &SparseIntegerMatrix) -> SparseIntegerMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (&(r, k), x) in &self.entries {
            for (c, y) in rhs.row(k) {
                out.add_at(r, c, &(x * y));
            }
        }
        out
    }

    pub fn add(&self, rhs: &SparseIntegerMatrix) -> SparseIntegerMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sum");
        let mut out = self.clone();
        for (&(r, c), x) in &rhs.entries {
            out.add_at(r, c, x);
        }
        out
    }

    pub fn sub(&self, rhs: &SparseIntegerMatrix) -> SparseIntegerMatrix {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> SparseIntegerMatrix {
        SparseIntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(k, x)| (*k, -x)).collect(),
        }
    }

    pub fn apply(&self, v: &BTreeMap<usize, BigInt>) -> BTreeMap<usize, BigInt> {
        let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (&(r, c), x) in &self.entries {
            if let Some(y) = v.get(&c) {
                *out.entry(r).or_default() += x * y;
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(r, c), x) in &self.entries {
            d[r][c] = x.clone();
        }
        d
    }

    /// Submatrix on the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseIntegerMatrix {
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = Self::zeros(rows.len(), cols.len());
        for (&(r, c), x) in &self.entries {
            if let (Some(&i), Some(&j)) = (row_pos.get(&r), col_pos.get(&c)) {
                out.entries.insert((i, j), x.clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v.div_floor(&prev);
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(r, c)| r == c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = SparseIntegerMatrix::from_rows(&[vec![1, 2], vec![0, 3]]);
        let b = SparseIntegerMatrix::from_rows(&[vec![4, 0], vec![1, -1]]);
        assert_eq!(a.mul(&b), SparseIntegerMatrix::from_rows(&[vec![6, -2], vec![3, -3]]));
        assert_eq!(a.transpose().get(1, 0), BigInt::from(2));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn determinants() {
        let a = SparseIntegerMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(a.determinant(), BigInt::from(-8));
        let p = SparseIntegerMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(p.determinant(), BigInt::from(1));
        let s = SparseIntegerMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(s.determinant(), BigInt::from(-1));
        assert!(s.is_unimodular());
        let z = SparseIntegerMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(z.determinant().is_zero());
    }
}

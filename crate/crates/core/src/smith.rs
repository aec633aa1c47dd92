//! Smith normal form over the integers.
//!
//! The reduction always pivots on the nonzero entry of smallest absolute
//! value, breaking ties by `(row, col)` order, so results are reproducible.

use alloc::vec::Vec;
use core::mem;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::SparseIntegerMatrix;

/// `M = U · D · V` with `U`, `V` unimodular and `D` diagonal with
/// nonnegative entries `d_1 | d_2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: SparseIntegerMatrix,
    pub d: SparseIntegerMatrix,
    pub v: SparseIntegerMatrix,
    pub u_inv: SparseIntegerMatrix,
    pub v_inv: SparseIntegerMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        diagonal(&self.d)
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn diagonal(d: &SparseIntegerMatrix) -> Vec<BigInt> {
    (0..d.rows().min(d.cols()))
        .map(|i| d.get(i, i))
        .take_while(|x| !x.is_zero())
        .collect()
}

struct Reducer {
    a: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
    // left = L, left_inv = L^{-1}, right = R, right_inv = R^{-1}, L·M·R = a
    transforms: Option<[Vec<Vec<BigInt>>; 4]>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn swap_cols(m: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in m {
        row.swap(i, j);
    }
}

/// row[dst] += q * row[src]
fn axpy_row(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if dst == src || q.is_zero() {
        return;
    }
    let src_row = mem::take(&mut m[src]);
    for (x, y) in m[dst].iter_mut().zip(&src_row) {
        if !y.is_zero() {
            *x += q * y;
        }
    }
    m[src] = src_row;
}

/// col[dst] += q * col[src]
fn axpy_col(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if dst == src || q.is_zero() {
        return;
    }
    for row in m {
        if !row[src].is_zero() {
            let add = q * &row[src];
            row[dst] += add;
        }
    }
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some([l, linv, _, _]) = &mut self.transforms {
            l.swap(i, j);
            swap_cols(linv, i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_cols(&mut self.a, i, j);
        if let Some([_, _, r, rinv]) = &mut self.transforms {
            swap_cols(r, i, j);
            rinv.swap(i, j);
        }
    }

    /// row[dst] += q row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        axpy_row(&mut self.a, dst, src, q);
        if let Some([l, linv, _, _]) = &mut self.transforms {
            axpy_row(l, dst, src, q);
            axpy_col(linv, src, dst, &-q);
        }
    }

    /// col[dst] += q col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        axpy_col(&mut self.a, dst, src, q);
        if let Some([_, _, r, rinv]) = &mut self.transforms {
            axpy_col(r, dst, src, q);
            axpy_row(rinv, src, dst, &-q);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -mem::take(x);
        }
        if let Some([l, linv, _, _]) = &mut self.transforms {
            for x in &mut l[i] {
                *x = -mem::take(x);
            }
            for row in linv.iter_mut() {
                row[i] = -mem::take(&mut row[i]);
            }
        }
    }

    /// Smallest nonzero entry of the trailing block starting at `t`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for r in t..self.rows {
            for c in t..self.cols {
                let x = &self.a[r][c];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((br, bc)) if self.a[br][bc].magnitude() <= x.magnitude() => {}
                    _ => best = Some((r, c)),
                }
            }
        }
        best
    }

    fn reduce(&mut self) {
        let n = self.rows.min(self.cols);
        for t in 0..n {
            let Some((pr, pc)) = self.min_pivot(t) else {
                break;
            };
            self.swap_rows(t, pr);
            self.swap_cols(t, pc);
            loop {
                // clear column t below the pivot
                let mut dirty = false;
                for r in t + 1..self.rows {
                    if self.a[r][t].is_zero() {
                        continue;
                    }
                    let q = self.a[r][t].div_floor(&self.a[t][t]);
                    self.add_row(r, t, &-q);
                    if !self.a[r][t].is_zero() {
                        dirty = true;
                    }
                }
                for c in t + 1..self.cols {
                    if self.a[t][c].is_zero() {
                        continue;
                    }
                    let q = self.a[t][c].div_floor(&self.a[t][t]);
                    self.add_col(c, t, &-q);
                    if !self.a[t][c].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // move the smallest remainder in row or column t to the pivot
                    let mut best = (t, t);
                    for r in t + 1..self.rows {
                        let x = &self.a[r][t];
                        if !x.is_zero() && x.magnitude() < self.a[best.0][best.1].magnitude() {
                            best = (r, t);
                        }
                    }
                    for c in t + 1..self.cols {
                        let x = &self.a[t][c];
                        if !x.is_zero() && x.magnitude() < self.a[best.0][best.1].magnitude() {
                            best = (t, c);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                // row and column are clear; enforce divisibility of the rest
                let bad = (t + 1..self.rows).find_map(|r| {
                    (t + 1..self.cols)
                        .find(|&c| !(&self.a[r][c] % &self.a[t][t]).is_zero())
                        .map(|_| r)
                });
                match bad {
                    Some(r) => self.add_row(t, r, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

fn run(m: &SparseIntegerMatrix, with_transforms: bool) -> Reducer {
    let (rows, cols) = m.shape();
    let mut red = Reducer {
        a: m.to_dense(),
        rows,
        cols,
        transforms: with_transforms.then(|| [identity(rows), identity(rows), identity(cols), identity(cols)]),
    };
    red.reduce();
    red
}

/// Full decomposition with change-of-basis matrices.
pub fn smith_normal_form(m: &SparseIntegerMatrix) -> SmithDecomposition {
    let (rows, cols) = m.shape();
    let red = run(m, true);
    let [l, linv, r, rinv] = red.transforms.expect("transforms requested");
    SmithDecomposition {
        d: SparseIntegerMatrix::from_dense(&red.a, rows, cols),
        u: SparseIntegerMatrix::from_dense(&linv, rows, rows),
        u_inv: SparseIntegerMatrix::from_dense(&l, rows, rows),
        v: SparseIntegerMatrix::from_dense(&rinv, cols, cols),
        v_inv: SparseIntegerMatrix::from_dense(&r, cols, cols),
    }
}

/// Nonzero invariant factors only; skips the change-of-basis bookkeeping.
pub fn invariant_factors(m: &SparseIntegerMatrix) -> Vec<BigInt> {
    let (rows, cols) = m.shape();
    let red = run(m, false);
    diagonal(&SparseIntegerMatrix::from_dense(&red.a, rows, cols))
}

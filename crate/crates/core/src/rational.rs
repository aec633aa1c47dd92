//! Rank and Betti numbers over the rationals, by fraction-free elimination.
//! Used as an independent oracle next to the integral computations.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::chain::ChainComplexData;
use crate::matrix::SparseIntegerMatrix;

/// Rank over ℚ.
pub fn rank(m: &SparseIntegerMatrix) -> usize {
    let mut a = m.to_dense();
    let (rows, cols) = m.shape();
    let mut r = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[i][j] * &a[r][c] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Betti numbers over ℚ in degrees `0..dims`.
pub fn betti_numbers(cc: &ChainComplexData, reduced: bool) -> Vec<usize> {
    let dims = cc.dims();
    let ranks: Vec<usize> = (0..=dims)
        .map(|q| match q {
            0 => usize::from(reduced && cc.rank(0) > 0),
            q if q == dims => 0,
            q => rank(cc.boundary(q)),
        })
        .collect();
    (0..dims).map(|q| cc.rank(q) - ranks[q] - ranks[q + 1]).collect()
}

/// Vanishing of reduced rational homology.
pub fn is_rationally_acyclic(cc: &ChainComplexData) -> bool {
    cc.rank(0) > 0 && betti_numbers(cc, true).iter().all(|&b| b == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ranks() {
        let m = SparseIntegerMatrix::from_rows(&[vec![2, 4, 1], vec![6, 12, 3], vec![0, 1, 5]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&SparseIntegerMatrix::zeros(3, 2)), 0);
        let h = SparseIntegerMatrix::from_rows(&[vec![0, 3], vec![5, 0]]);
        assert_eq!(rank(&h), 2);
    }
}

//! Exact Gaussian elimination over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

type RatMat = Vec<Vec<BigRational>>;

/// Solve A x = b exactly. Works for any consistent system (free variables are
/// set to zero); returns None when the system is inconsistent.
pub fn rat_solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    assert_eq!(b.len(), m);
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: RatMat = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        if row == m {
            break;
        }
        let Some(p) = (row..m).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(row, p);
        let inv = aug[row][col].recip();
        for x in aug[row][col..].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != row && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in col..=n {
                    let sub = &f * &aug[row][j];
                    aug[i][j] -= sub;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    // inconsistency: a zero row with nonzero rhs
    for i in row..m {
        if !aug[i][n].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for &(r, c) in &pivots {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// Exact inverse of a square rational matrix; None when singular.
pub fn rat_inverse(a: &[Vec<BigRational>]) -> Option<RatMat> {
    let n = a.len();
    let mut aug: RatMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            r
        })
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !aug[i][col].is_zero()) else {
            return None;
        };
        aug.swap(col, p);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in 0..2 * n {
                    let sub = &f * &aug[col][j];
                    aug[i][j] -= sub;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Exact determinant of a square rational matrix.
pub fn rat_det(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m: RatMat = a.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det *= &m[col][col].clone();
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for i in col + 1..n {
            if !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..n {
                    let sub = &f * &m[col][j];
                    m[i][j] -= sub;
                }
            }
        }
    }
    det
}

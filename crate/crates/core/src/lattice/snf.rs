//! Smith normal form over the integers with full transform tracking.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// U * A * V = D with U, V unimodular and D diagonal, d_k | d_{k+1}.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).take_while(|&i| !self.d[(i, i)].is_zero()).count()
    }

    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.d[(i, i)].clone()).collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (r, c) = (a.rows(), a.cols());
    assert!(r > 0 && c > 0, "smith_normal_form: empty matrix");
    let mut d = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    let n = r.min(c);
    for k in 0..n {
        if !move_pivot(&mut d, &mut u, &mut v, k) {
            break;
        }
        // Clear row k and column k; each pass strictly shrinks the pivot,
        // so this terminates.
        loop {
            let mut dirty = false;
            for i in k + 1..r {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let q = d[(i, k)].div_floor(&d[(k, k)]);
                d.add_row_multiple(i, k, &-q.clone());
                u.add_row_multiple(i, k, &-q);
                if !d[(i, k)].is_zero() {
                    d.swap_rows(i, k);
                    u.swap_rows(i, k);
                    dirty = true;
                }
            }
            for j in k + 1..c {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let q = d[(k, j)].div_floor(&d[(k, k)]);
                d.add_col_multiple(j, k, &-q.clone());
                v.add_col_multiple(j, k, &-q);
                if !d[(k, j)].is_zero() {
                    d.swap_cols(j, k);
                    v.swap_cols(j, k);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
    }

    // Divisibility chain d_k | d_{k+1}.
    loop {
        let mut fixed = true;
        for k in 0..n.saturating_sub(1) {
            let (a_k, a_n) = (d[(k, k)].clone(), d[(k + 1, k + 1)].clone());
            if a_k.is_zero() || a_n.is_zero() {
                continue;
            }
            if (&a_n % &a_k).is_zero() {
                continue;
            }
            fixed = false;
            // Fold d_{k+1} into column k and re-diagonalise the 2x2 block.
            d.add_col_multiple(k, k + 1, &BigInt::from(1));
            v.add_col_multiple(k, k + 1, &BigInt::from(1));
            loop {
                let pivot = d[(k, k)].clone();
                if d[(k + 1, k)].is_zero() && d[(k, k + 1)].is_zero() {
                    break;
                }
                if !d[(k + 1, k)].is_zero() {
                    let q = d[(k + 1, k)].div_floor(&pivot);
                    d.add_row_multiple(k + 1, k, &-q.clone());
                    u.add_row_multiple(k + 1, k, &-q);
                    if !d[(k + 1, k)].is_zero() {
                        d.swap_rows(k + 1, k);
                        u.swap_rows(k + 1, k);
                    }
                }
                if !d[(k, k + 1)].is_zero() {
                    let q = d[(k, k + 1)].div_floor(&d[(k, k)]);
                    d.add_col_multiple(k + 1, k, &-q.clone());
                    v.add_col_multiple(k + 1, k, &-q);
                    if !d[(k, k + 1)].is_zero() {
                        d.swap_cols(k + 1, k);
                        v.swap_cols(k + 1, k);
                    }
                }
            }
            if d[(k, k)].is_negative() {
                d.negate_row(k);
                u.negate_row(k);
            }
            if d[(k + 1, k + 1)].is_negative() {
                d.negate_row(k + 1);
                u.negate_row(k + 1);
            }
        }
        if fixed {
            break;
        }
    }

    SmithDecomposition { u, d, v }
}

/// Bring a nonzero pivot of smallest absolute value to (k, k).
/// Returns false when the trailing submatrix is zero.
fn move_pivot(d: &mut IntMatrix, u: &mut IntMatrix, v: &mut IntMatrix, k: usize) -> bool {
    let mut best: Option<(usize, usize)> = None;
    for i in k..d.rows() {
        for j in k..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if d[(i, j)].abs() < d[(bi, bj)].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    match best {
        None => false,
        Some((i, j)) => {
            d.swap_rows(i, k);
            u.swap_rows(i, k);
            d.swap_cols(j, k);
            v.swap_cols(j, k);
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn check_decomposition(a: &IntMatrix) {
        let s = smith_normal_form(a);
        assert!(s.u.is_unimodular(), "U not unimodular");
        assert!(s.v.is_unimodular(), "V not unimodular");
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U*A*V != D");
        let n = a.rows().min(a.cols());
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(s.d[(i, j)].is_zero(), "D not diagonal");
                }
            }
            assert!(!s.d[(i, i)].is_negative());
        }
        for i in 0..s.rank().saturating_sub(1) {
            assert!(
                (&s.d[(i + 1, i + 1)] % &s.d[(i, i)]).is_zero(),
                "divisibility chain broken"
            );
        }
        // invariant-factor oracle: d_1*...*d_k = gcd of k x k minors
        let mut prod = BigInt::one();
        for k in 1..=s.rank() {
            prod *= &s.d[(k - 1, k - 1)];
            assert_eq!(prod, a.minor_gcd(k), "minor-gcd oracle mismatch at k={k}");
        }
        assert!(a.minor_gcd(s.rank() + 1).is_zero() || s.rank() == n);
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.d[(0, 0)], BigInt::from(1));
        assert_eq!(s.d[(1, 1)], BigInt::from(6));
        check_decomposition(&a);
    }

    #[test]
    fn identity_is_fixed() {
        let a = IntMatrix::identity(3);
        let s = smith_normal_form(&a);
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(s.u, IntMatrix::identity(3));
        assert_eq!(s.v, IntMatrix::identity(3));
    }

    #[test]
    fn kp2_ray_matrix_is_surjective() {
        // rays of the local P^2 fan as columns of a 3x4 matrix
        let a = IntMatrix::from_rows(&[
            vec![1, 0, -1, 0],
            vec![0, 1, -1, 0],
            vec![1, 1, 1, 1],
        ]);
        let s = smith_normal_form(&a);
        assert_eq!(s.invariant_factors(), vec![BigInt::one(); 3]);
        check_decomposition(&a);
    }

    #[test]
    fn random_matrices_roundtrip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            let r = rng.gen_range(1..=5);
            let c = rng.gen_range(1..=5);
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            check_decomposition(&IntMatrix::from_rows(&rows));
        }
    }
}

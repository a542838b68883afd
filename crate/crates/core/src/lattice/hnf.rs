//! Row-style Hermite normal form and integer kernel bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::snf::smith_normal_form;
use super::IntMatrix;

/// Row-style Hermite normal form: U * A = H with U unimodular, H in row
/// echelon form with positive pivots and entries above each pivot reduced
/// into [0, pivot).
pub fn hermite_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (r, c) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(r);
    let mut pivot_row = 0usize;

    for col in 0..c {
        if pivot_row == r {
            break;
        }
        // gcd-reduce the column below pivot_row to a single entry
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..r {
                if h[(i, col)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if h[(i, col)].abs() < h[(b, col)].abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..r {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
                h.add_row_multiple(i, pivot_row, &-q.clone());
                u.add_row_multiple(i, pivot_row, &-q);
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        // reduce the entries above the pivot
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
            if !q.is_zero() {
                h.add_row_multiple(i, pivot_row, &-q.clone());
                u.add_row_multiple(i, pivot_row, &-q);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Hermite-canonical Z-basis of { v : A v = 0 }.
///
/// The raw kernel comes from the Smith decomposition (trailing columns of V);
/// the HNF pass makes the output deterministic.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(a);
    let rank = s.rank();
    let c = a.cols();
    if rank == c {
        return Vec::new();
    }
    let raw: Vec<Vec<BigInt>> = (rank..c).map(|j| s.v.column(j)).collect();
    let k = IntMatrix::from_columns(&raw).transpose();
    let (h, _) = hermite_normal_form(&k);
    (0..h.rows())
        .map(|i| h.row(i).to_vec())
        .filter(|row| row.iter().any(|x| !x.is_zero()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn is_row_echelon_canonical(h: &IntMatrix) -> bool {
        let mut last_pivot: i64 = -1;
        for i in 0..h.rows() {
            let pivot = (0..h.cols()).find(|&j| !h[(i, j)].is_zero());
            match pivot {
                None => {
                    // all later rows must be zero too
                    for k in i..h.rows() {
                        if (0..h.cols()).any(|j| !h[(k, j)].is_zero()) {
                            return false;
                        }
                    }
                    return true;
                }
                Some(j) => {
                    if (j as i64) <= last_pivot || h[(i, j)].is_negative() {
                        return false;
                    }
                    for k in 0..i {
                        let e = &h[(k, j)];
                        if e.is_negative() || e >= &h[(i, j)] {
                            return false;
                        }
                    }
                    last_pivot = j as i64;
                }
            }
        }
        true
    }

    #[test]
    fn single_row_is_already_hermite() {
        // A row lattice spanned by one vector cannot be reduced further by
        // unimodular row operations.
        let a = IntMatrix::from_rows(&[vec![4, 6]]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(h, a);
        assert!(u.is_unimodular());
    }

    #[test]
    fn identity_fixed_and_primitive_row_fixed() {
        let a = IntMatrix::identity(3);
        let (h, _) = hermite_normal_form(&a);
        assert_eq!(h, a);
        let a = IntMatrix::from_rows(&[vec![1, 1, -2]]);
        let (h, _) = hermite_normal_form(&a);
        assert_eq!(h, a);
    }

    #[test]
    fn hnf_properties_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let r = rng.gen_range(1..=5);
            let c = rng.gen_range(1..=5);
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let a = IntMatrix::from_rows(&rows);
            let (h, u) = hermite_normal_form(&a);
            assert!(u.is_unimodular());
            assert_eq!(u.mul(&a), h);
            assert!(is_row_echelon_canonical(&h), "not canonical:\n{h}");
        }
    }

    #[test]
    fn kernel_of_kp2_ray_matrix() {
        let a = IntMatrix::from_rows(&[
            vec![1, 0, -1, 0],
            vec![0, 1, -1, 0],
            vec![1, 1, 1, 1],
        ]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        let expect: Vec<BigInt> = [1, 1, 1, -3].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(k[0], expect);
    }

    #[test]
    fn kernel_of_kp1_ray_matrix() {
        let a = IntMatrix::from_rows(&[vec![1, -1, 0], vec![1, 1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        let expect: Vec<BigInt> = [1, 1, -2].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(k[0], expect);
    }

    #[test]
    fn invertible_matrix_has_trivial_kernel() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert!(kernel_basis(&a).is_empty());
    }

    #[test]
    fn kernel_vectors_annihilate_and_span() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let r = rng.gen_range(1..=4);
            let c = rng.gen_range(1..=5);
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-5..=5)).collect())
                .collect();
            let a = IntMatrix::from_rows(&rows);
            let kb = kernel_basis(&a);
            for v in &kb {
                assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            // brute force small kernel vectors and express them in the basis
            if c <= 3 && !kb.is_empty() {
                let k = IntMatrix::from_rows(
                    &kb.iter()
                        .map(|v| v.iter().map(|x| i64::try_from(x).unwrap()).collect())
                        .collect::<Vec<Vec<i64>>>(),
                )
                .transpose();
                let mut probe = vec![0i64; c];
                loop {
                    let vec: Vec<BigInt> = probe.iter().map(|&x| BigInt::from(x)).collect();
                    if a.mul_vec(&vec).iter().all(|x| x.is_zero()) {
                        // solve K * t = vec over Q and demand integrality
                        let krat = k.to_rational_rows();
                        let target: Vec<_> = vec
                            .iter()
                            .map(|x| num_rational::BigRational::from_integer(x.clone()))
                            .collect();
                        let sol = crate::lattice::rat_solve(&krat, &target)
                            .expect("kernel member must be spanned");
                        for t in sol {
                            assert!(t.denom().is_one(), "non-integer combination");
                        }
                    }
                    // odometer over [-5, 5]^c
                    let mut i = 0;
                    loop {
                        if i == c {
                            break;
                        }
                        probe[i] += 1;
                        if probe[i] <= 5 {
                            break;
                        }
                        probe[i] = -5;
                        i += 1;
                    }
                    if i == c {
                        break;
                    }
                }
            }
        }
    }
}

//! Small numeric kernels: dense solves, Gauss-Legendre nodes, and a
//! Durand-Kerner univariate root finder. Desk-scale dimensions only.

use num_complex::Complex64;

/// Solve a dense complex system by Gaussian elimination with partial
/// (max-modulus) pivoting. None when numerically singular.
pub fn complex_solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let mut m: Vec<Vec<Complex64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for col in 0..n {
        let (p, pmax) = (col..n)
            .map(|i| (i, m[i][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pmax < 1e-300 {
            return None;
        }
        m.swap(col, p);
        let inv = m[col][col].inv();
        for j in col..=n {
            m[col][j] *= inv;
        }
        for i in 0..n {
            if i != col && m[i][col].norm() > 0.0 {
                let f = m[i][col];
                for j in col..=n {
                    let sub = f * m[col][j];
                    m[i][j] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

/// Real dense solve, same scheme.
pub fn real_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let ac: Vec<Vec<Complex64>> = a
        .iter()
        .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let bc: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    complex_solve(&ac, &bc).map(|x| x.into_iter().map(|c| c.re).collect())
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// All roots of a univariate complex polynomial given by ascending
/// coefficients (constant first). Leading/trailing zero coefficients are the
/// caller's business; the leading coefficient must be nonzero.
pub fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    assert!(deg >= 1, "constant polynomial has no roots");
    let lead = coeffs[deg];
    assert!(lead.norm() > 0.0, "leading coefficient vanishes");
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            v = v * z + c;
        }
        v
    };
    // radius bound: 1 + max |a_k|
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| seed.powu(k as u32 + 1) * radius.max(1.0))
        .collect();
    for _ in 0..500 {
        let mut shift = 0.0_f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-14 {
            break;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// 17-significant-digit decimal form, stable across runs and platforms.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

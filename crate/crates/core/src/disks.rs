//! Quasidisk evaluation and enumeration over moment fibers.
//!
//! Holomorphic disks with boundary on the standard torus over an interior
//! point x are Blaschke products per coordinate; degree data gives the Maslov
//! index and the symplectic area, and the weighted count of index-2 disks
//! assembles the superpotential and the chamber central charges. The area
//! form is normalized to twice the flat one so that the basic disk in
//! direction i has area exactly ell_i(x).

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fan::{FanData, KahlerData, MomentPolytope};
use crate::fibration::AmbientPoint;
use crate::laurent::LaurentPolynomial;
use crate::mirror::MirrorFamily;
use crate::numeric::{complex_solve, durand_kerner, gauss_legendre};
use crate::qexpr::QExpr;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("base point is not interior: ell_{0} <= 0")]
    OutsidePolytope(usize),
    #[error("Blaschke center {0} of factor {1} lies outside the open unit disk")]
    CenterOutsideDisk(usize, usize),
    #[error("quadrature did not converge: orders {0} and {1} differ by {2:.3e} relative")]
    QuadratureUnconverged(usize, usize, f64),
}

/// A holomorphic quasidisk over the fiber at x: boundary radii from the
/// support values, winding degrees d_i, Blaschke centers and boundary phases.
#[derive(Debug, Clone)]
pub struct BlaschkeDisk {
    /// |X_i|^2 on the boundary torus, i.e. ell_i(x)/2pi, exact.
    pub radii_sq: Vec<BigRational>,
    pub degrees: Vec<usize>,
    /// centers[i] has length degrees[i], all inside the open unit disk
    pub centers: Vec<Vec<Complex64>>,
    /// unit phase per factor
    pub phases: Vec<Complex64>,
}

impl BlaschkeDisk {
    pub fn at_point(
        poly: &MomentPolytope,
        x: &[BigRational],
        degrees: Vec<usize>,
        centers: Vec<Vec<Complex64>>,
        phases: Vec<Complex64>,
    ) -> Result<Self, DiskError> {
        let radii_sq = poly.support_values(x);
        for (i, s) in radii_sq.iter().enumerate() {
            if !s.is_positive() {
                return Err(DiskError::OutsidePolytope(i + 1));
            }
        }
        assert_eq!(degrees.len(), radii_sq.len());
        assert_eq!(centers.len(), radii_sq.len());
        assert_eq!(phases.len(), radii_sq.len());
        for (i, cs) in centers.iter().enumerate() {
            assert_eq!(cs.len(), degrees[i], "factor {i} needs degrees[i] centers");
            for (k, a) in cs.iter().enumerate() {
                if a.norm() >= 1.0 {
                    return Err(DiskError::CenterOutsideDisk(k, i));
                }
            }
        }
        let phases = phases.into_iter().map(|p| p / p.norm()).collect();
        Ok(BlaschkeDisk { radii_sq, degrees, centers, phases })
    }

    /// Seeded random disk with total degree <= max_total, centers in the
    /// disk of radius 0.85 (keeps the quadrature integrand tame).
    pub fn random(
        poly: &MomentPolytope,
        x: &[BigRational],
        rng: &mut impl Rng,
        max_total: usize,
    ) -> Result<Self, DiskError> {
        let m = poly.fan.num_rays();
        let total = rng.gen_range(0..=max_total);
        let mut degrees = vec![0usize; m];
        for _ in 0..total {
            degrees[rng.gen_range(0..m)] += 1;
        }
        let centers: Vec<Vec<Complex64>> = degrees
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|_| {
                        let r = 0.85 * rng.gen_range(0.0_f64..1.0).sqrt();
                        let t = rng.gen_range(0.0..TWO_PI);
                        Complex64::from_polar(r, t)
                    })
                    .collect()
            })
            .collect();
        let phases = (0..m)
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..TWO_PI)))
            .collect();
        Self::at_point(poly, x, degrees, centers, phases)
    }

    pub fn radii(&self) -> Vec<f64> {
        self.radii_sq.iter().map(|s| s.to_f64().unwrap().sqrt()).collect()
    }

    /// Total winding degree.
    pub fn total_degree(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// ell values at the base point (floats, 2pi multiplied out).
    pub fn ell(&self) -> Vec<f64> {
        self.radii_sq.iter().map(|s| TWO_PI * s.to_f64().unwrap()).collect()
    }
}

fn blaschke_factor(z: Complex64, a: Complex64) -> (Complex64, Complex64) {
    let denom = Complex64::new(1.0, 0.0) - a.conj() * z;
    let value = (z - a) / denom;
    let deriv = (1.0 - a.norm_sqr()) / (denom * denom);
    (value, deriv)
}

/// Evaluate the disk at |z| <= 1, componentwise Blaschke products.
pub fn evaluate_disk(disk: &BlaschkeDisk, z: Complex64) -> AmbientPoint {
    let radii = disk.radii();
    let coords = disk
        .centers
        .iter()
        .zip(&disk.phases)
        .zip(&radii)
        .map(|((centers, phase), r)| {
            let mut p = *phase;
            for &a in centers {
                p *= blaschke_factor(z, a).0;
            }
            p * r
        })
        .collect();
    AmbientPoint::new(coords)
}

/// Value and z-derivative of every coordinate at z.
fn evaluate_with_derivative(disk: &BlaschkeDisk, z: Complex64) -> Vec<(Complex64, Complex64)> {
    let radii = disk.radii();
    disk.centers
        .iter()
        .zip(&disk.phases)
        .zip(&radii)
        .map(|((centers, phase), r)| {
            let mut p = *phase;
            let mut dp = Complex64::new(0.0, 0.0);
            for &a in centers {
                let (b, db) = blaschke_factor(z, a);
                dp = dp * b + p * db;
                p *= b;
            }
            (p * r, dp * r)
        })
        .collect()
}

/// Maslov index 2 * sum_i d_i.
pub fn maslov_index(disk: &BlaschkeDisk) -> usize {
    2 * disk.total_degree()
}

/// Boundary class d in H_1 of the torus lift (Z^m) and its image
/// sum_i d_i v_i in H_1 of the quotient fiber (Z^n).
pub fn boundary_class(disk: &BlaschkeDisk, fan: &FanData) -> (Vec<i64>, Vec<num_bigint::BigInt>) {
    let class: Vec<i64> = disk.degrees.iter().map(|&d| d as i64).collect();
    let mut image = vec![num_bigint::BigInt::zero(); fan.rank()];
    for (i, &d) in disk.degrees.iter().enumerate() {
        for (k, c) in fan.ray(i).iter().enumerate() {
            image[k] += c * num_bigint::BigInt::from(d);
        }
    }
    (class, image)
}

/// Exact closed-form area sum_i d_i ell_i(x), as a float.
pub fn disk_area_closed_form(disk: &BlaschkeDisk) -> f64 {
    disk.degrees
        .iter()
        .zip(&disk.radii_sq)
        .map(|(&d, s)| d as f64 * TWO_PI * s.to_f64().unwrap())
        .sum()
}

/// Numeric area by polar quadrature of the pulled-back area form
/// (2x flat normalization). Integrates at `order` and `order + 8` radial
/// nodes and demands 1e-6 relative agreement.
pub fn disk_area_numeric(disk: &BlaschkeDisk, order: usize) -> Result<f64, DiskError> {
    assert!(order >= 16, "quadrature order must be at least 16");
    let coarse = area_quadrature(disk, order);
    let fine = area_quadrature(disk, order + 8);
    let scale = fine.abs().max(1e-12);
    let rel = (fine - coarse).abs() / scale;
    if rel > 1e-6 {
        return Err(DiskError::QuadratureUnconverged(order, order + 8, rel));
    }
    Ok(fine)
}

fn area_quadrature(disk: &BlaschkeDisk, order: usize) -> f64 {
    if disk.total_degree() == 0 {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(order);
    let ntheta = 4 * order;
    let dtheta = TWO_PI / ntheta as f64;
    let mut total = 0.0;
    for (xi, wi) in nodes.iter().zip(&weights) {
        let r = 0.5 * (xi + 1.0);
        let wr = 0.5 * wi;
        let mut ring = 0.0;
        for t in 0..ntheta {
            let theta = t as f64 * dtheta;
            let z = Complex64::from_polar(r, theta);
            let g: f64 = evaluate_with_derivative(disk, z)
                .iter()
                .map(|(_, du)| du.norm_sqr())
                .sum();
            ring += g;
        }
        total += wr * ring * dtheta * r;
    }
    2.0 * total
}

/// Flat U(1) brane parameter b in H^1(L; C), declared modulo Z^n.
#[derive(Debug, Clone)]
pub struct BraneParameter {
    pub b: Vec<Complex64>,
}

impl BraneParameter {
    pub fn new(b: Vec<Complex64>) -> Self {
        BraneParameter { b }
    }

    /// Representative with real parts in [0, 1).
    pub fn reduced(&self) -> Self {
        BraneParameter {
            b: self
                .b
                .iter()
                .map(|c| Complex64::new(c.re - c.re.floor(), c.im))
                .collect(),
        }
    }
}

/// The quasimap superpotential at a fiber: m terms with exponents v_i and
/// weights exp(-ell_i(x)).
#[derive(Debug, Clone)]
pub struct Superpotential {
    /// v_i as machine integers.
    pub exponents: Vec<Vec<i64>>,
    /// ell_i(x) in units of 2pi, exact.
    pub areas: Vec<BigRational>,
}

#[derive(Debug, Error)]
pub enum SuperpotentialError {
    #[error("base point is not interior to the moment polytope")]
    OutsidePolytope,
}

pub fn superpotential(
    poly: &MomentPolytope,
    x: &[BigRational],
) -> Result<Superpotential, SuperpotentialError> {
    let areas = poly.support_values(x);
    if areas.iter().any(|s| !s.is_positive()) {
        return Err(SuperpotentialError::OutsidePolytope);
    }
    let exponents = poly
        .fan
        .rays()
        .iter()
        .map(|v| v.iter().map(|c| c.to_i64().expect("ray entry out of range")).collect())
        .collect();
    Ok(Superpotential { exponents, areas })
}

impl Superpotential {
    /// exp(-ell_i(x)).
    pub fn weights(&self) -> Vec<f64> {
        self.areas.iter().map(|s| (-TWO_PI * s.to_f64().unwrap()).exp()).collect()
    }

    /// W(b) = sum_i hol_b(v_i) exp(-ell_i(x)) with holonomy weight
    /// exp(2 pi i <b, v_i>); shifting b by an integer covector fixes every
    /// term, which is the declared lattice periodicity.
    pub fn eval(&self, b: &[Complex64]) -> Complex64 {
        let weights = self.weights();
        self.exponents
            .iter()
            .zip(&weights)
            .map(|(v, &w)| {
                let pairing: Complex64 = v
                    .iter()
                    .zip(b)
                    .map(|(&vi, bi)| bi * vi as f64)
                    .sum();
                (TWO_PI * Complex64::i() * pairing).exp() * w
            })
            .sum()
    }

    /// The same function in the exponentiated coordinates
    /// y_j = exp(2 pi i b_j), where the lattice periodicity is invisible.
    pub fn as_y_polynomial(&self) -> LaurentPolynomial<Complex64> {
        let n = self.exponents.first().map_or(0, |v| v.len());
        let mut p = LaurentPolynomial::zero(n);
        for (v, w) in self.exponents.iter().zip(self.weights()) {
            p.add_term(v.clone(), Complex64::new(w, 0.0));
        }
        p
    }
}

/// Which chamber of the Gross base a fiber sits over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chamber {
    Plus,
    Minus,
}

/// The central charge of the quasimap algebra in mirror coordinates: the
/// single coordinate u over the inner chamber, v^{-1} sum_i C_i z^{w_i} over
/// the outer one. Ambient variable order [u, v, z_1, ..., z_{n-1}].
#[derive(Debug, Clone)]
pub struct CentralChargeExpr {
    pub chamber: Chamber,
    pub expr: LaurentPolynomial<QExpr>,
}

pub fn central_charge(chamber: Chamber, fam: &MirrorFamily) -> CentralChargeExpr {
    let k = fam.curve_vars() + 2;
    let r = fam.num_params();
    let expr = match chamber {
        Chamber::Minus => {
            let mut e = vec![0i64; k];
            e[0] = 1;
            LaurentPolynomial::monomial(e, QExpr::one(r))
        }
        Chamber::Plus => {
            // one term v^{-1} C_i z^{w_i} per basic disk class
            let mut p = LaurentPolynomial::zero(k);
            for (w, c) in fam.frame.w_i64().into_iter().zip(&fam.coefficients) {
                let mut e = vec![0i64; k];
                e[1] = -1;
                e[2..].copy_from_slice(&w);
                p.add_term(e, c.clone());
            }
            p
        }
    };
    CentralChargeExpr { chamber, expr }
}

/// Outcome of the wall-crossing verification.
#[derive(Debug, Clone)]
pub struct WallCrossingReport {
    pub symbolic_ok: bool,
    pub numeric_samples: usize,
    pub numeric_max_rel: f64,
    pub numeric_ok: bool,
    pub chart_samples: usize,
    pub chart_ok: bool,
    pub failures: Vec<String>,
}

impl WallCrossingReport {
    pub fn passed(&self) -> bool {
        self.symbolic_ok && self.numeric_ok && self.chart_ok
    }
}

/// Verify the gluing `u = v^{-1} sum_i C_i z^{w_i}` three ways:
/// (a) as an exact Laurent identity between the chamber central charges and
/// the family, (b) numerically on random chart points, (c) by checking which
/// points of the hypersurface are reachable from each chamber chart.
pub fn wall_crossing_check(
    fam: &MirrorFamily,
    q: &[Complex64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> WallCrossingReport {
    let mut failures = Vec::new();
    let k = fam.curve_vars() + 2;

    // (a) symbolic: (charge_minus - charge_plus) * v == defining polynomial
    let charge_plus = central_charge(Chamber::Plus, fam);
    let charge_minus = central_charge(Chamber::Minus, fam);
    let mut v_shift = vec![0i64; k];
    v_shift[1] = 1;
    let glued = charge_minus
        .expr
        .sub(&charge_plus.expr)
        .shift(&v_shift);
    let symbolic_ok = glued == fam.defining_polynomial();
    if !symbolic_ok {
        failures.push("(a) symbolic gluing identity failed".to_string());
    }

    // (b) numeric: u := v^{-1} f(z) satisfies the mirror equation
    let f = fam.curve_at(q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut numeric_max_rel = 0.0_f64;
    for _ in 0..samples {
        let v = random_unit_annulus(&mut rng);
        let z: Vec<Complex64> = (0..fam.curve_vars())
            .map(|_| random_unit_annulus(&mut rng))
            .collect();
        let fz = f.eval(&z);
        let u = fz / v;
        let residual = (u * v - fz).norm();
        let scale = fz.norm().max(1.0);
        numeric_max_rel = numeric_max_rel.max(residual / scale);
        // the B+ charge evaluated at this chart point must reproduce u
        let charge_val = charge_plus
            .expr
            .specialize_q(q)
            .eval(&ambient_point(u, v, &z));
        numeric_max_rel = numeric_max_rel.max((charge_val - u).norm() / u.norm().max(1.0));
    }
    let numeric_ok = numeric_max_rel < tol;
    if !numeric_ok {
        failures.push(format!("(b) numeric residual {numeric_max_rel:.3e} exceeds {tol:.1e}"));
    }

    // (c) chart cover on the f = 0 locus and off it
    let mut chart_ok = true;
    let mut chart_samples = 0usize;
    if fam.curve_vars() >= 1 {
        for _ in 0..samples {
            let Some(z0) = curve_zero(&f, &mut rng) else {
                continue;
            };
            chart_samples += 1;
            let v = random_unit_annulus(&mut rng);
            let u = random_unit_annulus(&mut rng);
            // (0, v, z0): only the v-chart; (u, 0, z0): only the u-chart;
            // (0, 0, z0): neither
            let cases = [
                (Complex64::new(0.0, 0.0), v, true, false),
                (u, Complex64::new(0.0, 0.0), false, true),
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), false, false),
            ];
            for (cu, cv, expect_plus, expect_minus) in cases {
                let eq_residual = (cu * cv - f.eval(&z0)).norm();
                if eq_residual > 1e-8 {
                    chart_ok = false;
                    failures.push(format!("(c) sampled point off the hypersurface: {eq_residual:.3e}"));
                }
                let in_plus = cv.norm() > 0.0;
                let in_minus = cu.norm() > 0.0;
                if in_plus != expect_plus || in_minus != expect_minus {
                    chart_ok = false;
                    failures.push("(c) chart reachability mismatch".to_string());
                }
            }
        }
        // generic points with u != 0 and v != 0 lie in both charts
        for _ in 0..samples {
            let v = random_unit_annulus(&mut rng);
            let z: Vec<Complex64> = (0..fam.curve_vars())
                .map(|_| random_unit_annulus(&mut rng))
                .collect();
            let u = f.eval(&z) / v;
            if u.norm() > 1e-12 {
                chart_samples += 1;
                // both charts must reach it
                if !(v.norm() > 0.0 && u.norm() > 0.0) {
                    chart_ok = false;
                }
            }
        }
    }
    if !chart_ok && failures.is_empty() {
        failures.push("(c) chart cover failed".to_string());
    }

    WallCrossingReport {
        symbolic_ok,
        numeric_samples: samples,
        numeric_max_rel,
        numeric_ok,
        chart_samples,
        chart_ok,
        failures,
    }
}

fn ambient_point(u: Complex64, v: Complex64, z: &[Complex64]) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(z.len() + 2);
    p.push(u);
    p.push(v);
    p.extend_from_slice(z);
    p
}

fn random_unit_annulus(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..TWO_PI))
}

/// A zero of f with the first variable solved by univariate root finding,
/// the others drawn at random.
fn curve_zero(f: &LaurentPolynomial<Complex64>, rng: &mut impl Rng) -> Option<Vec<Complex64>> {
    let k = f.vars();
    for _ in 0..8 {
        let tail: Vec<Complex64> = (1..k).map(|_| random_unit_annulus(rng)).collect();
        // collect univariate coefficients in z1
        let mut powers: std::collections::BTreeMap<i64, Complex64> = std::collections::BTreeMap::new();
        for (e, c) in f.terms() {
            let mut coeff = *c;
            for (j, &ej) in e[1..].iter().enumerate() {
                if ej != 0 {
                    coeff *= tail[j].powi(ej as i32);
                }
            }
            *powers.entry(e[0]).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        }
        let min_pow = *powers.keys().next()?;
        let max_pow = *powers.keys().last()?;
        if max_pow == min_pow {
            continue;
        }
        let deg = (max_pow - min_pow) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (p, c) in &powers {
            coeffs[(p - min_pow) as usize] = *c;
        }
        if coeffs[deg].norm() < 1e-14 {
            continue;
        }
        for root in durand_kerner(&coeffs) {
            if root.norm() < 1e-8 || root.norm() > 1e8 {
                continue;
            }
            let mut z = vec![root];
            z.extend_from_slice(&tail);
            let scale: f64 = f.terms().map(|(_, c)| c.norm()).sum::<f64>().max(1.0);
            if f.eval(&z).norm() < 1e-8 * scale {
                return Some(z);
            }
        }
    }
    None
}

/// Clifford-chart coordinates of a fiber point: with the gauge-adapted frame
/// the basic-disk terms of the superpotential become C_i v^{-1} z^{w_i}
/// on the nose. Returns (u, v, z) with u the superpotential value.
pub fn clifford_chart_point(
    fan: &FanData,
    kahler: &KahlerData,
    fam: &MirrorFamily,
    x: &[BigRational],
    b: &[Complex64],
) -> (Complex64, Complex64, Vec<Complex64>) {
    let poly = MomentPolytope::new(fan.clone(), kahler.clone());
    let w = superpotential(&poly, x).expect("interior point required");
    let m = fan.num_rays();
    let n = fan.rank();
    let areas = &w.areas;

    // adapted dual coordinates x' = x T^{-1}, b' = b T^{-1}
    let t = &fam.frame.basis_change;
    let trat = t.to_rational_rows();
    let tinv = crate::lattice::rat_inverse(&trat).expect("unimodular");
    let xprime: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| (x[i].clone() * tinv[i][j].clone()).to_f64().unwrap())
                .sum()
        })
        .collect();
    let bprime: Vec<Complex64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| b[i] * tinv[i][j].to_f64().unwrap())
                .sum()
        })
        .collect();

    // v from the last-ray term: term_m = v^{-1}
    let vm = fan.ray(m - 1);
    let b_dot_vm: Complex64 = vm
        .iter()
        .zip(b)
        .map(|(c, bi)| bi * c.to_f64().unwrap())
        .sum();
    let ell_m = TWO_PI * areas[m - 1].to_f64().unwrap();
    let v = (Complex64::new(ell_m, 0.0) - TWO_PI * Complex64::i() * b_dot_vm).exp();

    // z_k = exp(2pi (i b'_k - x'_k + lambda_{i_k} - lambda_m)) over the gauge
    // cone's rays (which the frame sends to the unit w-vectors)
    let lambda_m = kahler.lambda[m - 1].to_f64().unwrap();
    let mut z = vec![Complex64::new(0.0, 0.0); n - 1];
    let wexp = fam.frame.w_i64();
    for &i in &fam.gauge_cone {
        if i == m - 1 {
            continue;
        }
        let k = wexp[i]
            .iter()
            .position(|&c| c == 1)
            .expect("gauge-cone ray maps to a unit vector in the adapted frame");
        let lam = kahler.lambda[i].to_f64().unwrap();
        z[k] = (TWO_PI
            * (Complex64::i() * bprime[k] - Complex64::new(xprime[k] - lam + lambda_m, 0.0)))
        .exp();
    }

    let u = w.eval(b);
    (u, v, z)
}

/// A converged critical point of the log-derivative system.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub point: Vec<Complex64>,
    pub value: Complex64,
    pub grad_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct CriticalSearch {
    pub points: Vec<CriticalPoint>,
    pub attempted: usize,
    pub converged: usize,
    /// Set when no start converged at all.
    pub no_convergence: bool,
}

/// Multiplicative start grid: phases exp(2pi i j/N) times the magnitude
/// ladder {1, sqrt(qmag), qmag} per coordinate; the full product is capped
/// at 4096 starts by deterministic striding.
pub fn newton_start_grid(vars: usize, qmag: f64, phases: usize) -> Vec<Vec<Complex64>> {
    assert!(vars >= 1);
    let mut mags = vec![1.0, qmag.sqrt(), qmag];
    mags.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut options = Vec::new();
    for &m in &mags {
        for j in 0..phases {
            options.push(Complex64::from_polar(m, TWO_PI * j as f64 / phases as f64));
        }
    }
    let per = options.len();
    let total: usize = per.pow(vars as u32);
    let cap = 4096usize;
    let stride = total.div_ceil(cap).max(1);
    let mut starts = Vec::with_capacity(total.min(cap));
    let mut idx = 0usize;
    while idx < total {
        let mut point = Vec::with_capacity(vars);
        let mut rem = idx;
        for _ in 0..vars {
            point.push(options[rem % per]);
            rem /= per;
        }
        starts.push(point);
        idx += stride;
    }
    starts
}

/// Multi-start Newton on `z_j dW/dz_j = 0` over the algebraic torus, in log
/// coordinates. Deterministic given the start list; converged points are
/// deduplicated at distance 10*tol and sorted canonically.
pub fn critical_points(
    w: &LaurentPolynomial<Complex64>,
    starts: &[Vec<Complex64>],
    tol: f64,
) -> CriticalSearch {
    let k = w.vars();
    // gradient tolerance is relative to the sum of term magnitudes at the
    // point: draining a coordinate to 0 or infinity shrinks both at the same
    // rate, so monomial-type directions can never fake convergence
    let local_scale = |z: &[Complex64]| -> f64 {
        w.terms()
            .map(|(e, c)| {
                let mut t = c.norm();
                for (j, &ej) in e.iter().enumerate() {
                    if ej != 0 {
                        t *= z[j].norm().powi(ej as i32);
                    }
                }
                t
            })
            .sum::<f64>()
            .max(1e-300)
    };
    let mag_bounds = starts
        .iter()
        .flat_map(|s| s.iter().map(|c| c.norm()))
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
    let floor = mag_bounds.0 * 1e-6;
    let ceil = mag_bounds.1 * 1e6;

    let mut found: Vec<CriticalPoint> = Vec::new();
    let mut converged = 0usize;
    for start in starts {
        assert_eq!(start.len(), k);
        let mut z = start.clone();
        let mut ok = false;
        let mut iterations = 0usize;
        for iter in 0..64 {
            iterations = iter + 1;
            let g = w.log_gradient(&z);
            let gn = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if gn < tol * local_scale(&z) {
                ok = true;
                break;
            }
            let jac = log_hessian(w, &z);
            let rhs: Vec<Complex64> = g.iter().map(|c| -c).collect();
            let Some(mut delta) = complex_solve(&jac, &rhs) else {
                break;
            };
            let dmax = delta.iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
            if dmax > 2.0 {
                for d in delta.iter_mut() {
                    *d *= 2.0 / dmax;
                }
            }
            for (zj, d) in z.iter_mut().zip(&delta) {
                *zj *= d.exp();
            }
            if z.iter().any(|c| c.norm() < floor || c.norm() > ceil) {
                break;
            }
        }
        if ok {
            converged += 1;
            let g = w.log_gradient(&z);
            let gn = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            found.push(CriticalPoint {
                value: w.eval(&z),
                point: z,
                grad_norm: gn,
                iterations,
            });
        }
    }
    found.sort_by(|a, b| {
        for (x, y) in a.point.iter().zip(&b.point) {
            let c = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut deduped: Vec<CriticalPoint> = Vec::new();
    for p in found {
        let dup = deduped.iter().any(|q| {
            p.point
                .iter()
                .zip(&q.point)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0_f64, f64::max)
                <= 10.0 * tol.max(1e-14)
        });
        if !dup {
            deduped.push(p);
        }
    }
    CriticalSearch {
        no_convergence: deduped.is_empty(),
        points: deduped,
        attempted: starts.len(),
        converged,
    }
}

/// J_{jl} = z_l d/dz_l (z_j dW/dz_j) = sum_a c_a a_j a_l z^a.
fn log_hessian(w: &LaurentPolynomial<Complex64>, z: &[Complex64]) -> Vec<Vec<Complex64>> {
    let k = w.vars();
    let mut jac = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for (e, c) in w.terms() {
        let mut zc = *c;
        for (l, &el) in e.iter().enumerate() {
            if el != 0 {
                zc *= z[l].powi(el as i32);
            }
        }
        for j in 0..k {
            if e[j] == 0 {
                continue;
            }
            for l in 0..k {
                if e[l] != 0 {
                    jac[j][l] += zc * (e[j] as f64) * (e[l] as f64);
                }
            }
        }
    }
    jac
}

/// Per-fiber displaceability verdict.
#[derive(Debug, Clone)]
pub struct FiberVerdict {
    pub x: Vec<BigRational>,
    pub obstructed: bool,
    pub critical_b: Vec<CriticalPoint>,
}

/// For each grid point, search for critical points of the superpotential in
/// the exponentiated brane coordinates. A critical point certifies
/// non-displaceability (the Floer cohomology does not vanish); finding none
/// is inconclusive.
pub fn displaceability_report(
    fan: &FanData,
    kahler: &KahlerData,
    grid: &[Vec<BigRational>],
    tol: f64,
) -> Vec<FiberVerdict> {
    let poly = MomentPolytope::new(fan.clone(), kahler.clone());
    grid.iter()
        .map(|x| {
            let w = superpotential(&poly, x).expect("grid points must be interior");
            let weights = w.weights();
            let wmin = weights.iter().cloned().fold(f64::INFINITY, f64::min);
            let wmax = weights.iter().cloned().fold(0.0_f64, f64::max);
            let qmag = (wmin / wmax).clamp(1e-3, 1.0);
            let starts = newton_start_grid(fan.rank(), qmag, 8);
            let search = critical_points(&w.as_y_polynomial(), &starts, tol);
            FiberVerdict {
                x: x.clone(),
                obstructed: !search.points.is_empty(),
                critical_b: search.points,
            }
        })
        .collect()
}

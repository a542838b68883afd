//! The Gross fibration on the quotient and the Harvey-Lawson fibration
//! upstairs: base embedding, wall and chambers, discriminant graph.
//!
//! Base points carry the adapted-basis convention: the projection along the
//! Calabi-Yau covector drops the last coordinate of `x T^{-1}`; a different
//! complement of span(u) would shear the picture.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fan::{CalabiYauFrame, Codim2Face, FanData, KahlerData, MomentPolytope};
use crate::lattice::{kernel_basis, rat_inverse, rat_solve, IntMatrix, RationalVector};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum FibrationError {
    #[error("point is not on the zero level set: residual {residual:.3e}")]
    NotOnLevelSet { residual: f64 },
    #[error("point lies outside the moment polytope")]
    OutsidePolytope,
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}

/// A point of the ambient flat space, coordinates X_1, ..., X_m.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    pub coords: Vec<Complex64>,
}

impl AmbientPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        assert!(coords.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        AmbientPoint { coords }
    }

    pub fn monomial_product(&self) -> Complex64 {
        self.coords.iter().product()
    }
}

/// Harvey-Lawson fibration value:
/// (|X_1|^2 - |X_m|^2, ..., |X_{m-1}|^2 - |X_m|^2, |X_1...X_m - eps|).
pub fn harvey_lawson(p: &AmbientPoint, eps: Complex64) -> Vec<f64> {
    let m = p.coords.len();
    let last = p.coords[m - 1].norm_sqr();
    let mut out: Vec<f64> = p.coords[..m - 1]
        .iter()
        .map(|c| c.norm_sqr() - last)
        .collect();
    out.push((p.monomial_product() - eps).norm());
    out
}

/// Height coordinate |X_1 ... X_m - eps| alone.
pub fn gross_height(p: &AmbientPoint, eps: Complex64) -> f64 {
    (p.monomial_product() - eps).norm()
}

/// First m-1 coordinates of the base embedding, exact:
/// ((ell_i(x) - ell_m(x)) / 2pi)_{i < m}.
pub fn embed_base_exact(
    poly: &MomentPolytope,
    x: &[BigRational],
) -> Result<Vec<BigRational>, FibrationError> {
    let s = poly.support_values(x);
    if s.iter().any(|v| v.is_negative()) {
        return Err(FibrationError::OutsidePolytope);
    }
    let last = s.last().unwrap().clone();
    Ok(s[..s.len() - 1].iter().map(|v| v - &last).collect())
}

/// The embedding of the Gross base into the Harvey-Lawson base, paired with
/// the (unchanged) height coordinate h.
pub fn embed_base(
    poly: &MomentPolytope,
    x: &[BigRational],
    h: f64,
) -> Result<Vec<f64>, FibrationError> {
    let mut out: Vec<f64> = embed_base_exact(poly, x)?
        .iter()
        .map(|v| v.to_f64().unwrap())
        .collect();
    out.push(h);
    Ok(out)
}

/// Recover the moment coordinates from a point of the zero level set by
/// exact least squares on `<x, v_i> - lambda_i = |X_i|^2`.
#[derive(Debug, Clone)]
pub struct MomentFit {
    pub x: Vec<f64>,
    pub residual: f64,
}

pub fn moment_coordinates(
    p: &AmbientPoint,
    fan: &FanData,
    kahler: &KahlerData,
    tol: f64,
) -> Result<MomentFit, FibrationError> {
    let n = fan.rank();
    let m = fan.num_rays();
    assert_eq!(p.coords.len(), m);
    let rays: Vec<Vec<f64>> = fan
        .rays()
        .iter()
        .map(|v| v.iter().map(|c| c.to_f64().unwrap()).collect())
        .collect();
    let rhs: Vec<f64> = (0..m)
        .map(|i| p.coords[i].norm_sqr() + kahler.lambda[i].to_f64().unwrap())
        .collect();
    // normal equations (V V^T) x = V rhs
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..m {
        for r in 0..n {
            b[r] += rays[i][r] * rhs[i];
            for c in 0..n {
                a[r][c] += rays[i][r] * rays[i][c];
            }
        }
    }
    let x = crate::numeric::real_solve(&a, &b).expect("ray matrix has full rank");
    let residual: f64 = (0..m)
        .map(|i| {
            let fit: f64 = (0..n).map(|r| rays[i][r] * x[r]).sum();
            (fit - rhs[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    if residual > tol {
        return Err(FibrationError::NotOnLevelSet { residual });
    }
    Ok(MomentFit { x, residual })
}

/// One polyhedral piece of the discriminant, V-representation, exact data in
/// the wall slice R^{n-1}.
#[derive(Debug, Clone)]
pub struct DiscriminantPiece {
    /// source codimension-2 stratum {ell_i = ell_j = 0}, 0-based pair
    pub pair: (usize, usize),
    pub vertices: Vec<RationalVector>,
    pub rays: Vec<Vec<BigInt>>,
    pub bounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    Point,
    Segment,
    Ray,
    Line,
    Higher,
}

impl DiscriminantPiece {
    pub fn kind(&self) -> PieceKind {
        match (self.vertices.len(), self.rays.len()) {
            (1, 0) => PieceKind::Point,
            (2, 0) => PieceKind::Segment,
            (1, 1) => PieceKind::Ray,
            (_, 2) => PieceKind::Line,
            _ => PieceKind::Higher,
        }
    }
}

/// Gross base data: dimension, wall height, discriminant pieces in the wall.
#[derive(Debug, Clone)]
pub struct GrossBase {
    pub n: usize,
    pub eps_abs: f64,
    pub pieces: Vec<DiscriminantPiece>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphSummary {
    pub vertices: usize,
    pub points: usize,
    pub bounded_edges: usize,
    pub unbounded_edges: usize,
}

impl GrossBase {
    /// Distinct projected vertices and piece counts by kind.
    pub fn summary(&self) -> GraphSummary {
        let mut verts: Vec<&RationalVector> = Vec::new();
        for p in &self.pieces {
            for v in &p.vertices {
                if !verts.contains(&v) {
                    verts.push(v);
                }
            }
        }
        let count = |k: PieceKind| self.pieces.iter().filter(|p| p.kind() == k).count();
        GraphSummary {
            vertices: verts.len(),
            points: count(PieceKind::Point),
            bounded_edges: count(PieceKind::Segment),
            unbounded_edges: count(PieceKind::Ray) + count(PieceKind::Line),
        }
    }
}

/// Project an exact base point to the wall slice: first n-1 coordinates of
/// `x T^{-1}` in the adapted dual basis.
fn project_to_wall(frame: &CalabiYauFrame, x: &[BigRational]) -> RationalVector {
    let n = x.len();
    let t = frame.basis_change.to_rational_rows();
    let tinv = rat_inverse(&t).expect("frame matrix unimodular");
    (0..n - 1)
        .map(|j| {
            (0..n)
                .map(|i| x[i].clone() * tinv[i][j].clone())
                .fold(BigRational::zero(), |acc, v| acc + v)
        })
        .collect()
}

fn project_direction(frame: &CalabiYauFrame, d: &[BigInt]) -> Vec<BigInt> {
    let n = d.len();
    let t = frame.basis_change.to_rational_rows();
    let tinv = rat_inverse(&t).expect("frame matrix unimodular");
    (0..n - 1)
        .map(|j| {
            let s = (0..n)
                .map(|i| BigRational::from_integer(d[i].clone()) * tinv[i][j].clone())
                .fold(BigRational::zero(), |acc, v| acc + v);
            assert!(s.denom().is_one());
            s.numer().clone()
        })
        .collect()
}

fn primitive(mut d: Vec<BigInt>) -> Vec<BigInt> {
    let g = d.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in d.iter_mut() {
            *x /= &g;
        }
    }
    d
}

/// V-representation (vertices and extreme rays) of one codimension-2 face,
/// by exhaustive active-set enumeration; exact throughout.
fn face_v_representation(
    poly: &MomentPolytope,
    face: &Codim2Face,
) -> (Vec<RationalVector>, Vec<Vec<BigInt>>) {
    let fan = &poly.fan;
    let n = fan.rank();
    let m = fan.num_rays();
    let (i, j) = face.pair;
    let others: Vec<usize> = (0..m).filter(|&k| k != i && k != j).collect();

    let mut vertices: Vec<RationalVector> = Vec::new();
    if n == 2 {
        // the face is a single point
        vertices.push(face.witness.clone());
    } else {
        for subset in subsets_of(&others, n - 2) {
            let mut idx = vec![i, j];
            idx.extend(subset);
            let a: Vec<Vec<BigRational>> = idx
                .iter()
                .map(|&k| {
                    fan.ray(k)
                        .iter()
                        .map(|c| BigRational::from_integer(c.clone()))
                        .collect()
                })
                .collect();
            let b: Vec<BigRational> = idx.iter().map(|&k| poly.kahler.lambda[k].clone()).collect();
            if crate::lattice::rat_det(&a).is_zero() {
                continue;
            }
            let x = rat_solve(&a, &b).expect("nonsingular system");
            if poly.contains(&x) && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
    }

    let mut rays: Vec<Vec<BigInt>> = Vec::new();
    if n >= 3 {
        for subset in subsets_of(&others, n - 3) {
            let mut idx = vec![i, j];
            idx.extend(subset);
            let rows = IntMatrix::from_columns(
                &idx.iter().map(|&k| fan.ray(k).to_vec()).collect::<Vec<_>>(),
            )
            .transpose();
            let kernel = kernel_basis(&rows);
            if kernel.len() != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                let d: Vec<BigInt> = kernel[0].iter().map(|c| c * BigInt::from(sign)).collect();
                let admissible = (0..m).all(|k| !crate::lattice::dot_int(&d, fan.ray(k)).is_negative());
                if admissible {
                    let d = primitive(d);
                    if !rays.contains(&d) {
                        rays.push(d);
                    }
                }
            }
        }
    }
    (vertices, rays)
}

fn subsets_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&p| items[p]).collect());
        let n = items.len();
        let mut t = k;
        loop {
            if t == 0 {
                return out;
            }
            t -= 1;
            if idx[t] != t + n - k {
                break;
            }
            if t == 0 {
                return out;
            }
        }
        idx[t] += 1;
        for s in t + 1..k {
            idx[s] = idx[s - 1] + 1;
        }
    }
}

/// Build the discriminant graph: project each nonempty codimension-2 face
/// into the wall slice (dropping the covector coordinate of the adapted dual
/// basis) and store it at height |eps|.
pub fn discriminant_graph(
    poly: &MomentPolytope,
    frame: &CalabiYauFrame,
    eps_abs: f64,
) -> GrossBase {
    assert!(eps_abs > 0.0, "wall height must be positive");
    let faces = poly.codim2_faces();
    let pieces = faces
        .iter()
        .map(|face| {
            let (verts, rays) = face_v_representation(poly, face);
            let vertices: Vec<RationalVector> = {
                let mut out: Vec<RationalVector> = Vec::new();
                for v in verts {
                    let p = project_to_wall(frame, &v);
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
                out
            };
            let rays: Vec<Vec<BigInt>> = {
                let mut out: Vec<Vec<BigInt>> = Vec::new();
                for d in rays {
                    let p = primitive(project_direction(frame, &d));
                    if p.iter().any(|c| !c.is_zero()) && !out.contains(&p) {
                        out.push(p);
                    }
                }
                out
            };
            DiscriminantPiece { pair: face.pair, vertices, rays, bounded: face.bounded }
        })
        .collect();
    GrossBase { n: poly.fan.rank(), eps_abs, pieces }
}

/// Where a base point sits relative to boundary, wall and chambers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseRegion {
    Boundary,
    Wall,
    ChamberPlus,
    ChamberMinus,
}

/// Classification by the height coordinate; float mode with tolerance.
pub fn classify_height(h: f64, eps_abs: f64, tol: f64) -> BaseRegion {
    let scale = eps_abs.max(1.0);
    if h.abs() <= tol * scale {
        BaseRegion::Boundary
    } else if (h - eps_abs).abs() <= tol * scale {
        BaseRegion::Wall
    } else if h > eps_abs {
        BaseRegion::ChamberPlus
    } else {
        BaseRegion::ChamberMinus
    }
}

/// Exact classification for rational heights.
pub fn classify_height_exact(h: &BigRational, eps_abs: &BigRational) -> BaseRegion {
    if h.is_zero() {
        BaseRegion::Boundary
    } else if h == eps_abs {
        BaseRegion::Wall
    } else if h > eps_abs {
        BaseRegion::ChamberPlus
    } else {
        BaseRegion::ChamberMinus
    }
}

/// Classify a full base point; on the wall also report the distance to the
/// discriminant (pieces of dimension <= 1 only, which covers n <= 3).
pub fn classify_base_point(
    point: &[f64],
    base: &GrossBase,
    tol: f64,
) -> (BaseRegion, Option<f64>) {
    let h = *point.last().expect("base point needs a height coordinate");
    let region = classify_height(h, base.eps_abs, tol);
    if region != BaseRegion::Wall {
        return (region, None);
    }
    let p = &point[..point.len() - 1];
    let mut best: Option<f64> = None;
    for piece in &base.pieces {
        if let Some(d) = piece_distance(piece, p) {
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    (region, best)
}

fn piece_distance(piece: &DiscriminantPiece, p: &[f64]) -> Option<f64> {
    let verts: Vec<Vec<f64>> = piece
        .vertices
        .iter()
        .map(|v| v.iter().map(|c| c.to_f64().unwrap()).collect())
        .collect();
    let rays: Vec<Vec<f64>> = piece
        .rays
        .iter()
        .map(|d| d.iter().map(|c| c.to_f64().unwrap()).collect())
        .collect();
    let dist_point = |a: &[f64]| -> f64 {
        a.iter().zip(p).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    };
    match piece.kind() {
        PieceKind::Point => Some(dist_point(&verts[0])),
        PieceKind::Segment => Some(dist_to_param_line(p, &verts[0], &sub(&verts[1], &verts[0]), 0.0, 1.0)),
        PieceKind::Ray => Some(dist_to_param_line(p, &verts[0], &rays[0], 0.0, f64::INFINITY)),
        PieceKind::Line => {
            let base = verts.first()?;
            Some(dist_to_param_line(p, base, &rays[0], f64::NEG_INFINITY, f64::INFINITY))
        }
        PieceKind::Higher => None,
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dist_to_param_line(p: &[f64], base: &[f64], dir: &[f64], lo: f64, hi: f64) -> f64 {
    let dd: f64 = dir.iter().map(|x| x * x).sum();
    let t: f64 = if dd == 0.0 {
        0.0
    } else {
        p.iter()
            .zip(base)
            .zip(dir)
            .map(|((pi, bi), di)| (pi - bi) * di)
            .sum::<f64>()
            / dd
    };
    let t = t.clamp(lo, hi);
    let q: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + t * d).collect();
    p.iter().zip(&q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Result of the lift-vs-quotient sampling check.
#[derive(Debug, Clone)]
pub struct ChamberReport {
    pub total: usize,
    pub agreed: usize,
    pub max_coord_err: f64,
    pub max_height_err: f64,
    pub wall_case_ok: bool,
}

impl ChamberReport {
    pub fn passed(&self) -> bool {
        self.agreed == self.total && self.wall_case_ok
    }
}

/// Sample random torus lifts over random interior points and confirm that
/// the Harvey-Lawson image matches the embedded base data: first m-1
/// coordinates agree with (ell_i - ell_m)/2pi and the chamber classification
/// of lift and quotient coincide. A final sample is phase-tuned onto the
/// wall and must classify as wall on both sides.
pub fn chamber_compatibility_check(
    fan: &FanData,
    kahler: &KahlerData,
    eps_abs: f64,
    samples: usize,
    seed: u64,
) -> ChamberReport {
    let poly = MomentPolytope::new(fan.clone(), kahler.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = fan.num_rays();
    let eps = Complex64::new(eps_abs, 0.0);
    let mut agreed = 0usize;
    let mut max_coord_err = 0.0_f64;
    let mut max_height_err = 0.0_f64;
    let tol = 1e-12;
    for x in poly.sample_interior(&mut rng, samples) {
        let s = poly.support_values(&x);
        let thetas: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TWO_PI)).collect();
        let lift = AmbientPoint::new(
            s.iter()
                .zip(&thetas)
                .map(|(si, &t)| Complex64::from_polar(si.to_f64().unwrap().sqrt(), t))
                .collect(),
        );
        let hl = harvey_lawson(&lift, eps);
        // quotient route: exact ell differences and product radius
        let expect = embed_base_exact(&poly, &x).unwrap();
        let mut coord_err = 0.0_f64;
        for (a, e) in hl[..m - 1].iter().zip(&expect) {
            coord_err = coord_err.max((a - e.to_f64().unwrap()).abs());
        }
        max_coord_err = max_coord_err.max(coord_err);
        let prod_radius = s
            .iter()
            .fold(BigRational::from_integer(1.into()), |acc, v| acc * v)
            .to_f64()
            .unwrap()
            .sqrt();
        let theta_sum: f64 = thetas.iter().sum();
        let height_quotient = (Complex64::from_polar(prod_radius, theta_sum) - eps).norm();
        let height_err = (hl[m - 1] - height_quotient).abs();
        max_height_err = max_height_err.max(height_err);
        let scale = 1.0 + eps_abs.abs() + prod_radius;
        let same_chamber = classify_height(hl[m - 1], eps_abs, tol)
            == classify_height(height_quotient, eps_abs, tol);
        if coord_err <= tol && height_err <= tol * scale && same_chamber {
            agreed += 1;
        }
    }

    // wall-tuned sample: with |prod X| = R, choose eps = R and the total
    // phase acos(R / 2 eps) = pi/3 so the height is exactly |eps|
    let x = poly.interior_point().unwrap();
    let s = poly.support_values(&x);
    let prod_radius = s
        .iter()
        .fold(BigRational::from_integer(1.into()), |acc, v| acc * v)
        .to_f64()
        .unwrap()
        .sqrt();
    let eps_wall = prod_radius;
    let theta = (std::f64::consts::PI / 3.0) / m as f64;
    let lift = AmbientPoint::new(
        s.iter()
            .map(|si| Complex64::from_polar(si.to_f64().unwrap().sqrt(), theta))
            .collect(),
    );
    let h = gross_height(&lift, Complex64::new(eps_wall, 0.0));
    let wall_case_ok =
        classify_height(h, eps_wall, 1e-12) == BaseRegion::Wall;

    ChamberReport { total: samples, agreed, max_coord_err, max_height_err, wall_case_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{adapted_basis, calabi_yau_vector};
    use crate::samples;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn frame_of(fan: &FanData) -> CalabiYauFrame {
        let u = calabi_yau_vector(fan).unwrap();
        adapted_basis(fan, &u).unwrap()
    }

    #[test]
    fn harvey_lawson_known_values() {
        let p = AmbientPoint::new(vec![Complex64::new(0.0, 0.0); 3]);
        assert_eq!(harvey_lawson(&p, Complex64::new(1.0, 0.0)), vec![0.0, 0.0, 1.0]);
        let p = AmbientPoint::new(vec![Complex64::new(1.0, 0.0); 3]);
        assert_eq!(harvey_lawson(&p, Complex64::new(0.0, 0.0)), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn gross_height_known_values() {
        let p = AmbientPoint::new(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
        ]);
        // product = 1 = eps
        assert!(gross_height(&p, Complex64::new(1.0, 0.0)) < 1e-15);
        let p = AmbientPoint::new(vec![Complex64::new(0.0, 0.0); 2]);
        assert_eq!(gross_height(&p, Complex64::new(2.0, 0.0)), 2.0);
        // |prod| = |eps| with generic phase: |eps| |e^{i t} - 1|
        let eps = 0.7;
        let t = 1.3_f64;
        let p = AmbientPoint::new(vec![Complex64::from_polar(eps, t)]);
        let expect = eps * (Complex64::from_polar(1.0, t) - Complex64::new(1.0, 0.0)).norm();
        assert!((gross_height(&p, Complex64::new(eps, 0.0)) - expect).abs() < 1e-15);
    }

    #[test]
    fn embed_base_is_affine_and_matches_lifts() {
        let poly = samples::kp1_polytope();
        let x = vec![rat(0, 1), rat(3, 2)];
        let y = vec![rat(1, 4), rat(2, 1)];
        let ex = embed_base_exact(&poly, &x).unwrap();
        let ey = embed_base_exact(&poly, &y).unwrap();
        // t = 1/3
        let t = rat(1, 3);
        let mid: Vec<BigRational> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| a.clone() * t.clone() + b.clone() * (rat(1, 1) - t.clone()))
            .collect();
        let emid = embed_base_exact(&poly, &mid).unwrap();
        for k in 0..ex.len() {
            let expect = ex[k].clone() * t.clone() + ey[k].clone() * (rat(1, 1) - t.clone());
            assert_eq!(emid[k], expect);
        }
        // boundary of facet m: first coordinates are ell_i / 2pi >= 0
        let on_facet = vec![rat(0, 1), rat(1, 1)];
        let e = embed_base_exact(&poly, &on_facet).unwrap();
        assert!(e.iter().all(|v| !v.is_negative()));
        // outside
        assert!(matches!(
            embed_base(&poly, &vec![rat(0, 1), rat(-5, 1)], 1.0),
            Err(FibrationError::OutsidePolytope)
        ));
    }

    #[test]
    fn moment_coordinates_roundtrip_and_noise() {
        let fan = samples::kp2_fan();
        let kahler = samples::kp2_kahler();
        let poly = samples::kp2_polytope();
        let x = poly.interior_point().unwrap();
        let s = poly.support_values(&x);
        let lift = AmbientPoint::new(
            s.iter()
                .map(|si| Complex64::from_polar(si.to_f64().unwrap().sqrt(), 0.7))
                .collect(),
        );
        let fit = moment_coordinates(&lift, &fan, &kahler, 1e-9).unwrap();
        for (a, b) in fit.x.iter().zip(&x) {
            assert!((a - b.to_f64().unwrap()).abs() < 1e-12);
        }
        // 1e-3 noise must be flagged
        let noisy = AmbientPoint::new(
            lift.coords
                .iter()
                .enumerate()
                .map(|(i, c)| c + Complex64::new(if i == 0 { 1e-3 } else { 0.0 }, 0.0))
                .collect(),
        );
        match moment_coordinates(&noisy, &fan, &kahler, 1e-9) {
            Err(FibrationError::NotOnLevelSet { residual }) => {
                assert!(residual > 1e-4 && residual < 1e-1);
            }
            other => panic!("expected NotOnLevelSet, got {other:?}"),
        }
        // square system: C^3 recovers x_i = |X_i|^2 + lambda_i directly
        let fan3 = samples::cm_fan(3);
        let k3 = samples::cm_kahler(3);
        let p = AmbientPoint::new(vec![
            Complex64::from_polar(1.1, 0.2),
            Complex64::from_polar(0.4, 1.0),
            Complex64::from_polar(0.9, 2.0),
        ]);
        let fit = moment_coordinates(&p, &fan3, &k3, 1e-9).unwrap();
        for (xi, c) in fit.x.iter().zip(&p.coords) {
            assert!((xi - c.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn kp2_discriminant_is_the_trivalent_graph() {
        let poly = samples::kp2_polytope();
        let frame = frame_of(&poly.fan);
        let base = discriminant_graph(&poly, &frame, 1.0);
        let s = base.summary();
        assert_eq!(
            s,
            GraphSummary { vertices: 3, points: 0, bounded_edges: 3, unbounded_edges: 3 }
        );
        // the three projected vertices of the bounded triangle
        let expect: Vec<Vec<BigRational>> = vec![
            vec![rat(-1, 1), rat(-1, 1)],
            vec![rat(-1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(-1, 1)],
        ];
        for e in &expect {
            assert!(
                base.pieces.iter().any(|p| p.vertices.contains(e)),
                "missing vertex {e:?}"
            );
        }
    }

    #[test]
    fn kp1_discriminant_is_two_points() {
        let poly = samples::kp1_polytope();
        let frame = frame_of(&poly.fan);
        let base = discriminant_graph(&poly, &frame, 1.0);
        let s = base.summary();
        assert_eq!(
            s,
            GraphSummary { vertices: 2, points: 2, bounded_edges: 0, unbounded_edges: 0 }
        );
        let mut coords: Vec<BigRational> =
            base.pieces.iter().map(|p| p.vertices[0][0].clone()).collect();
        coords.sort();
        assert_eq!(coords, vec![rat(-1, 1), rat(1, 1)]);
    }

    #[test]
    fn c3_discriminant_is_the_y_graph() {
        let poly = samples::c3_polytope();
        let frame = frame_of(&poly.fan);
        let base = discriminant_graph(&poly, &frame, 0.5);
        let s = base.summary();
        assert_eq!(
            s,
            GraphSummary { vertices: 1, points: 0, bounded_edges: 0, unbounded_edges: 3 }
        );
    }

    #[test]
    fn classification_by_height() {
        assert_eq!(classify_height(0.0, 1.0, 1e-12), BaseRegion::Boundary);
        assert_eq!(classify_height(1.0, 1.0, 1e-12), BaseRegion::Wall);
        assert_eq!(classify_height(2.0, 1.0, 1e-12), BaseRegion::ChamberPlus);
        assert_eq!(classify_height(0.5, 1.0, 1e-12), BaseRegion::ChamberMinus);
        assert_eq!(
            classify_height_exact(&rat(1, 2), &rat(1, 2)),
            BaseRegion::Wall
        );
        assert_eq!(
            classify_height_exact(&rat(1, 3), &rat(1, 2)),
            BaseRegion::ChamberMinus
        );
    }

    #[test]
    fn wall_distance_to_discriminant() {
        let poly = samples::kp2_polytope();
        let frame = frame_of(&poly.fan);
        let base = discriminant_graph(&poly, &frame, 1.0);
        // on the wall above the vertex (-1, -1): distance 0
        let (region, d) = classify_base_point(&[-1.0, -1.0, 1.0], &base, 1e-12);
        assert_eq!(region, BaseRegion::Wall);
        assert!(d.unwrap() < 1e-12);
        // chamber points get no distance
        let (region, d) = classify_base_point(&[0.0, 0.0, 3.0], &base, 1e-12);
        assert_eq!(region, BaseRegion::ChamberPlus);
        assert!(d.is_none());
    }

    #[test]
    fn chamber_compatibility_on_stock_fans() {
        let report =
            chamber_compatibility_check(&samples::kp1_fan(), &samples::kp1_kahler(), 1.0, 100, 13);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.agreed, 100);
        let report =
            chamber_compatibility_check(&samples::cm_fan(3), &samples::cm_kahler(3), 1.0, 100, 14);
        assert!(report.passed(), "{report:?}");
    }
}

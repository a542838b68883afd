//! Toric Calabi-Yau input data: fans, the Calabi-Yau covector, adapted
//! bases, Kahler data with the relation lattice, and the moment polytope.
//!
//! Conventions. Rays v_i are inward facet normals and the moment polytope is
//! `{ x : ell_i(x) = 2pi(<x, v_i> - lambda_i) >= 0 }`. A Kahler vector lambda
//! makes the support function strictly convex when for every maximal cone
//! sigma the vertex m_sigma (defined by `<m_sigma, v_i> = lambda_i`, i in
//! sigma) satisfies `<m_sigma, v_j> > lambda_j` for all rays j outside sigma;
//! with this orientation every facet of the polytope is active and the
//! numeric Kahler parameters `q_a = exp(2pi sum_i lambda_i gamma_{a,i})`
//! land in (0, 1) exactly when the curve classes gamma_a have positive
//! symplectic area `-2pi sum_i lambda_i gamma_{a,i}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{
    dot_int, dot_rat_int, feasible, kernel_basis, rat_inverse, IntMatrix, LinCon, LpOutcome,
    RationalVector, Rel,
};

#[derive(Debug, Error)]
pub enum FanError {
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("not Calabi-Yau: {0}")]
    NotCalabiYau(String),
    #[error("Calabi-Yau covector is not unique; particular solution {particular:?}, homogeneous directions {homogeneous:?}")]
    AmbiguousCyVector {
        particular: Vec<BigInt>,
        homogeneous: Vec<Vec<BigInt>>,
    },
    #[error("singular cones (|det| != 1): {0:?}")]
    SingularCone(Vec<usize>),
    #[error("not semi-projective: {0}")]
    NotSemiProjective(String),
    #[error("Kahler vector rejected: {0}")]
    KahlerInvalid(String),
    #[error("moment polytope has empty interior: {0}")]
    EmptyInterior(String),
    #[error("point lies outside the moment polytope")]
    OutsidePolytope,
}

/// Integral fan data: rays (primitive, pairwise distinct) and maximal cones
/// given as 0-based index sets of size n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanData {
    n: usize,
    rays: Vec<Vec<BigInt>>,
    max_cones: Vec<Vec<usize>>,
}

impl FanData {
    pub fn new(n: usize, rays: Vec<Vec<BigInt>>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        if n == 0 || rays.is_empty() {
            return Err(FanError::InvalidFan("need n >= 1 and at least one ray".into()));
        }
        for (i, v) in rays.iter().enumerate() {
            if v.len() != n {
                return Err(FanError::InvalidFan(format!(
                    "ray {} has length {}, expected {n}",
                    i + 1,
                    v.len()
                )));
            }
            let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !g.is_one() {
                return Err(FanError::InvalidFan(format!(
                    "ray {} is not primitive (content {g})",
                    i + 1
                )));
            }
        }
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                if rays[i] == rays[j] {
                    return Err(FanError::InvalidFan(format!(
                        "rays {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if max_cones.is_empty() {
            return Err(FanError::InvalidFan("no maximal cones".into()));
        }
        let mut covered = vec![false; rays.len()];
        for (c, cone) in max_cones.iter().enumerate() {
            if cone.len() != n {
                return Err(FanError::InvalidFan(format!(
                    "max cone {} has {} rays, expected {n}",
                    c + 1,
                    cone.len()
                )));
            }
            let mut seen = std::collections::BTreeSet::new();
            for &i in cone {
                if i >= rays.len() {
                    return Err(FanError::InvalidFan(format!(
                        "max cone {} references ray {} out of range 1..={}",
                        c + 1,
                        i + 1,
                        rays.len()
                    )));
                }
                if !seen.insert(i) {
                    return Err(FanError::InvalidFan(format!(
                        "max cone {} repeats ray {}",
                        c + 1,
                        i + 1
                    )));
                }
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|&c| !c) {
            return Err(FanError::InvalidFan(format!(
                "ray {} appears in no maximal cone",
                i + 1
            )));
        }
        Ok(FanData { n, rays, max_cones })
    }

    pub fn from_i64(n: usize, rays: &[Vec<i64>], max_cones: &[Vec<usize>]) -> Result<Self, FanError> {
        let rays = rays
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(n, rays, max_cones.to_vec())
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// Number of rays m.
    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[BigInt] {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// n x m matrix whose columns are the rays.
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(&self.rays)
    }

    /// n x n matrix whose columns are the cone's rays, in cone order.
    pub fn cone_matrix(&self, cone: &[usize]) -> IntMatrix {
        IntMatrix::from_columns(&cone.iter().map(|&i| self.rays[i].clone()).collect::<Vec<_>>())
    }
}

/// Outcome of solving `<u, v_i> = 1` over the integers.
#[derive(Debug, Clone)]
pub enum CySolution {
    Unique(Vec<BigInt>),
    None(String),
    Ambiguous {
        particular: Vec<BigInt>,
        homogeneous: Vec<Vec<BigInt>>,
    },
}

/// Solve `<u, v_i> = 1` for all given rays, exactly.
pub fn solve_cy_covector(rays: &[Vec<BigInt>], n: usize) -> CySolution {
    use crate::lattice::smith_normal_form;
    let m = rays.len();
    // system A u = 1 with A = (rays as rows)
    let a = IntMatrix::from_columns(rays).transpose();
    let s = smith_normal_form(&a);
    let rank = s.rank();
    let ones: Vec<BigInt> = vec![BigInt::one(); m];
    let ub = s.u.mul_vec(&ones);
    let mut y = vec![BigInt::zero(); n];
    for k in 0..rank {
        let d = &s.d[(k, k)];
        let (q, r) = ub[k].div_rem(d);
        if !r.is_zero() {
            return CySolution::None(format!(
                "integral system <u, v_i> = 1 has no solution (obstruction at invariant factor {d})"
            ));
        }
        y[k] = q;
    }
    for k in rank..m {
        if !ub[k].is_zero() {
            return CySolution::None("system <u, v_i> = 1 is inconsistent".into());
        }
    }
    let particular = s.v.mul_vec(&y);
    if rank < n {
        let homogeneous: Vec<Vec<BigInt>> = (rank..n).map(|k| s.v.column(k)).collect();
        return CySolution::Ambiguous { particular, homogeneous };
    }
    CySolution::Unique(particular)
}

/// The Calabi-Yau covector u with `<u, v_i> = 1` for every ray.
pub fn calabi_yau_vector(fan: &FanData) -> Result<Vec<BigInt>, FanError> {
    match solve_cy_covector(fan.rays(), fan.rank()) {
        CySolution::Unique(u) => Ok(u),
        CySolution::None(msg) => Err(FanError::NotCalabiYau(msg)),
        CySolution::Ambiguous { particular, homogeneous } => {
            Err(FanError::AmbiguousCyVector { particular, homogeneous })
        }
    }
}

/// Adapted basis data: a unimodular T with `T v_i = (w_i, 1)` and `w_m = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalabiYauFrame {
    pub u: Vec<BigInt>,
    pub basis_change: IntMatrix,
    pub w: Vec<Vec<BigInt>>,
}

impl CalabiYauFrame {
    fn from_basis_change(fan: &FanData, u: &[BigInt], t: IntMatrix) -> Result<Self, FanError> {
        assert!(t.is_unimodular(), "basis change must be unimodular");
        let n = fan.rank();
        let mut w = Vec::with_capacity(fan.num_rays());
        for (i, v) in fan.rays().iter().enumerate() {
            let tv = t.mul_vec(v);
            if !tv[n - 1].is_one() {
                return Err(FanError::NotCalabiYau(format!(
                    "ray {} maps to height {} under the adapted basis",
                    i + 1,
                    tv[n - 1]
                )));
            }
            w.push(tv[..n - 1].to_vec());
        }
        assert!(
            w.last().unwrap().iter().all(|x| x.is_zero()),
            "w_m must vanish after the shear"
        );
        assert_eq!(t.row(n - 1), u, "last row of T must be the CY covector");
        Ok(CalabiYauFrame { u: u.to_vec(), basis_change: t, w })
    }

    /// w exponents as i64 (desk-scale assumption).
    pub fn w_i64(&self) -> Vec<Vec<i64>> {
        self.w
            .iter()
            .map(|row| row.iter().map(|x| x.to_i64().expect("w exponent out of i64 range")).collect())
            .collect()
    }
}

/// Adapted basis for a chosen smooth max cone containing the last ray: the
/// cone's rays are sent to (e_1, 1), ..., (e_{n-1}, 1), (0, 1) with the last
/// ray landing on (0, 1). This normalization reproduces the usual mirror
/// coordinates (for C^m it sends v_i to (e_i, 1)).
pub fn adapted_basis_for_cone(
    fan: &FanData,
    u: &[BigInt],
    cone: &[usize],
) -> Result<CalabiYauFrame, FanError> {
    let n = fan.rank();
    let m = fan.num_rays();
    check_cy(fan, u)?;
    if !cone.contains(&(m - 1)) {
        return Err(FanError::InvalidFan("adapted cone must contain the last ray".into()));
    }
    let mut ordered: Vec<usize> = cone.iter().copied().filter(|&i| i != m - 1).collect();
    ordered.sort_unstable();
    ordered.push(m - 1);
    let vs = fan.cone_matrix(&ordered);
    if !vs.is_unimodular() {
        return Err(FanError::SingularCone(vec![0]));
    }
    // target columns (e_k, 1) and (0, 1)
    let mut target = IntMatrix::zero(n, n);
    for k in 0..n {
        if k + 1 < n {
            target[(k, k)] = BigInt::one();
        }
        target[(n - 1, k)] = BigInt::one();
    }
    let vs_rat: Vec<Vec<BigRational>> = vs.to_rational_rows();
    let inv = rat_inverse(&vs_rat).expect("unimodular cone matrix is invertible");
    let mut t = IntMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = BigRational::zero();
            for k in 0..n {
                s += BigRational::from_integer(target[(i, k)].clone()) * &inv[k][j];
            }
            assert!(s.denom().is_one(), "T must be integral for a unimodular cone");
            t[(i, j)] = s.numer().clone();
        }
    }
    CalabiYauFrame::from_basis_change(fan, u, t)
}

/// Default adapted basis: the first smooth max cone (input order) containing
/// the last ray; falls back to a generic unimodular completion of u followed
/// by the shear (w, h) -> (w - h*w_m, h).
pub fn adapted_basis(fan: &FanData, u: &[BigInt]) -> Result<CalabiYauFrame, FanError> {
    let m = fan.num_rays();
    for cone in fan.max_cones() {
        if cone.contains(&(m - 1)) && fan.cone_matrix(cone).is_unimodular() {
            return adapted_basis_for_cone(fan, u, cone);
        }
    }
    check_cy(fan, u)?;
    let t0 = complete_covector(u);
    let t = shear_to_zero_last(fan, &t0);
    CalabiYauFrame::from_basis_change(fan, u, t)
}

fn check_cy(fan: &FanData, u: &[BigInt]) -> Result<(), FanError> {
    for (i, v) in fan.rays().iter().enumerate() {
        if !dot_int(u, v).is_one() {
            return Err(FanError::NotCalabiYau(format!(
                "<u, v_{}> = {} != 1",
                i + 1,
                dot_int(u, v)
            )));
        }
    }
    Ok(())
}

/// Any unimodular matrix whose last row is the (primitive) covector u.
/// Rows 1..n-1 come from the Hermite-canonical basis of ker(u) as columns,
/// completed by an extended-gcd solution of <u, x> = 1; the inverse of that
/// column matrix has u as its last row.
pub fn complete_covector(u: &[BigInt]) -> IntMatrix {
    let n = u.len();
    let urow = IntMatrix::from_columns(&u.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>());
    let kernel = kernel_basis(&urow);
    assert_eq!(kernel.len(), n - 1, "covector must be nonzero");
    let x = egcd_solution(u);
    let mut cols = kernel;
    cols.push(x);
    let b = IntMatrix::from_columns(&cols);
    assert!(b.is_unimodular(), "completion failed; u must be primitive");
    let brat = b.to_rational_rows();
    let inv = rat_inverse(&brat).unwrap();
    let mut t = IntMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            assert!(inv[i][j].denom().is_one());
            t[(i, j)] = inv[i][j].numer().clone();
        }
    }
    t
}

/// Integer x with <u, x> = 1 (u primitive).
fn egcd_solution(u: &[BigInt]) -> Vec<BigInt> {
    let mut x = vec![BigInt::zero(); u.len()];
    let mut g = BigInt::zero();
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        if g.is_zero() {
            // first nonzero entry: 1 = (1/u_i) impossible unless later gcds
            // shrink; start with coefficient 1 on this slot
            g = ui.clone();
            x[i] = BigInt::one();
            continue;
        }
        let e = g.extended_gcd(ui);
        // e.gcd = e.x * g + e.y * u_i
        for xj in x.iter_mut() {
            *xj *= &e.x;
        }
        x[i] = e.y.clone();
        g = e.gcd;
    }
    assert!(g.abs().is_one(), "covector not primitive");
    if g.is_negative() {
        for xj in x.iter_mut() {
            *xj = -xj.clone();
        }
    }
    x
}

/// Compose with the unimodular shear (w, h) -> (w - h * w_m, h) so that the
/// last ray's w vanishes.
pub fn shear_to_zero_last(fan: &FanData, t0: &IntMatrix) -> IntMatrix {
    let n = fan.rank();
    let wm_full = t0.mul_vec(fan.ray(fan.num_rays() - 1));
    let mut shear = IntMatrix::identity(n);
    for k in 0..n - 1 {
        shear[(k, n - 1)] = -wm_full[k].clone();
    }
    shear.mul(t0)
}

/// Per-cone smoothness verdicts.
#[derive(Debug, Clone)]
pub struct SmoothnessReport {
    pub dets: Vec<BigInt>,
}

impl SmoothnessReport {
    pub fn all_smooth(&self) -> bool {
        self.dets.iter().all(|d| d.abs().is_one())
    }

    pub fn offending_cones(&self) -> Vec<usize> {
        self.dets
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.abs().is_one())
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn is_smooth(fan: &FanData) -> SmoothnessReport {
    SmoothnessReport {
        dets: fan.max_cones().iter().map(|cone| fan.cone_matrix(cone).det()).collect(),
    }
}

/// Strict-convexity constraints on lambda: for each max cone sigma and each
/// ray j outside it, `<m_sigma(lambda), v_j> - lambda_j > 0` where m_sigma is
/// the exact solution of the vertex equations on sigma.
fn convexity_constraints(fan: &FanData) -> Result<Vec<LinCon>, FanError> {
    let n = fan.rank();
    let m = fan.num_rays();
    let smooth = is_smooth(fan);
    if !smooth.all_smooth() {
        return Err(FanError::SingularCone(smooth.offending_cones()));
    }
    let mut cons = Vec::new();
    for cone in fan.max_cones() {
        // m_sigma = (V_sigma^T)^{-1} lambda_sigma, linear in lambda
        let vt: Vec<Vec<BigRational>> = cone
            .iter()
            .map(|&i| {
                fan.ray(i)
                    .iter()
                    .map(|x| BigRational::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        let inv = rat_inverse(&vt).expect("smooth cone matrix invertible");
        for j in 0..m {
            if cone.contains(&j) {
                continue;
            }
            // <m_sigma, v_j> = sum_k lambda_{cone[k]} * <col_k(inv), v_j>
            let mut coeffs = vec![BigRational::zero(); m];
            for (k, &i) in cone.iter().enumerate() {
                let col: Vec<BigRational> = (0..n).map(|r| inv[r][k].clone()).collect();
                coeffs[i] += dot_rat_int(&col, fan.ray(j));
            }
            coeffs[j] -= BigRational::one();
            cons.push(LinCon::new(coeffs, Rel::Gt, BigRational::zero()));
        }
    }
    Ok(cons)
}

/// Support-convexity test: every codimension-1 cone face is either shared by
/// exactly two maximal cones or lies on a supporting hyperplane of the whole
/// ray set.
fn check_support_convex(fan: &FanData) -> Result<(), FanError> {
    let n = fan.rank();
    if n == 1 {
        return Ok(());
    }
    use std::collections::BTreeMap;
    let mut facets: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    for (c, cone) in fan.max_cones().iter().enumerate() {
        for drop in 0..cone.len() {
            let mut facet: Vec<usize> = cone
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != drop)
                .map(|(_, &i)| i)
                .collect();
            facet.sort_unstable();
            facets.entry(facet).or_default().push((c, cone[drop]));
        }
    }
    for (facet, owners) in &facets {
        match owners.len() {
            2 => continue,
            1 => {
                let (c, dropped) = owners[0];
                // inward normal eta: eta orthogonal to the facet rays and
                // positive on the dropped generator
                let facet_rows = IntMatrix::from_columns(
                    &facet.iter().map(|&i| fan.ray(i).to_vec()).collect::<Vec<_>>(),
                )
                .transpose();
                let eta_int = kernel_basis(&facet_rows);
                if eta_int.len() != 1 {
                    return Err(FanError::InvalidFan(format!(
                        "facet {:?} of cone {} is degenerate",
                        one_based(facet),
                        c + 1
                    )));
                }
                let mut eta = eta_int[0].clone();
                let side = dot_int(&eta, fan.ray(dropped));
                if side.is_zero() {
                    return Err(FanError::InvalidFan(format!(
                        "cone {} is not full-dimensional",
                        c + 1
                    )));
                }
                if side.is_negative() {
                    for x in eta.iter_mut() {
                        *x = -x.clone();
                    }
                }
                for (j, ray) in fan.rays().iter().enumerate() {
                    if dot_int(&eta, ray).is_negative() {
                        return Err(FanError::NotSemiProjective(format!(
                            "fan support is not convex: boundary facet {:?} separates ray {}",
                            one_based(facet),
                            j + 1
                        )));
                    }
                }
            }
            k => {
                return Err(FanError::InvalidFan(format!(
                    "facet {:?} is shared by {k} maximal cones",
                    one_based(facet)
                )))
            }
        }
    }
    Ok(())
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|&i| i + 1).collect()
}

/// Search for an exact rational Kahler vector certifying semi-projectivity.
/// Failure carries the Fourier-Motzkin infeasibility certificate.
pub fn certify_semiprojective(fan: &FanData) -> Result<Vec<BigRational>, FanError> {
    check_support_convex(fan)?;
    let cons = convexity_constraints(fan)?;
    match feasible(&cons, fan.num_rays()) {
        LpOutcome::Feasible(lambda) => Ok(lambda),
        LpOutcome::Infeasible(cert) => Err(FanError::NotSemiProjective(cert)),
    }
}

/// Exact validation of a fixed Kahler vector against the strict-convexity
/// system.
pub fn validate_lambda(fan: &FanData, lambda: &[BigRational]) -> Result<(), FanError> {
    if lambda.len() != fan.num_rays() {
        return Err(FanError::KahlerInvalid(format!(
            "expected {} lambda entries, got {}",
            fan.num_rays(),
            lambda.len()
        )));
    }
    check_support_convex(fan)?;
    let cons = convexity_constraints(fan)?;
    for c in &cons {
        let lhs: BigRational = c
            .coeffs
            .iter()
            .zip(lambda)
            .fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
        if lhs <= c.rhs {
            return Err(FanError::KahlerInvalid(
                "support function is not strictly convex for the given lambda".into(),
            ));
        }
    }
    Ok(())
}

/// Hermite-canonical basis of the relation lattice ker(Z^m -> N).
pub fn relation_lattice(fan: &FanData) -> Vec<Vec<BigInt>> {
    kernel_basis(&fan.ray_matrix())
}

/// Kahler data: facet constants, relation lattice, numeric parameters.
#[derive(Debug, Clone)]
pub struct KahlerData {
    pub lambda: Vec<BigRational>,
    pub gamma: Vec<Vec<BigInt>>,
    pub q: Vec<f64>,
}

impl KahlerData {
    /// Validate lambda and derive `q_a = exp(2pi sum_i lambda_i gamma_{a,i})`,
    /// requiring each exponent to be negative (curve areas positive, so
    /// q_a in (0,1)).
    pub fn new(fan: &FanData, lambda: Vec<BigRational>) -> Result<Self, FanError> {
        validate_lambda(fan, &lambda)?;
        let gamma = relation_lattice(fan);
        let mut q = Vec::with_capacity(gamma.len());
        for (a, g) in gamma.iter().enumerate() {
            let s = dot_rat_int(&lambda, g);
            if !s.is_negative() {
                return Err(FanError::KahlerInvalid(format!(
                    "relation class {} has non-positive symplectic area; q_{} would leave (0,1)",
                    a + 1,
                    a + 1
                )));
            }
            q.push((2.0 * std::f64::consts::PI * s.to_f64().unwrap()).exp());
        }
        Ok(KahlerData { lambda, gamma, q })
    }

    /// Same validation, but with user-supplied numeric q values.
    pub fn with_q_override(fan: &FanData, lambda: Vec<BigRational>, q: Vec<f64>) -> Result<Self, FanError> {
        let mut data = Self::new(fan, lambda)?;
        if q.len() != data.gamma.len() {
            return Err(FanError::KahlerInvalid(format!(
                "expected {} q values, got {}",
                data.gamma.len(),
                q.len()
            )));
        }
        for (a, &qa) in q.iter().enumerate() {
            if !(qa > 0.0 && qa < 1.0) {
                return Err(FanError::KahlerInvalid(format!(
                    "q_{} = {qa} outside (0,1)",
                    a + 1
                )));
            }
        }
        data.q = q;
        Ok(data)
    }

    /// Pick a Kahler vector by LP, adding the large-volume conditions
    /// `sum_i lambda_i gamma_{a,i} < 0` to the convexity system.
    pub fn auto(fan: &FanData) -> Result<Self, FanError> {
        check_support_convex(fan)?;
        let mut cons = convexity_constraints(fan)?;
        let gamma = relation_lattice(fan);
        for g in &gamma {
            let coeffs: RationalVector = g
                .iter()
                .map(|x| BigRational::from_integer(-x.clone()))
                .collect();
            cons.push(LinCon::new(coeffs, Rel::Gt, BigRational::zero()));
        }
        match feasible(&cons, fan.num_rays()) {
            LpOutcome::Feasible(lambda) => Self::new(fan, lambda),
            LpOutcome::Infeasible(cert) => Err(FanError::NotSemiProjective(cert)),
        }
    }

    /// Number of relations r = m - n.
    pub fn num_relations(&self) -> usize {
        self.gamma.len()
    }

    /// The pairing D_i . gamma_a (the i-th coordinate of gamma_a).
    pub fn intersection(&self, i: usize, a: usize) -> &BigInt {
        &self.gamma[a][i]
    }
}

/// The moment polytope `{ x : ell_i(x) >= 0 }` of the pair (fan, kahler).
#[derive(Debug, Clone)]
pub struct MomentPolytope {
    pub fan: FanData,
    pub kahler: KahlerData,
}

/// A nonempty codimension-2 face `{ ell_i = ell_j = 0 }` with an exact
/// witness and a boundedness flag.
#[derive(Debug, Clone)]
pub struct Codim2Face {
    pub pair: (usize, usize),
    pub witness: RationalVector,
    pub bounded: bool,
}

impl MomentPolytope {
    pub fn new(fan: FanData, kahler: KahlerData) -> Self {
        MomentPolytope { fan, kahler }
    }

    /// ell_i(x) in units of 2pi: `<x, v_i> - lambda_i`, exact.
    pub fn support_values(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.fan
            .rays()
            .iter()
            .zip(&self.kahler.lambda)
            .map(|(v, l)| dot_rat_int(x, v) - l)
            .collect()
    }

    /// ell_i(x) as floats, with the 2pi multiplied out.
    pub fn support_values_f64(&self, x: &[BigRational]) -> Vec<f64> {
        self.support_values(x)
            .iter()
            .map(|s| 2.0 * std::f64::consts::PI * s.to_f64().unwrap())
            .collect()
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.support_values(x).iter().all(|s| !s.is_negative())
    }

    pub fn is_interior(&self, x: &[BigRational]) -> bool {
        self.support_values(x).iter().all(|s| s.is_positive())
    }

    /// Facet indices where x lies on the boundary.
    pub fn active_facets(&self, x: &[BigRational]) -> Vec<usize> {
        self.support_values(x)
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// An exact interior witness via the strict LP.
    pub fn interior_point(&self) -> Result<RationalVector, FanError> {
        let cons: Vec<(RationalVector, BigRational)> = self
            .fan
            .rays()
            .iter()
            .zip(&self.kahler.lambda)
            .map(|(v, l)| {
                (
                    v.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
                    l.clone(),
                )
            })
            .collect();
        match crate::lattice::lp_feasible_strict(&cons, self.fan.rank()) {
            LpOutcome::Feasible(x) => Ok(x),
            LpOutcome::Infeasible(cert) => Err(FanError::EmptyInterior(cert)),
        }
    }

    /// Random interior points near the LP witness, exact membership checks.
    pub fn sample_interior(&self, rng: &mut impl rand::Rng, count: usize) -> Vec<RationalVector> {
        let base = self.interior_point().expect("interior required for sampling");
        let n = self.fan.rank();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut delta: RationalVector = (0..n)
                .map(|_| BigRational::new(rng.gen_range(-64i64..=64).into(), 64.into()))
                .collect();
            for _ in 0..64 {
                let x: RationalVector = base.iter().zip(&delta).map(|(b, d)| b + d).collect();
                if self.is_interior(&x) {
                    out.push(x);
                    break;
                }
                for d in delta.iter_mut() {
                    *d /= BigRational::from_integer(2.into());
                }
            }
        }
        out
    }

    fn face_system(&self, i: usize, j: usize) -> Vec<LinCon> {
        let m = self.fan.num_rays();
        let mut cons = Vec::with_capacity(m);
        for k in 0..m {
            let coeffs: RationalVector = self
                .fan
                .ray(k)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            let rel = if k == i || k == j { Rel::Eq } else { Rel::Ge };
            cons.push(LinCon::new(coeffs, rel, self.kahler.lambda[k].clone()));
        }
        cons
    }

    /// All nonempty codimension-2 faces F_{ij}, with witnesses and
    /// exact boundedness verdicts (recession-direction probes).
    pub fn codim2_faces(&self) -> Vec<Codim2Face> {
        let m = self.fan.num_rays();
        let n = self.fan.rank();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let sys = self.face_system(i, j);
                let LpOutcome::Feasible(witness) = feasible(&sys, n) else {
                    continue;
                };
                // recession cone: <d, v_i> = <d, v_j> = 0, <d, v_k> >= 0
                let mut unbounded = false;
                'probe: for t in 0..n {
                    for sign in [1i64, -1] {
                        let mut sys = Vec::with_capacity(m + 1);
                        for k in 0..m {
                            let coeffs: RationalVector = self
                                .fan
                                .ray(k)
                                .iter()
                                .map(|x| BigRational::from_integer(x.clone()))
                                .collect();
                            let rel = if k == i || k == j { Rel::Eq } else { Rel::Ge };
                            sys.push(LinCon::new(coeffs, rel, BigRational::zero()));
                        }
                        let mut norm = vec![BigRational::zero(); n];
                        norm[t] = BigRational::one();
                        sys.push(LinCon::new(norm, Rel::Eq, BigRational::from_integer(sign.into())));
                        if feasible(&sys, n).is_feasible() {
                            unbounded = true;
                            break 'probe;
                        }
                    }
                }
                out.push(Codim2Face { pair: (i, j), witness, bounded: !unbounded });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn kp2_cy_vector_and_frame() {
        let fan = samples::kp2_fan();
        let u = calabi_yau_vector(&fan).unwrap();
        assert_eq!(u, vec![BigInt::zero(), BigInt::zero(), BigInt::one()]);
        let frame = adapted_basis(&fan, &u).unwrap();
        assert_eq!(frame.basis_change, IntMatrix::identity(3));
        assert_eq!(
            frame.w_i64(),
            vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![0, 0]]
        );
    }

    #[test]
    fn kp1_cy_vector_and_frame() {
        let fan = samples::kp1_fan();
        let u = calabi_yau_vector(&fan).unwrap();
        assert_eq!(u, vec![BigInt::zero(), BigInt::one()]);
        let frame = adapted_basis(&fan, &u).unwrap();
        assert_eq!(frame.basis_change, IntMatrix::identity(2));
        assert_eq!(frame.w_i64(), vec![vec![1], vec![-1], vec![0]]);
    }

    #[test]
    fn p1_fan_is_not_calabi_yau() {
        let fan = FanData::from_i64(1, &[vec![1], vec![-1]], &[vec![0], vec![1]]).unwrap();
        match calabi_yau_vector(&fan) {
            Err(FanError::NotCalabiYau(_)) => {}
            other => panic!("expected NotCalabiYau, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_ray_set_reports_all_cy_solutions() {
        let rays = vec![
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(1)],
        ];
        match solve_cy_covector(&rays, 3) {
            CySolution::Ambiguous { particular, homogeneous } => {
                assert_eq!(homogeneous.len(), 1);
                for v in &rays {
                    assert!(dot_int(&particular, v).is_one());
                    assert!(dot_int(&homogeneous[0], v).is_zero());
                }
            }
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn cm_frame_sends_rays_to_unit_vectors() {
        for m in [3usize, 4] {
            let fan = samples::cm_fan(m);
            let u = calabi_yau_vector(&fan).unwrap();
            assert_eq!(u, vec![BigInt::one(); m]);
            let frame = adapted_basis(&fan, &u).unwrap();
            let w = frame.w_i64();
            for i in 0..m - 1 {
                let mut e = vec![0i64; m - 1];
                e[i] = 1;
                assert_eq!(w[i], e);
            }
            assert_eq!(w[m - 1], vec![0i64; m - 1]);
        }
    }

    #[test]
    fn shear_forces_last_w_to_zero() {
        // K_P1 rays listed so the last ray is (1,1); the generic completion
        // path plus shear must still produce an adapted frame.
        let fan = FanData::from_i64(
            2,
            &[vec![0, 1], vec![-1, 1], vec![1, 1]],
            &[vec![2, 0], vec![1, 0]],
        )
        .unwrap();
        let u = calabi_yau_vector(&fan).unwrap();
        let t0 = complete_covector(&u);
        assert!(t0.is_unimodular());
        assert_eq!(t0.row(1), &u[..]);
        let t = shear_to_zero_last(&fan, &t0);
        let frame = CalabiYauFrame::from_basis_change(&fan, &u, t).unwrap();
        assert!(frame.w.last().unwrap().iter().all(|x| x.is_zero()));
        // relation vectors stay orthogonal to the sheared exponents
        let gamma = relation_lattice(&fan);
        for g in &gamma {
            for col in 0..fan.rank() - 1 {
                let s: BigInt = g
                    .iter()
                    .zip(&frame.w)
                    .map(|(gi, wi)| gi * &wi[col])
                    .sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn smoothness_verdicts() {
        let fan = samples::kp2_fan();
        assert!(is_smooth(&fan).all_smooth());
        let fan = samples::kp1_fan();
        assert!(is_smooth(&fan).all_smooth());
        let singular = FanData::from_i64(2, &[vec![1, 0], vec![1, 2]], &[vec![0, 1]]).unwrap();
        let rep = is_smooth(&singular);
        assert!(!rep.all_smooth());
        assert_eq!(rep.dets[0], BigInt::from(2));
        assert_eq!(rep.offending_cones(), vec![0]);
    }

    #[test]
    fn semiprojective_certificates() {
        for fan in [samples::kp2_fan(), samples::kp1_fan(), samples::cm_fan(3)] {
            let lambda = certify_semiprojective(&fan).unwrap();
            validate_lambda(&fan, &lambda).unwrap();
        }
        // fixed witnesses, checked by substitution
        let kp2 = samples::kp2_fan();
        validate_lambda(&kp2, &[rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap();
        assert!(validate_lambda(&kp2, &[rat(0, 1), rat(0, 1), rat(0, 1), rat(-1, 1)]).is_err());
        assert!(validate_lambda(&kp2, &vec![rat(0, 1); 4]).is_err());
        let kp1 = samples::kp1_fan();
        validate_lambda(&kp1, &[rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap();
    }

    #[test]
    fn nonconvex_supports_are_rejected() {
        // opposite quadrants
        let fan = FanData::from_i64(
            2,
            &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            &[vec![0, 1], vec![2, 3]],
        )
        .unwrap();
        match certify_semiprojective(&fan) {
            Err(FanError::NotSemiProjective(msg)) => {
                assert!(msg.contains("not convex"), "{msg}");
            }
            other => panic!("expected NotSemiProjective, got {other:?}"),
        }
        // 225-degree sector: cones ((1,0),(0,1)) and ((0,1),(-1,-1))
        let fan = FanData::from_i64(
            2,
            &[vec![1, 0], vec![0, 1], vec![-1, -1]],
            &[vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        assert!(matches!(
            certify_semiprojective(&fan),
            Err(FanError::NotSemiProjective(_))
        ));
    }

    #[test]
    fn relation_lattices() {
        assert_eq!(
            relation_lattice(&samples::kp2_fan()),
            vec![vec![
                BigInt::from(1),
                BigInt::from(1),
                BigInt::from(1),
                BigInt::from(-3)
            ]]
        );
        assert_eq!(
            relation_lattice(&samples::kp1_fan()),
            vec![vec![BigInt::from(1), BigInt::from(1), BigInt::from(-2)]]
        );
        assert!(relation_lattice(&samples::cm_fan(3)).is_empty());
    }

    #[test]
    fn kahler_q_values_sit_in_unit_interval() {
        let fan = samples::kp2_fan();
        let k = KahlerData::new(&fan, vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap();
        let expect = (-6.0 * std::f64::consts::PI).exp();
        assert!((k.q[0] - expect).abs() < 1e-18);
        assert!(k.q[0] > 0.0 && k.q[0] < 1.0);
        let auto = KahlerData::auto(&samples::kp1_fan()).unwrap();
        assert!(auto.q.iter().all(|&q| q > 0.0 && q < 1.0));
    }

    #[test]
    fn support_values_and_interior() {
        let poly = samples::kp2_polytope();
        let x = vec![rat(0, 1), rat(0, 1), rat(2, 1)];
        assert_eq!(
            poly.support_values(&x),
            vec![rat(2, 1), rat(2, 1), rat(2, 1), rat(1, 1)]
        );
        let w = poly.interior_point().unwrap();
        assert!(poly.support_values(&w).iter().all(|s| s.is_positive()));

        let poly1 = samples::kp1_polytope();
        let x = vec![rat(0, 1), rat(3, 2)];
        assert_eq!(poly1.support_values(&x), vec![rat(3, 2), rat(3, 2), rat(1, 2)]);
        // boundary point: on facet 3
        let x = vec![rat(0, 1), rat(1, 1)];
        assert_eq!(poly1.active_facets(&x), vec![2]);
    }

    #[test]
    fn empty_interior_detected() {
        // lambda outside the Kahler cone is rejected at construction, so
        // drive the polytope directly with contradictory data
        let fan = samples::cm_fan(3);
        let kahler = KahlerData::new(&fan, vec![rat(0, 1); 3]).unwrap();
        let mut poly = MomentPolytope::new(fan, kahler);
        // ell_1 = x_1, flip the first ray to -e_1 to force x_1 > 0 and -x_1 > 0
        poly.fan = FanData::from_i64(
            3,
            &[vec![1, 0, 0], vec![-1, 0, 0], vec![0, 0, 1]],
            &[vec![0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(poly.interior_point(), Err(FanError::EmptyInterior(_))));
    }

    #[test]
    fn codim2_faces_of_the_bundled_polytopes() {
        let poly = samples::kp2_polytope();
        let faces = poly.codim2_faces();
        let summary: Vec<((usize, usize), bool)> =
            faces.iter().map(|f| (f.pair, f.bounded)).collect();
        assert_eq!(
            summary,
            vec![
                ((0, 1), false),
                ((0, 2), false),
                ((0, 3), true),
                ((1, 2), false),
                ((1, 3), true),
                ((2, 3), true),
            ]
        );
        for f in &faces {
            let ell = poly.support_values(&f.witness);
            assert!(ell[f.pair.0].is_zero() && ell[f.pair.1].is_zero());
            assert!(ell.iter().all(|s| !s.is_negative()));
        }

        let poly = samples::kp1_polytope();
        let faces = poly.codim2_faces();
        let summary: Vec<((usize, usize), bool)> =
            faces.iter().map(|f| (f.pair, f.bounded)).collect();
        assert_eq!(summary, vec![((0, 2), true), ((1, 2), true)]);

        let poly = samples::c3_polytope();
        let faces = poly.codim2_faces();
        let summary: Vec<((usize, usize), bool)> =
            faces.iter().map(|f| (f.pair, f.bounded)).collect();
        assert_eq!(
            summary,
            vec![((0, 1), false), ((0, 2), false), ((1, 2), false)]
        );
    }

    #[test]
    fn fan_validation_diagnostics() {
        assert!(matches!(
            FanData::from_i64(2, &[vec![2, 0], vec![0, 1]], &[vec![0, 1]]),
            Err(FanError::InvalidFan(_))
        ));
        assert!(matches!(
            FanData::from_i64(2, &[vec![1, 0], vec![1, 0]], &[vec![0, 1]]),
            Err(FanError::InvalidFan(_))
        ));
        assert!(matches!(
            FanData::from_i64(2, &[vec![1, 0], vec![0, 1]], &[vec![0, 5]]),
            Err(FanError::InvalidFan(_))
        ));
        assert!(matches!(
            FanData::from_i64(2, &[vec![1, 0], vec![0, 1], vec![1, 1]], &[vec![0, 1]]),
            Err(FanError::InvalidFan(_))
        ));
    }
}

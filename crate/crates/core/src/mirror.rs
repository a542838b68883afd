//! The mirror hypersurface family `u v = sum_i C_i z^{w_i}`.
//!
//! Coefficients are formal monomials in the Kahler parameters, solved from
//! the constraints `prod_i C_i^{D_i . gamma_a} = q_a` after gauge-fixing
//! `C_i = 1` on a chosen smooth maximal cone containing the last ray.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::disks::{critical_points, newton_start_grid, CriticalSearch};
use crate::fan::{CalabiYauFrame, FanData, KahlerData};
use crate::laurent::{format_term, LaurentPolynomial};
use crate::qexpr::QExpr;

#[derive(Debug, Error)]
pub enum MirrorError {
    #[error("invalid gauge cone: {0}")]
    GaugeConeInvalid(String),
    #[error("constraint {index} violated: {lhs} != {rhs}")]
    ConstraintViolated { index: usize, lhs: String, rhs: String },
}

/// A solved mirror family.
#[derive(Debug, Clone)]
pub struct MirrorFamily {
    pub frame: CalabiYauFrame,
    /// C_i as formal q-monomials; C_i = 1 on the gauge cone.
    pub coefficients: Vec<QExpr>,
    /// Sorted 0-based gauge cone indices.
    pub gauge_cone: Vec<usize>,
    /// Relation-lattice basis driving the constraints.
    pub gamma: Vec<Vec<BigInt>>,
    /// Set when a solved exponent is not an integer.
    pub fractional_exponents: bool,
}

impl MirrorFamily {
    pub fn num_rays(&self) -> usize {
        self.coefficients.len()
    }

    pub fn num_params(&self) -> usize {
        self.gamma.len()
    }

    /// Number of z variables (n - 1).
    pub fn curve_vars(&self) -> usize {
        self.frame.w.first().map_or(0, |w| w.len())
    }

    /// f(z) = sum_i C_i z^{w_i} in the z variables only.
    pub fn curve_polynomial(&self) -> LaurentPolynomial<QExpr> {
        let mut f = LaurentPolynomial::zero(self.curve_vars());
        for (w, c) in self.frame.w_i64().into_iter().zip(&self.coefficients) {
            f.add_term(w, c.clone());
        }
        f
    }

    /// u*v - f(z) in the ambient variables [u, v, z_1, ..., z_{n-1}].
    pub fn defining_polynomial(&self) -> LaurentPolynomial<QExpr> {
        let k = self.curve_vars() + 2;
        let r = self.num_params();
        let mut p = LaurentPolynomial::zero(k);
        let mut uv = vec![0i64; k];
        uv[0] = 1;
        uv[1] = 1;
        p.add_term(uv, QExpr::one(r));
        for (w, c) in self.frame.w_i64().into_iter().zip(&self.coefficients) {
            let mut e = vec![0i64; k];
            e[2..].copy_from_slice(&w);
            p.add_term(e, c.neg());
        }
        p
    }

    pub fn z_names(&self) -> Vec<String> {
        (1..=self.curve_vars()).map(|j| format!("z{j}")).collect()
    }

    /// Canonical equation text: the constant (last-ray) term first, then the
    /// remaining terms in ray order. Reproduces e.g.
    /// `u*v = 1 + z1 + z2 + q*z1^-1*z2^-1` for local P^2.
    pub fn equation_string(&self) -> String {
        let names = self.z_names();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let m = self.num_rays();
        let w = self.frame.w_i64();
        let mut order: Vec<usize> = vec![m - 1];
        order.extend(0..m - 1);
        let terms: Vec<String> = order
            .into_iter()
            .map(|i| format_term(&name_refs, &w[i], &self.coefficients[i]))
            .collect();
        format!("u*v = {}", terms.join(" + "))
    }

    /// Numeric curve polynomial at the given Kahler parameter values.
    pub fn curve_at(&self, q: &[Complex64]) -> LaurentPolynomial<Complex64> {
        self.curve_polynomial().specialize_q(q)
    }
}

/// Gauge-fix on `gauge_cone` and solve the coefficient constraints.
///
/// The surviving r coefficients (complement indices J) satisfy
/// `sum_{j in J} gamma_a[j] * e_{j,b} = delta_{ab}`; the exponent matrix is
/// the exact rational inverse of gamma restricted to J, which exists for
/// every smooth gauge cone.
pub fn solve_coefficients(
    fan: &FanData,
    frame: &CalabiYauFrame,
    kahler: &KahlerData,
    gauge_cone: &[usize],
) -> Result<MirrorFamily, MirrorError> {
    let m = fan.num_rays();
    let n = fan.rank();
    let mut cone = gauge_cone.to_vec();
    cone.sort_unstable();
    cone.dedup();
    if cone.len() != n {
        return Err(MirrorError::GaugeConeInvalid(format!(
            "gauge cone must have {n} distinct rays"
        )));
    }
    if !fan.max_cones().iter().any(|c| {
        let mut c = c.clone();
        c.sort_unstable();
        c == cone
    }) {
        return Err(MirrorError::GaugeConeInvalid(
            "gauge cone is not a maximal cone of the fan".into(),
        ));
    }
    if !cone.contains(&(m - 1)) {
        return Err(MirrorError::GaugeConeInvalid(
            "gauge cone must contain the last ray".into(),
        ));
    }
    if !fan.cone_matrix(&cone).is_unimodular() {
        return Err(MirrorError::GaugeConeInvalid("gauge cone is not smooth".into()));
    }

    let gamma = kahler.gamma.clone();
    let r = gamma.len();
    let complement: Vec<usize> = (0..m).filter(|i| !cone.contains(i)).collect();
    assert_eq!(complement.len(), r, "complement of a maximal cone has size r");

    let mut coefficients = vec![QExpr::one(r); m];
    let mut fractional = false;
    if r > 0 {
        let g: Vec<Vec<BigRational>> = gamma
            .iter()
            .map(|ga| {
                complement
                    .iter()
                    .map(|&j| BigRational::from_integer(ga[j].clone()))
                    .collect()
            })
            .collect();
        let e = crate::lattice::rat_inverse(&g)
            .expect("gamma restricted to the complement of a smooth cone is invertible");
        for (b, &j) in complement.iter().enumerate() {
            let exps: Vec<BigRational> = (0..r).map(|a| e[b][a].clone()).collect();
            if exps.iter().any(|x| !x.denom().is_one()) {
                fractional = true;
            }
            coefficients[j] = QExpr::monomial(BigRational::one(), exps);
        }
    }
    Ok(MirrorFamily {
        frame: frame.clone(),
        coefficients,
        gauge_cone: cone,
        gamma,
        fractional_exponents: fractional,
    })
}

/// Solve with the default gauge cone: the first smooth maximal cone (input
/// order) containing the last ray.
pub fn solve_default(
    fan: &FanData,
    frame: &CalabiYauFrame,
    kahler: &KahlerData,
) -> Result<MirrorFamily, MirrorError> {
    let m = fan.num_rays();
    let cone = fan
        .max_cones()
        .iter()
        .find(|c| c.contains(&(m - 1)) && fan.cone_matrix(c).is_unimodular())
        .ok_or_else(|| {
            MirrorError::GaugeConeInvalid("no smooth maximal cone contains the last ray".into())
        })?;
    solve_coefficients(fan, frame, kahler, cone)
}

/// Check `prod_i C_i^{gamma_a[i]} = q_a` exactly on formal exponents and
/// numerically at the stored q values.
pub fn verify_constraints(fam: &MirrorFamily, kahler: &KahlerData) -> Result<(), MirrorError> {
    let r = fam.num_params();
    for (a, ga) in fam.gamma.iter().enumerate() {
        let mut prod = QExpr::one(r);
        for (i, c) in fam.coefficients.iter().enumerate() {
            let k = ga[i].to_i64().expect("relation exponent out of range");
            if k != 0 {
                prod = prod.mul(&c.monomial_pow(k));
            }
        }
        let expect = QExpr::parameter(r, a);
        if prod != expect {
            return Err(MirrorError::ConstraintViolated {
                index: a + 1,
                lhs: prod.to_text(),
                rhs: expect.to_text(),
            });
        }
        // numeric spot check at the stored parameter values
        let qv: Vec<Complex64> = kahler.q.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let lhs = prod.eval(&qv);
        let rhs = qv[a];
        if (lhs - rhs).norm() > 1e-12 * rhs.norm().max(1.0) {
            return Err(MirrorError::ConstraintViolated {
                index: a + 1,
                lhs: format!("{lhs}"),
                rhs: format!("{rhs}"),
            });
        }
    }
    Ok(())
}

/// The mirror of flat C^m: `u v = 1 + Z_1 + ... + Z_{m-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmMirror {
    pub m: usize,
}

impl CmMirror {
    pub fn equation_string(&self) -> String {
        let mut terms = vec!["1".to_string()];
        terms.extend((1..self.m).map(|i| format!("Z{i}")));
        format!("u*v = {}", terms.join(" + "))
    }
}

/// One multiplicative relation `prod_i Z_i^{e_i} = q_a` cutting out the
/// embedded mirror.
#[derive(Debug, Clone)]
pub struct EmbedRelation {
    pub exponents: Vec<i64>,
    pub rhs: QExpr,
}

impl EmbedRelation {
    /// Text form with negative exponents moved to the right-hand side,
    /// e.g. `Z1*Z2*Z3 = q`.
    pub fn to_text(&self) -> String {
        let mut lhs: Vec<String> = Vec::new();
        let mut rhs: Vec<String> = vec![self.rhs.to_text()];
        for (i, &e) in self.exponents.iter().enumerate() {
            let name = format!("Z{}", i + 1);
            if e > 0 {
                lhs.push(if e == 1 { name } else { format!("{name}^{e}") });
            } else if e < 0 {
                let k = -e;
                rhs.push(if k == 1 { name } else { format!("{name}^{k}") });
            }
        }
        let lhs = if lhs.is_empty() { "1".into() } else { lhs.join("*") };
        format!("{lhs} = {}", rhs.join("*"))
    }
}

/// The substitution `Z_i = C_i z^{w_i}` embedding the family into the mirror
/// of C^m, together with the residual relations among the Z_i.
#[derive(Debug, Clone)]
pub struct CmEmbedding {
    pub target: CmMirror,
    /// (coefficient, exponent) of Z_i in the z variables, i = 1..m-1.
    pub substitutions: Vec<(QExpr, Vec<i64>)>,
    pub relations: Vec<EmbedRelation>,
}

pub fn embed_into_cm_mirror(fam: &MirrorFamily) -> CmEmbedding {
    let m = fam.num_rays();
    let w = fam.frame.w_i64();
    let substitutions: Vec<(QExpr, Vec<i64>)> = (0..m - 1)
        .map(|i| (fam.coefficients[i].clone(), w[i].clone()))
        .collect();

    // substituting Z_i into 1 + sum Z_i must reproduce the curve polynomial
    let mut substituted =
        LaurentPolynomial::monomial(vec![0; fam.curve_vars()], QExpr::one(fam.num_params()));
    for (c, wi) in &substitutions {
        substituted.add_term(wi.clone(), c.clone());
    }
    assert_eq!(
        substituted,
        fam.curve_polynomial(),
        "embedding substitution must reproduce the defining curve"
    );

    // relations: for each gamma_a, prod_{i<m} Z_i^{gamma_a[i]} = q_a
    // (the last entry drops out since Z_m would be C_m z^{w_m} = 1)
    let relations: Vec<EmbedRelation> = fam
        .gamma
        .iter()
        .enumerate()
        .map(|(a, ga)| {
            let exponents: Vec<i64> = ga[..m - 1]
                .iter()
                .map(|x| x.to_i64().expect("relation exponent out of range"))
                .collect();
            // formal check: prod_i (C_i z^{w_i})^{e_i} == q_a as a monomial
            let mut coeff = QExpr::one(fam.num_params());
            let mut zexp = vec![0i64; fam.curve_vars()];
            for (i, &e) in exponents.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                coeff = coeff.mul(&fam.coefficients[i].monomial_pow(e));
                for (k, &wk) in w[i].iter().enumerate() {
                    zexp[k] += e * wk;
                }
            }
            assert!(zexp.iter().all(|&x| x == 0), "relation monomial must be z-free");
            let rhs = QExpr::parameter(fam.num_params(), a);
            assert_eq!(coeff, rhs, "embedding relation must equal q_a");
            EmbedRelation { exponents, rhs }
        })
        .collect();

    CmEmbedding { target: CmMirror { m }, substitutions, relations }
}

/// The Landau-Ginzburg presentation: same family, with the proper
/// superpotential being the coordinate function u.
#[derive(Debug, Clone)]
pub struct LandauGinzburgModel {
    pub family: MirrorFamily,
    /// The monomial u in the ambient variables [u, v, z...].
    pub potential: LaurentPolynomial<QExpr>,
}

pub fn landau_ginzburg(fam: &MirrorFamily) -> LandauGinzburgModel {
    let k = fam.curve_vars() + 2;
    let mut e = vec![0i64; k];
    e[0] = 1;
    let potential = LaurentPolynomial::monomial(e, QExpr::one(fam.num_params()));
    LandauGinzburgModel { family: fam.clone(), potential }
}

/// Evidence about singular members of the family at fixed numeric q: a
/// singular point of `uv = f(z)` forces u = v = 0 together with f = 0 and
/// grad f = 0, so the probe Newton-searches for critical points of f with
/// critical value zero.
#[derive(Debug, Clone)]
pub struct SmoothnessProbe {
    pub q: Vec<Complex64>,
    pub search: CriticalSearch,
    pub singular_witness: Option<(Vec<Complex64>, f64)>,
}

pub fn hypersurface_smoothness_probe(
    fam: &MirrorFamily,
    q: &[Complex64],
    phases: usize,
    tol: f64,
) -> SmoothnessProbe {
    let f = fam.curve_at(q);
    let qmag = q.iter().map(|x| x.norm()).fold(1.0_f64, f64::min).max(1e-6);
    let starts = newton_start_grid(fam.curve_vars(), qmag, phases);
    let search = critical_points(&f, &starts, tol);
    let singular_witness = search
        .points
        .iter()
        .map(|p| (p.point.clone(), f.eval(&p.point).norm()))
        .find(|(_, fv)| *fv < 1e-6)
        .map(|(z, fv)| (z, fv));
    SmoothnessProbe { q: q.to_vec(), search, singular_witness }
}

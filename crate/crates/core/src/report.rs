//! Canonical report structures (JSON-stable field order) and the mirror
//! equation text grammar.
//!
//! Floats are serialized as 17-significant-digit strings and rationals as
//! reduced "p/q" strings, so reports are byte-reproducible across runs.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::fanfile::rational_string;
use crate::fibration::{GrossBase, PieceKind};
use crate::laurent::LaurentPolynomial;
use crate::mirror::{CmEmbedding, MirrorFamily};
use crate::numeric::fmt_f64;
use crate::qexpr::QExpr;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Provenance {
    pub input_sha256: String,
    pub tool_version: String,
}

impl Provenance {
    pub fn for_input(canonical: &[u8]) -> Self {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(canonical);
        Provenance {
            input_sha256: format!("{:x}", h.finalize()),
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub ray: usize,
    pub w: Vec<i64>,
    pub coefficient: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MirrorReport {
    pub equation: String,
    pub gauge_cone: Vec<usize>,
    pub coefficients: Vec<CoefficientRow>,
    pub constraints_verified: bool,
    pub constraints: Vec<String>,
    pub fractional_exponents: bool,
    pub embedding_target: String,
    pub embedding_relations: Vec<String>,
    pub provenance: Provenance,
}

impl MirrorReport {
    pub fn build(fam: &MirrorFamily, emb: &CmEmbedding, verified: bool, provenance: Provenance) -> Self {
        let w = fam.frame.w_i64();
        let coefficients = (0..fam.num_rays())
            .map(|i| CoefficientRow {
                ray: i + 1,
                w: w[i].clone(),
                coefficient: fam.coefficients[i].to_text(),
            })
            .collect();
        let constraints = fam
            .gamma
            .iter()
            .enumerate()
            .map(|(a, ga)| {
                let of = |i: usize| format!("C{}^{}", i + 1, ga[i]);
                let factors: Vec<String> = (0..fam.num_rays())
                    .filter(|&i| ga[i] != 0.into())
                    .map(of)
                    .collect();
                format!(
                    "{} = {}",
                    factors.join("*"),
                    QExpr::parameter(fam.num_params(), a).to_text()
                )
            })
            .collect();
        MirrorReport {
            equation: fam.equation_string(),
            gauge_cone: fam.gauge_cone.iter().map(|&i| i + 1).collect(),
            coefficients,
            constraints_verified: verified,
            constraints,
            fractional_exponents: fam.fractional_exponents,
            embedding_target: emb.target.equation_string(),
            embedding_relations: emb.relations.iter().map(|r| r.to_text()).collect(),
            provenance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceReport {
    pub pair: (usize, usize),
    pub kind: String,
    pub vertices: Vec<Vec<String>>,
    pub rays: Vec<Vec<String>>,
    pub bounded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseGraphReport {
    pub n: usize,
    pub wall_height: String,
    pub vertices: Vec<Vec<String>>,
    pub pieces: Vec<PieceReport>,
    pub num_vertices: usize,
    pub num_points: usize,
    pub num_bounded_edges: usize,
    pub num_unbounded_edges: usize,
    pub provenance: Provenance,
}

impl BaseGraphReport {
    pub fn build(base: &GrossBase, provenance: Provenance) -> Self {
        let mut vertices: Vec<Vec<String>> = Vec::new();
        for p in &base.pieces {
            for v in &p.vertices {
                let s: Vec<String> = v.iter().map(rational_string).collect();
                if !vertices.contains(&s) {
                    vertices.push(s);
                }
            }
        }
        let pieces = base
            .pieces
            .iter()
            .map(|p| PieceReport {
                pair: (p.pair.0 + 1, p.pair.1 + 1),
                kind: match p.kind() {
                    PieceKind::Point => "point",
                    PieceKind::Segment => "segment",
                    PieceKind::Ray => "ray",
                    PieceKind::Line => "line",
                    PieceKind::Higher => "higher",
                }
                .to_string(),
                vertices: p
                    .vertices
                    .iter()
                    .map(|v| v.iter().map(rational_string).collect())
                    .collect(),
                rays: p
                    .rays
                    .iter()
                    .map(|d| d.iter().map(|c| c.to_string()).collect())
                    .collect(),
                bounded: p.bounded,
            })
            .collect();
        let s = base.summary();
        BaseGraphReport {
            n: base.n,
            wall_height: fmt_f64(base.eps_abs),
            vertices,
            pieces,
            num_vertices: s.vertices,
            num_points: s.points,
            num_bounded_edges: s.bounded_edges,
            num_unbounded_edges: s.unbounded_edges,
            provenance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiskReport {
    pub samples: usize,
    pub seed: u64,
    pub quadrature_order: usize,
    pub max_area_rel_err: String,
    pub maslov_consistent: bool,
    pub boundary_modulus_max_err: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPointRow {
    pub z: Vec<String>,
    pub value: String,
    pub grad_norm: String,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPointReport {
    pub q: Vec<String>,
    pub tol: String,
    pub attempted_starts: usize,
    pub converged_starts: usize,
    pub points: Vec<CriticalPointRow>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub calabi_yau: bool,
    pub u: Vec<String>,
    pub smooth: bool,
    pub cone_determinants: Vec<String>,
    pub semiprojective: bool,
    pub lambda_witness: Vec<String>,
    pub relations: Vec<Vec<String>>,
    pub q: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperpotentialTermRow {
    pub exponent: Vec<i64>,
    /// ell_i(x) as a rational multiple of 2 pi.
    pub area_over_two_pi: String,
    pub weight: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperpotentialReport {
    pub x: Vec<String>,
    pub terms: Vec<SuperpotentialTermRow>,
    pub value_at_b_zero: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<VerifyCheckRow>,
    pub all_passed: bool,
    pub provenance: Provenance,
}

pub fn fmt_complex(c: Complex64) -> String {
    format!("{}{}{}i", fmt_f64(c.re), if c.im < 0.0 { "-" } else { "+" }, fmt_f64(c.im.abs()))
}

/// Parse the right-hand side of a canonical mirror equation back into a
/// Laurent polynomial with q-monomial coefficients. Inverse of the report's
/// equation writer on its image.
pub fn parse_mirror_equation(
    text: &str,
    z_vars: usize,
    q_params: usize,
) -> Result<LaurentPolynomial<QExpr>, String> {
    let rhs = text
        .strip_prefix("u*v = ")
        .ok_or_else(|| "equation must start with \"u*v = \"".to_string())?;
    let mut poly = LaurentPolynomial::zero(z_vars);
    for term in rhs.split(" + ") {
        let mut coeff = QExpr::one(q_params);
        let mut exps = vec![0i64; z_vars];
        for factor in term.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(format!("empty factor in term {term:?}"));
            }
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, e),
                None => (factor, "1"),
            };
            if let Some(idx) = base.strip_prefix('z') {
                let j: usize = idx.parse().map_err(|_| format!("bad variable {base:?}"))?;
                if j == 0 || j > z_vars {
                    return Err(format!("variable {base} out of range"));
                }
                let e: i64 = exp.parse().map_err(|_| format!("bad exponent {exp:?}"))?;
                exps[j - 1] += e;
            } else if base == "q" || base.starts_with('q') {
                let a: usize = if base == "q" {
                    1
                } else {
                    base[1..].parse().map_err(|_| format!("bad parameter {base:?}"))?
                };
                if a == 0 || a > q_params {
                    return Err(format!("parameter {base} out of range"));
                }
                let e = crate::fanfile::parse_rational(exp)?;
                let mut qe = vec![BigRational::from_integer(0.into()); q_params];
                qe[a - 1] = e;
                coeff = coeff.mul(&QExpr::monomial(BigRational::one(), qe));
            } else {
                let c = crate::fanfile::parse_rational(base)?;
                if !exp.is_empty() && exp != "1" {
                    return Err(format!("constants cannot carry exponents: {factor:?}"));
                }
                coeff = coeff.mul(&QExpr::constant(q_params, c));
            }
        }
        poly.add_term(exps, coeff);
    }
    Ok(poly)
}

//! Formal expressions in the Kahler parameters q_1, ..., q_r.
//!
//! A [`QExpr`] is a finite rational combination of monomials
//! `prod_a q_a^{e_a}` with rational exponents e_a. Mirror coefficients are
//! single monomials; sums only appear transiently inside Laurent-polynomial
//! arithmetic, so the full (commutative-algebra) closure keeps everything
//! total without a separate polynomial type.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exponent vector in Q^r, ordered for canonical term order.
pub type QExponents = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpr {
    /// Number of Kahler parameters r (exponent vectors all have this length).
    arity: usize,
    terms: BTreeMap<QExponents, BigRational>,
}

impl QExpr {
    pub fn zero(arity: usize) -> Self {
        QExpr { arity, terms: BTreeMap::new() }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigRational::one())
    }

    pub fn constant(arity: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![BigRational::zero(); arity], c);
        }
        QExpr { arity, terms }
    }

    /// The single monomial c * prod q_a^{e_a}.
    pub fn monomial(c: BigRational, exps: QExponents) -> Self {
        let arity = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        QExpr { arity, terms }
    }

    /// The parameter q_a itself.
    pub fn parameter(arity: usize, a: usize) -> Self {
        assert!(a < arity);
        let mut exps = vec![BigRational::zero(); arity];
        exps[a] = BigRational::one();
        Self::monomial(BigRational::one(), exps)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| c.is_one() && e.iter().all(|x| x.is_zero()))
    }

    /// Some((coeff, exps)) when the expression is a single monomial.
    pub fn as_monomial(&self) -> Option<(&BigRational, &QExponents)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (c, e))
        } else {
            None
        }
    }

    pub fn add(&self, other: &QExpr) -> QExpr {
        assert_eq!(self.arity, other.arity);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        QExpr { arity: self.arity, terms }
    }

    pub fn neg(&self) -> QExpr {
        QExpr {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &QExpr) -> QExpr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QExpr) -> QExpr {
        assert_eq!(self.arity, other.arity);
        let mut out = QExpr::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exps: QExponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = c1 * c2;
                let entry = out.terms.entry(exps).or_insert_with(BigRational::zero);
                *entry += c;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn mul_int(&self, k: i64) -> QExpr {
        if k == 0 {
            return QExpr::zero(self.arity);
        }
        let f = BigRational::from_integer(k.into());
        QExpr {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * &f)).collect(),
        }
    }

    /// Integer power of a monomial (negative allowed). Panics on sums; the
    /// constraint checks only ever exponentiate solved coefficients, which
    /// are monomials by construction.
    pub fn monomial_pow(&self, k: i64) -> QExpr {
        let (c, e) = self.as_monomial().expect("monomial_pow on a non-monomial QExpr");
        assert!(!c.is_zero());
        let coeff = if k >= 0 {
            c.pow(k as i32)
        } else {
            c.recip().pow((-k) as i32)
        };
        let kf = BigRational::from_integer(k.into());
        QExpr::monomial(coeff, e.iter().map(|x| x * &kf).collect())
    }

    /// True when some exponent is not an integer.
    pub fn has_fractional_exponent(&self) -> bool {
        self.terms
            .keys()
            .any(|e| e.iter().any(|x| !x.denom().is_one()))
    }

    /// Evaluate at numeric parameter values. Non-integer exponents of
    /// non-positive-real bases go through the principal branch.
    pub fn eval(&self, q: &[Complex64]) -> Complex64 {
        assert_eq!(q.len(), self.arity);
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = Complex64::new(c.to_f64().expect("coefficient out of f64 range"), 0.0);
            for (a, exp) in e.iter().enumerate() {
                if exp.is_zero() {
                    continue;
                }
                if exp.denom().is_one() {
                    let k = exp.numer().to_i32().expect("exponent too large");
                    term *= q[a].powi(k);
                } else {
                    term *= q[a].powc(Complex64::new(exp.to_f64().unwrap(), 0.0));
                }
            }
            sum += term;
        }
        sum
    }

    fn param_name(arity: usize, a: usize) -> String {
        if arity == 1 {
            "q".to_string()
        } else {
            format!("q{}", a + 1)
        }
    }

    /// Canonical text form, e.g. `1`, `q`, `q^2`, `q1*q2^-1`, `3/2*q`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut factors: Vec<String> = Vec::new();
                for (a, exp) in e.iter().enumerate() {
                    if exp.is_zero() {
                        continue;
                    }
                    let name = Self::param_name(self.arity, a);
                    if exp.is_one() {
                        factors.push(name);
                    } else {
                        factors.push(format!("{name}^{exp}"));
                    }
                }
                if factors.is_empty() {
                    format!("{c}")
                } else if c.is_one() {
                    factors.join("*")
                } else if (-c.clone()).is_one() {
                    format!("-{}", factors.join("*"))
                } else {
                    format!("{c}*{}", factors.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }

    /// True when printing needs parentheses before a `*monomial` suffix.
    pub fn is_composite(&self) -> bool {
        self.terms.len() > 1
    }
}

impl fmt::Display for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

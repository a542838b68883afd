//! Laurent polynomials: finitely supported maps from integer exponent
//! vectors to coefficients.
//!
//! Terms live in a `BTreeMap`, so iteration, equality and display are
//! canonical (lexicographic in the exponent vector) with no extra sorting.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::qexpr::QExpr;

/// Coefficient ring interface for [`LaurentPolynomial`].
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    /// Multiply by a machine integer (exponent weights in log-derivatives).
    fn mul_int(&self, k: i64) -> Self;
    fn coeff_text(&self) -> String;
    /// Whether `coeff_text` must be parenthesized in front of `*z^w`.
    fn is_composite(&self) -> bool {
        false
    }
}

impl Coeff for BigRational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn mul_int(&self, k: i64) -> Self {
        self * BigRational::from_integer(k.into())
    }
    fn coeff_text(&self) -> String {
        format!("{self}")
    }
}

impl Coeff for Complex64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_one(&self) -> bool {
        self.re == 1.0 && self.im == 0.0
    }
    fn mul_int(&self, k: i64) -> Self {
        self * k as f64
    }
    fn coeff_text(&self) -> String {
        if self.im == 0.0 {
            format!("{:.17e}", self.re)
        } else {
            format!("({:.17e}{:+.17e}i)", self.re, self.im)
        }
    }
}

impl Coeff for QExpr {
    fn add(&self, other: &Self) -> Self {
        QExpr::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        QExpr::mul(self, other)
    }
    fn neg(&self) -> Self {
        QExpr::neg(self)
    }
    fn is_zero(&self) -> bool {
        QExpr::is_zero(self)
    }
    fn is_one(&self) -> bool {
        QExpr::is_one(self)
    }
    fn mul_int(&self, k: i64) -> Self {
        QExpr::mul_int(self, k)
    }
    fn coeff_text(&self) -> String {
        self.to_text()
    }
    fn is_composite(&self) -> bool {
        QExpr::is_composite(self)
    }
}

/// Exponent vector in Z^k.
pub type Exponents = Vec<i64>;

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial<C: Coeff> {
    vars: usize,
    terms: BTreeMap<Exponents, C>,
}

impl<C: Coeff> LaurentPolynomial<C> {
    pub fn zero(vars: usize) -> Self {
        LaurentPolynomial { vars, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Exponents, c: C) -> Self {
        let vars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPolynomial { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[i64]) -> Option<&C> {
        self.terms.get(exps)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Exponents, c: C) {
        assert_eq!(exps.len(), self.vars, "exponent arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            None => {
                self.terms.insert(exps, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(exps, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars);
        let mut out = Self::zero(self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exps: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(exps, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, f: &C) -> Self {
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul(f));
        }
        out
    }

    /// Multiply by the monomial z^shift.
    pub fn shift(&self, shift: &[i64]) -> Self {
        assert_eq!(shift.len(), self.vars);
        LaurentPolynomial {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// The logarithmic derivative z_j d/dz_j.
    pub fn log_derivative(&self, j: usize) -> Self {
        assert!(j < self.vars);
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul_int(e[j]));
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentPolynomial<D> {
        let mut out = LaurentPolynomial::zero(self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Render with explicit variable names, canonical term order.
    pub fn format_with(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.vars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format_term(names, e, c))
            .collect();
        parts.join(" + ")
    }
}

pub fn format_term<C: Coeff>(names: &[&str], exps: &[i64], c: &C) -> String {
    let mono: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &k)| k != 0)
        .map(|(j, &k)| {
            if k == 1 {
                names[j].to_string()
            } else {
                format!("{}^{}", names[j], k)
            }
        })
        .collect();
    if mono.is_empty() {
        return c.coeff_text();
    }
    let mono = mono.join("*");
    if c.is_one() {
        mono
    } else if c.is_composite() {
        format!("({})*{}", c.coeff_text(), mono)
    } else {
        format!("{}*{}", c.coeff_text(), mono)
    }
}

impl LaurentPolynomial<Complex64> {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.vars);
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = *c;
            for (j, &k) in e.iter().enumerate() {
                if k != 0 {
                    term *= z[j].powi(k as i32);
                }
            }
            sum += term;
        }
        sum
    }

    /// Gradient of the log-derivative system g_j = z_j dW/dz_j, evaluated
    /// directly from the exponent data.
    pub fn log_gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.vars)
            .map(|j| {
                let mut sum = Complex64::new(0.0, 0.0);
                for (e, c) in &self.terms {
                    if e[j] == 0 {
                        continue;
                    }
                    let mut term = *c * e[j] as f64;
                    for (l, &k) in e.iter().enumerate() {
                        if k != 0 {
                            term *= z[l].powi(k as i32);
                        }
                    }
                    sum += term;
                }
                sum
            })
            .collect()
    }
}

impl LaurentPolynomial<BigRational> {
    pub fn to_complex(&self) -> LaurentPolynomial<Complex64> {
        self.map_coeffs(|c| Complex64::new(c.to_f64().expect("coefficient out of range"), 0.0))
    }
}

impl LaurentPolynomial<QExpr> {
    /// Specialize the Kahler parameters to numeric values.
    pub fn specialize_q(&self, q: &[Complex64]) -> LaurentPolynomial<Complex64> {
        self.map_coeffs(|c| c.eval(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn cpoly(terms: &[(&[i64], f64)]) -> LaurentPolynomial<Complex64> {
        let mut p = LaurentPolynomial::zero(terms[0].0.len());
        for (e, c) in terms {
            p.add_term(e.to_vec(), Complex64::new(*c, 0.0));
        }
        p
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = cpoly(&[(&[1, 0], 1.0), (&[0, 1], 2.0)]);
        let q = cpoly(&[(&[1, 0], -1.0)]);
        let s = p.add(&q);
        assert_eq!(s.num_terms(), 1);
        assert!(s.coefficient(&[1, 0]).is_none());
    }

    #[test]
    fn product_eval_matches_pointwise_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let vars = rng.gen_range(1..=3);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut p = LaurentPolynomial::zero(vars);
                for _ in 0..rng.gen_range(1..=4) {
                    let e: Exponents = (0..vars).map(|_| rng.gen_range(-3..=3)).collect();
                    p.add_term(
                        e,
                        Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                    );
                }
                p
            };
            let f = mk(&mut rng);
            let g = mk(&mut rng);
            let fg = f.mul(&g);
            let z: Vec<Complex64> = (0..vars)
                .map(|_| {
                    Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..6.28))
                })
                .collect();
            let lhs = fg.eval(&z);
            let rhs = f.eval(&z) * g.eval(&z);
            let scale = rhs.norm().max(1.0);
            assert!((lhs - rhs).norm() / scale < 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn log_derivative_matches_formula() {
        // W = z1 + q z1^-1 with q = 1/4: z dW/dz = z1 - q z1^-1
        let w = cpoly(&[(&[1], 1.0), (&[-1], 0.25)]);
        let d = w.log_derivative(0);
        let z = [Complex64::new(0.5, 0.0)];
        assert!((d.eval(&z) - Complex64::new(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn display_is_lexicographic_with_negative_powers() {
        let p = cpoly(&[(&[1, 0], 1.0), (&[-1, -1], 1.0), (&[0, 0], 1.0)]);
        let s = p.map_coeffs(|c| {
            BigRational::from_integer((c.re as i64).into())
        });
        assert_eq!(
            s.format_with(&["z1", "z2"]),
            "z1^-1*z2^-1 + 1 + z1"
        );
    }
}

//! Exact rational feasibility by Fourier-Motzkin elimination.
//!
//! Intended for desk-scale systems (a handful of variables); the witness
//! point and every comparison are exact rationals, so strict inequalities
//! are honored with no tolerance.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::RationalVector;

/// Relation of a linear constraint `<coeffs, y> REL rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Gt,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinCon {
    pub coeffs: RationalVector,
    pub rel: Rel,
    pub rhs: BigRational,
}

impl LinCon {
    pub fn new(coeffs: RationalVector, rel: Rel, rhs: BigRational) -> Self {
        LinCon { coeffs, rel, rhs }
    }

    fn describe(&self) -> String {
        let lhs: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*y{i}"))
            .collect();
        let lhs = if lhs.is_empty() { "0".to_string() } else { lhs.join(" + ") };
        let rel = match self.rel {
            Rel::Gt => ">",
            Rel::Ge => ">=",
            Rel::Eq => "=",
        };
        format!("{lhs} {rel} {}", self.rhs)
    }
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Feasible(RationalVector),
    /// Carries the derived contradictory constraint as a certificate.
    Infeasible(String),
}

impl LpOutcome {
    pub fn point(&self) -> Option<&RationalVector> {
        match self {
            LpOutcome::Feasible(p) => Some(p),
            LpOutcome::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }
}

/// Strict-only entry point: every constraint reads `<c, y> > b`.
pub fn lp_feasible_strict(constraints: &[(RationalVector, BigRational)], unknowns: usize) -> LpOutcome {
    let cons: Vec<LinCon> = constraints
        .iter()
        .map(|(c, b)| LinCon::new(c.clone(), Rel::Gt, b.clone()))
        .collect();
    feasible(&cons, unknowns)
}

/// General mixed-relation feasibility. Equalities are split into opposing
/// inequalities before elimination.
pub fn feasible(constraints: &[LinCon], unknowns: usize) -> LpOutcome {
    let mut sys: Vec<LinCon> = Vec::new();
    for c in constraints {
        assert_eq!(c.coeffs.len(), unknowns, "constraint arity mismatch");
        match c.rel {
            Rel::Eq => {
                sys.push(LinCon::new(c.coeffs.clone(), Rel::Ge, c.rhs.clone()));
                let neg: RationalVector = c.coeffs.iter().map(|x| -x.clone()).collect();
                sys.push(LinCon::new(neg, Rel::Ge, -c.rhs.clone()));
            }
            _ => sys.push(c.clone()),
        }
    }

    let mut remaining: Vec<usize> = (0..unknowns).collect();
    // (variable, constraints mentioning it at that level)
    let mut levels: Vec<(usize, Vec<LinCon>)> = Vec::new();

    while !remaining.is_empty() {
        match check_variable_free(&sys) {
            Ok(()) => {}
            Err(msg) => return LpOutcome::Infeasible(msg),
        }
        // greedy: eliminate the variable with the fewest lower*upper products
        let &var = remaining
            .iter()
            .min_by_key(|&&v| {
                let lo = sys.iter().filter(|c| c.coeffs[v].is_positive()).count();
                let hi = sys.iter().filter(|c| c.coeffs[v].is_negative()).count();
                lo * hi
            })
            .unwrap();
        remaining.retain(|&v| v != var);

        let mut lowers = Vec::new();
        let mut uppers = Vec::new();
        let mut rest = Vec::new();
        for c in sys.drain(..) {
            if c.coeffs[var].is_positive() {
                lowers.push(normalize_on(c, var));
            } else if c.coeffs[var].is_negative() {
                uppers.push(normalize_on(c, var));
            } else {
                rest.push(c);
            }
        }
        // lower: y_var >= rhs - <rest, y>; upper: -y_var >= rhs' - ...
        for lo in &lowers {
            for up in &uppers {
                let mut coeffs: RationalVector = (0..unknowns)
                    .map(|j| &lo.coeffs[j] + &up.coeffs[j])
                    .collect();
                coeffs[var] = BigRational::zero();
                let rel = if lo.rel == Rel::Gt || up.rel == Rel::Gt {
                    Rel::Gt
                } else {
                    Rel::Ge
                };
                // (lo) y >= b1 - ..., (up) y <= ..., sum eliminates y
                rest.push(LinCon::new(coeffs, rel, &lo.rhs + &up.rhs));
            }
        }
        let mut level_cons = lowers;
        level_cons.extend(uppers);
        levels.push((var, level_cons));
        sys = dedup(rest);
    }
    if let Err(msg) = check_variable_free(&sys) {
        return LpOutcome::Infeasible(msg);
    }

    // back-substitution
    let mut x = vec![BigRational::zero(); unknowns];
    for (var, cons) in levels.iter().rev() {
        let mut lower: Option<(BigRational, bool)> = None; // (bound, strict)
        let mut upper: Option<(BigRational, bool)> = None;
        for c in cons {
            // normalized: coeff on var is +1 (lower) or -1 (upper)
            let mut bound = c.rhs.clone();
            for (j, coeff) in c.coeffs.iter().enumerate() {
                if j != *var && !coeff.is_zero() {
                    bound -= coeff * &x[j];
                }
            }
            let strict = c.rel == Rel::Gt;
            if c.coeffs[*var].is_one() {
                lower = Some(match lower {
                    None => (bound, strict),
                    Some((b, s)) => {
                        if bound > b {
                            (bound, strict)
                        } else if bound == b {
                            (b, s || strict)
                        } else {
                            (b, s)
                        }
                    }
                });
            } else {
                let bound = -bound; // upper bound value
                upper = Some(match upper {
                    None => (bound, strict),
                    Some((b, s)) => {
                        if bound < b {
                            (bound, strict)
                        } else if bound == b {
                            (b, s || strict)
                        } else {
                            (b, s)
                        }
                    }
                });
            }
        }
        x[*var] = match (lower, upper) {
            (None, None) => BigRational::zero(),
            (Some((l, _)), None) => l + BigRational::one(),
            (None, Some((u, _))) => u - BigRational::one(),
            (Some((l, ls)), Some((u, us))) => {
                if l == u {
                    debug_assert!(!ls && !us, "Fourier-Motzkin left an empty interval");
                    l
                } else {
                    debug_assert!(l < u);
                    (l + u) / BigRational::from_integer(2.into())
                }
            }
        };
    }
    LpOutcome::Feasible(x)
}

/// Check constraints with no remaining variables (all-zero coefficients).
fn check_variable_free(sys: &[LinCon]) -> Result<(), String> {
    for c in sys {
        if c.coeffs.iter().all(|x| x.is_zero()) {
            let ok = match c.rel {
                Rel::Gt => c.rhs.is_negative(),
                Rel::Ge => !c.rhs.is_positive(),
                Rel::Eq => c.rhs.is_zero(),
            };
            if !ok {
                return Err(format!("derived contradiction: {}", c.describe()));
            }
        }
    }
    Ok(())
}

/// Scale so the coefficient on `var` is +-1.
fn normalize_on(mut c: LinCon, var: usize) -> LinCon {
    let f = c.coeffs[var].abs().recip();
    for x in c.coeffs.iter_mut() {
        *x *= &f;
    }
    c.rhs *= &f;
    c
}

/// Drop satisfied variable-free constraints and exact duplicates (keeping the
/// tightest rhs). Keeps the growth of the elimination in check.
fn dedup(sys: Vec<LinCon>) -> Vec<LinCon> {
    let mut out: Vec<LinCon> = Vec::new();
    for c in sys {
        if c.coeffs.iter().all(|x| x.is_zero()) {
            // keep violated ones so they surface as certificates
            let ok = match c.rel {
                Rel::Gt => c.rhs.is_negative(),
                Rel::Ge => !c.rhs.is_positive(),
                Rel::Eq => c.rhs.is_zero(),
            };
            if ok {
                continue;
            }
            out.push(c);
            continue;
        }
        let mut replaced = false;
        for prev in out.iter_mut() {
            if prev.coeffs == c.coeffs {
                if c.rhs > prev.rhs || (c.rhs == prev.rhs && c.rel == Rel::Gt) {
                    *prev = c.clone();
                }
                replaced = true;
                break;
            }
        }
        if !replaced {
            out.push(c);
        }
    }
    out
}

/// Exact satisfaction check for a mixed system at a given point.
pub fn satisfies(constraints: &[LinCon], point: &[BigRational]) -> bool {
    constraints.iter().all(|c| {
        let lhs: BigRational = c
            .coeffs
            .iter()
            .zip(point)
            .fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
        match c.rel {
            Rel::Gt => lhs > c.rhs,
            Rel::Ge => lhs >= c.rhs,
            Rel::Eq => lhs == c.rhs,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn open_interval_has_witness() {
        // y > 0 and y < 1
        let cons = vec![
            (vec![rat(1, 1)], rat(0, 1)),
            (vec![rat(-1, 1)], rat(-1, 1)),
        ];
        let out = lp_feasible_strict(&cons, 1);
        let p = out.point().expect("feasible");
        assert!(p[0] > rat(0, 1) && p[0] < rat(1, 1));
    }

    #[test]
    fn empty_interval_is_infeasible() {
        let cons = vec![
            (vec![rat(1, 1)], rat(0, 1)),
            (vec![rat(-1, 1)], rat(0, 1)),
        ];
        assert!(!lp_feasible_strict(&cons, 1).is_feasible());
    }

    #[test]
    fn equalities_mix_with_strict() {
        // y0 = 2, y0 + y1 > 3, y1 < 2
        let cons = vec![
            LinCon::new(vec![rat(1, 1), rat(0, 1)], Rel::Eq, rat(2, 1)),
            LinCon::new(vec![rat(1, 1), rat(1, 1)], Rel::Gt, rat(3, 1)),
            LinCon::new(vec![rat(0, 1), rat(-1, 1)], Rel::Gt, rat(-2, 1)),
        ];
        let out = feasible(&cons, 2);
        let p = out.point().expect("feasible");
        assert!(satisfies(&cons, p));
    }

    #[test]
    fn returned_points_satisfy_random_systems_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut feas = 0usize;
        for _ in 0..200 {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=6);
            let cons: Vec<LinCon> = (0..k)
                .map(|_| {
                    let coeffs: RationalVector =
                        (0..n).map(|_| rat(rng.gen_range(-3..=3), 1)).collect();
                    let rel = if rng.gen_bool(0.5) { Rel::Gt } else { Rel::Ge };
                    LinCon::new(coeffs, rel, rat(rng.gen_range(-4..=4), 1))
                })
                .collect();
            if let LpOutcome::Feasible(p) = feasible(&cons, n) {
                feas += 1;
                assert!(satisfies(&cons, &p), "witness violates a constraint");
            }
        }
        assert!(feas > 20, "sampler degenerate");
    }

    #[test]
    fn unbounded_directions_get_finite_witness() {
        // y0 > 5, no upper bound
        let cons = vec![(vec![rat(1, 1), rat(0, 1)], rat(5, 1))];
        let p = lp_feasible_strict(&cons, 2);
        let p = p.point().unwrap();
        assert!(p[0] > rat(5, 1));
    }
}

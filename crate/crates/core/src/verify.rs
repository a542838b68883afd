//! The bundled verification suite: one named check per module invariant,
//! deterministic given the seed. The CLI `verify` subcommand runs the whole
//! list and fails with exit code 2 when any check fails.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::disks::{
    disk_area_closed_form, disk_area_numeric, evaluate_disk, maslov_index, superpotential,
    wall_crossing_check, BlaschkeDisk,
};
use crate::fan::{adapted_basis, calabi_yau_vector, FanData, KahlerData, MomentPolytope};
use crate::fibration::chamber_compatibility_check;
use crate::laurent::LaurentPolynomial;
use crate::mirror::{embed_into_cm_mirror, solve_coefficients, solve_default, verify_constraints};
use crate::qexpr::QExpr;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.to_string(), passed, detail }
}

/// Run every check against one fan/Kahler input.
pub fn run_all(
    fan: &FanData,
    kahler: &KahlerData,
    eps_abs: f64,
    seed: u64,
    samples: usize,
) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let u = match calabi_yau_vector(fan) {
        Ok(u) => u,
        Err(e) => {
            out.push(outcome("calabi-yau", false, e.to_string()));
            return out;
        }
    };
    let frame = match adapted_basis(fan, &u) {
        Ok(f) => f,
        Err(e) => {
            out.push(outcome("adapted-basis", false, e.to_string()));
            return out;
        }
    };
    let fam = match solve_default(fan, &frame, kahler) {
        Ok(f) => f,
        Err(e) => {
            out.push(outcome("mirror-solve", false, e.to_string()));
            return out;
        }
    };

    // formal coefficient constraints
    out.push(match verify_constraints(&fam, kahler) {
        Ok(()) => outcome(
            "constraint-identities",
            true,
            format!("{} relation(s) verified formally and numerically", fam.num_params()),
        ),
        Err(e) => outcome("constraint-identities", false, e.to_string()),
    });

    // wall crossing (symbolic + numeric + chart cover)
    let qv: Vec<Complex64> = kahler.q.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let wc = wall_crossing_check(&fam, &qv, samples, seed, 1e-12);
    out.push(outcome(
        "wall-crossing",
        wc.passed(),
        if wc.passed() {
            format!(
                "symbolic identity exact; {} numeric samples, max relative residual {:.3e}",
                wc.numeric_samples, wc.numeric_max_rel
            )
        } else {
            wc.failures.join("; ")
        },
    ));

    // embedding into the mirror of C^m
    let emb = embed_into_cm_mirror(&fam);
    out.push(outcome(
        "embedding-identity",
        emb.relations.len() == fam.num_params(),
        format!(
            "substitution reproduces the curve; {} residual relation(s)",
            emb.relations.len()
        ),
    ));

    // gauge independence, when a second admissible cone exists
    out.push(gauge_independence_check(fan, kahler, &fam));

    // lift-vs-quotient compatibility
    let chamber = chamber_compatibility_check(fan, kahler, eps_abs, samples, seed);
    out.push(outcome(
        "quotient-consistency",
        chamber.passed(),
        format!(
            "{}/{} lifts agree (max coord err {:.3e}, max height err {:.3e})",
            chamber.agreed, chamber.total, chamber.max_coord_err, chamber.max_height_err
        ),
    ));

    // disk area & index oracle
    out.push(disk_oracle_check(fan, kahler, seed, samples.min(100)));

    // superpotential invariants
    out.push(periodicity_check(fan, kahler, seed));
    out.push(gradient_check(fan, kahler, seed));

    out
}

fn gauge_independence_check(
    fan: &FanData,
    kahler: &KahlerData,
    fam: &crate::mirror::MirrorFamily,
) -> CheckOutcome {
    let m = fan.num_rays();
    let other = fan.max_cones().iter().find(|c| {
        let mut sorted = c.to_vec();
        sorted.sort_unstable();
        sorted != fam.gauge_cone && c.contains(&(m - 1)) && fan.cone_matrix(c).is_unimodular()
    });
    let Some(cone) = other else {
        return outcome("gauge-independence", true, "single admissible gauge cone".into());
    };
    let fam_b = match solve_coefficients(fan, &fam.frame, kahler, cone) {
        Ok(f) => f,
        Err(e) => return outcome("gauge-independence", false, e.to_string()),
    };
    match rescaling_between(fam, &fam_b) {
        Ok(()) => outcome(
            "gauge-independence",
            true,
            format!("families for cones {:?} and {:?} differ by a monomial rescaling",
                fam.gauge_cone.iter().map(|&i| i + 1).collect::<Vec<_>>(),
                fam_b.gauge_cone.iter().map(|&i| i + 1).collect::<Vec<_>>()),
        ),
        Err(e) => outcome("gauge-independence", false, e),
    }
}

/// Exhibit q-monomials c_j with C'_i prod_j c_j^{w_ij} = C_i and verify the
/// induced Laurent identity between the two curve polynomials.
pub fn rescaling_between(
    fam_a: &crate::mirror::MirrorFamily,
    fam_b: &crate::mirror::MirrorFamily,
) -> Result<(), String> {
    let w = fam_a.frame.w_i64();
    let r = fam_a.num_params();
    let k = fam_a.curve_vars();
    let m = fam_a.num_rays();
    let mut diff = Vec::with_capacity(m);
    for i in 0..m {
        let (ca, ea) = fam_a.coefficients[i]
            .as_monomial()
            .ok_or("coefficients must be monomials")?;
        let (cb, eb) = fam_b.coefficients[i]
            .as_monomial()
            .ok_or("coefficients must be monomials")?;
        if !ca.is_one() || !cb.is_one() {
            return Err("coefficients must be unit monomials".into());
        }
        let d: Vec<BigRational> = ea.iter().zip(eb).map(|(x, y)| x - y).collect();
        diff.push(d);
    }
    let wmat: Vec<Vec<BigRational>> = w
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut x = vec![vec![BigRational::zero(); r]; k];
    for a in 0..r {
        let rhs: Vec<BigRational> = diff.iter().map(|d| d[a].clone()).collect();
        let sol = crate::lattice::rat_solve(&wmat, &rhs)
            .ok_or("no monomial rescaling matches the coefficient difference")?;
        for (j, xj) in x.iter_mut().enumerate() {
            xj[a] = sol[j].clone();
        }
    }
    let c: Vec<QExpr> = (0..k)
        .map(|j| QExpr::monomial(BigRational::one(), x[j].clone()))
        .collect();
    let mut rescaled = LaurentPolynomial::zero(k);
    for (e, coeff) in fam_b.curve_polynomial().terms() {
        let mut factor = coeff.clone();
        for (j, &ej) in e.iter().enumerate() {
            if ej != 0 {
                factor = factor.mul(&c[j].monomial_pow(ej));
            }
        }
        rescaled.add_term(e.clone(), factor);
    }
    if rescaled == fam_a.curve_polynomial() {
        Ok(())
    } else {
        Err("rescaled curve polynomial does not match".into())
    }
}

fn disk_oracle_check(fan: &FanData, kahler: &KahlerData, seed: u64, samples: usize) -> CheckOutcome {
    let poly = MomentPolytope::new(fan.clone(), kahler.clone());
    let x = match poly.interior_point() {
        Ok(x) => x,
        Err(e) => return outcome("disk-area-index", false, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel = 0.0_f64;
    let mut max_boundary = 0.0_f64;
    for _ in 0..samples {
        let disk = match BlaschkeDisk::random(&poly, &x, &mut rng, 3) {
            Ok(d) => d,
            Err(e) => return outcome("disk-area-index", false, e.to_string()),
        };
        if maslov_index(&disk) != 2 * disk.total_degree() {
            return outcome("disk-area-index", false, "Maslov index mismatch".into());
        }
        let expect = disk_area_closed_form(&disk);
        let area = match disk_area_numeric(&disk, 32) {
            Ok(a) => a,
            Err(e) => return outcome("disk-area-index", false, e.to_string()),
        };
        if expect > 0.0 {
            max_rel = max_rel.max((area - expect).abs() / expect);
        } else {
            max_rel = max_rel.max(area.abs());
        }
        // boundary samples stay on the torus
        let radii = disk.radii();
        for t in 0..8 {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / 8.0;
            let p = evaluate_disk(&disk, Complex64::from_polar(1.0, theta));
            for (cv, rv) in p.coords.iter().zip(&radii) {
                max_boundary = max_boundary.max((cv.norm() - rv).abs());
            }
        }
    }
    let passed = max_rel < 1e-6 && max_boundary < 1e-12;
    outcome(
        "disk-area-index",
        passed,
        format!(
            "{samples} disks: max area error {max_rel:.3e} (rel), max boundary modulus error {max_boundary:.3e}"
        ),
    )
}

fn periodicity_check(fan: &FanData, kahler: &KahlerData, seed: u64) -> CheckOutcome {
    let poly = MomentPolytope::new(fan.clone(), kahler.clone());
    let x = match poly.interior_point() {
        Ok(x) => x,
        Err(e) => return outcome("superpotential-periodicity", false, e.to_string()),
    };
    let w = match superpotential(&poly, &x) {
        Ok(w) => w,
        Err(e) => return outcome("superpotential-periodicity", false, e.to_string()),
    };
    let n = fan.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut max_rel = 0.0_f64;
    for _ in 0..50 {
        let b: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.2..0.2)))
            .collect();
        let shift: Vec<Complex64> = b
            .iter()
            .map(|bi| bi + Complex64::new(rng.gen_range(-3i32..=3) as f64, 0.0))
            .collect();
        let w1 = w.eval(&b);
        let w2 = w.eval(&shift);
        max_rel = max_rel.max((w1 - w2).norm() / w1.norm().max(1e-30));
    }
    outcome(
        "superpotential-periodicity",
        max_rel < 1e-12,
        format!("max relative drift over integer shifts: {max_rel:.3e}"),
    )
}

fn gradient_check(fan: &FanData, kahler: &KahlerData, seed: u64) -> CheckOutcome {
    let poly = MomentPolytope::new(fan.clone(), kahler.clone());
    let x = match poly.interior_point() {
        Ok(x) => x,
        Err(e) => return outcome("superpotential-gradient", false, e.to_string()),
    };
    let w = match superpotential(&poly, &x) {
        Ok(w) => w.as_y_polynomial(),
        Err(e) => return outcome("superpotential-gradient", false, e.to_string()),
    };
    let n = fan.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let h = 1e-6;
    let mut max_rel = 0.0_f64;
    for _ in 0..50 {
        let z: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::from_polar(
                    rng.gen_range(0.5..1.5),
                    rng.gen_range(0.0..2.0 * std::f64::consts::PI),
                )
            })
            .collect();
        let grad = w.log_gradient(&z);
        for j in 0..n {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[j] *= Complex64::new(h, 0.0).exp();
            zm[j] *= Complex64::new(-h, 0.0).exp();
            let fd = (w.eval(&zp) - w.eval(&zm)) / (2.0 * h);
            max_rel = max_rel.max((fd - grad[j]).norm() / grad[j].norm().max(1e-9));
        }
    }
    outcome(
        "superpotential-gradient",
        max_rel < 1e-6,
        format!("max relative gap to central differences: {max_rel:.3e}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn full_suite_passes_on_the_stock_inputs() {
        for (fan, kahler) in [
            (samples::kp2_fan(), samples::kp2_kahler()),
            (samples::kp1_fan(), samples::kp1_kahler()),
            (samples::cm_fan(3), samples::cm_kahler(3)),
        ] {
            let results = run_all(&fan, &kahler, 1.0, 7, 40);
            for r in &results {
                assert!(r.passed, "{}: {}", r.name, r.detail);
            }
        }
    }

    #[test]
    fn gauge_independence_covers_kp2() {
        let fan = samples::kp2_fan();
        let kahler = samples::kp2_kahler();
        let results = run_all(&fan, &kahler, 1.0, 7, 10);
        let gauge = results.iter().find(|r| r.name == "gauge-independence").unwrap();
        assert!(gauge.passed);
        assert!(gauge.detail.contains("rescaling"), "{}", gauge.detail);
    }
}

//! Command pipeline behind the CLI: parse, compute, render, cache.
//!
//! Outputs are deterministic functions of (input bytes, command, flags,
//! seed); exit codes are 0 for success, 1 for parse/validation failures and
//! 2 for verification failures.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::cache::ResultCache;
use crate::disks::{
    critical_points, disk_area_closed_form, disk_area_numeric, evaluate_disk, maslov_index,
    newton_start_grid, superpotential, BlaschkeDisk,
};
use crate::fan::{adapted_basis, calabi_yau_vector, is_smooth, MomentPolytope};
use crate::fanfile::{parse_fan_file, rational_string, FanFile};
use crate::fibration::discriminant_graph;
use crate::mirror::{embed_into_cm_mirror, solve_coefficients, solve_default, verify_constraints};
use crate::numeric::fmt_f64;
use crate::report::{
    fmt_complex, BaseGraphReport, CheckReport, CriticalPointReport, CriticalPointRow, DiskReport,
    MirrorReport, Provenance, SuperpotentialReport, SuperpotentialTermRow, VerifyCheckRow,
    VerifyReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Mirror,
    Superpotential,
    Discriminant,
    Embed,
    Disks,
    CriticalPoints,
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Mirror => "mirror",
            Command::Superpotential => "superpotential",
            Command::Discriminant => "discriminant",
            Command::Embed => "embed",
            Command::Disks => "disks",
            Command::CriticalPoints => "critical-points",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Flags {
    /// 1-based ray indices of the gauge cone.
    pub gauge_cone: Option<Vec<usize>>,
    pub eps: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub svg: Option<PathBuf>,
    pub json: bool,
    pub no_cache: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            gauge_cone: None,
            eps: None,
            seed: 0,
            samples: 100,
            tol: 1e-10,
            svg: None,
            json: false,
            no_cache: false,
        }
    }
}

impl Flags {
    fn descriptor(&self, cmd: Command) -> String {
        format!(
            "{}|gauge={:?}|eps={:?}|seed={}|samples={}|tol={}|json={}|svg={}",
            cmd.name(),
            self.gauge_cone,
            self.eps.map(fmt_f64),
            self.seed,
            self.samples,
            fmt_f64(self.tol),
            self.json,
            self.svg.is_some(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub stdout: Vec<u8>,
    pub exit_code: i32,
}

fn fail(code: i32, msg: impl std::fmt::Display) -> PipelineOutput {
    PipelineOutput { stdout: format!("error: {msg}\n").into_bytes(), exit_code: code }
}

/// Run a command against a fan file on disk.
pub fn run_pipeline(cmd: Command, fan_path: &Path, flags: &Flags) -> PipelineOutput {
    let bytes = match std::fs::read(fan_path) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_VALIDATION, format!("cannot read {}: {e}", fan_path.display())),
    };
    let file = match parse_fan_file(&bytes) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let canonical = file.canonical_bytes();
    let cache = ResultCache::from_env();
    let key = ResultCache::key(&canonical, &flags.descriptor(cmd));
    if !flags.no_cache {
        if let (Some(out), Some(code)) = (cache.get(&key, "out"), cached_exit(&cache, &key)) {
            if let Some(svg_path) = &flags.svg {
                if let Some(svg) = cache.get(&key, "svg") {
                    if std::fs::write(svg_path, svg).is_err() {
                        return fail(EXIT_VALIDATION, "cannot write SVG output");
                    }
                }
            }
            return PipelineOutput { stdout: out, exit_code: code };
        }
    }

    let provenance = Provenance::for_input(&canonical);
    let (output, svg_bytes) = execute(cmd, &file, flags, provenance);
    if !flags.no_cache {
        let _ = cache.put(&key, "out", &output.stdout);
        let _ = cache.put(&key, "exit", output.exit_code.to_string().as_bytes());
        if let Some(svg) = &svg_bytes {
            let _ = cache.put(&key, "svg", svg);
        }
    }
    if let (Some(svg_path), Some(svg)) = (&flags.svg, &svg_bytes) {
        if std::fs::write(svg_path, svg).is_err() {
            return fail(EXIT_VALIDATION, "cannot write SVG output");
        }
    }
    output
}

fn cached_exit(cache: &ResultCache, key: &str) -> Option<i32> {
    let raw = cache.get(key, "exit")?;
    std::str::from_utf8(&raw).ok()?.trim().parse().ok()
}

fn execute(
    cmd: Command,
    file: &FanFile,
    flags: &Flags,
    provenance: Provenance,
) -> (PipelineOutput, Option<Vec<u8>>) {
    let eps_abs = flags.eps.unwrap_or(file.eps_abs);
    match cmd {
        Command::Check => (check_cmd(file, flags, provenance), None),
        Command::Mirror => (mirror_cmd(file, flags, provenance), None),
        Command::Embed => (embed_cmd(file, flags, provenance), None),
        Command::Superpotential => (superpotential_cmd(file, flags, provenance), None),
        Command::Discriminant => discriminant_cmd(file, flags, eps_abs, provenance),
        Command::Disks => (disks_cmd(file, flags, provenance), None),
        Command::CriticalPoints => (critical_points_cmd(file, flags, provenance), None),
        Command::Verify => (verify_cmd(file, flags, eps_abs, provenance), None),
    }
}

fn solve_family(
    file: &FanFile,
    flags: &Flags,
) -> Result<crate::mirror::MirrorFamily, PipelineOutput> {
    let u = calabi_yau_vector(&file.fan).map_err(|e| fail(EXIT_VALIDATION, e))?;
    let frame = adapted_basis(&file.fan, &u).map_err(|e| fail(EXIT_VALIDATION, e))?;
    match &flags.gauge_cone {
        None => solve_default(&file.fan, &frame, &file.kahler),
        Some(cone_1based) => {
            if cone_1based.iter().any(|&i| i == 0 || i > file.fan.num_rays()) {
                return Err(fail(EXIT_VALIDATION, "gauge cone index out of 1-based range"));
            }
            let cone: Vec<usize> = cone_1based.iter().map(|&i| i - 1).collect();
            solve_coefficients(&file.fan, &frame, &file.kahler, &cone)
        }
    }
    .map_err(|e| fail(EXIT_VALIDATION, e))
}

fn check_cmd(file: &FanFile, flags: &Flags, provenance: Provenance) -> PipelineOutput {
    let smooth = is_smooth(&file.fan);
    let u = match calabi_yau_vector(&file.fan) {
        Ok(u) => u,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let lambda_witness = match crate::fan::certify_semiprojective(&file.fan) {
        Ok(l) => l,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    if !smooth.all_smooth() {
        return fail(
            EXIT_VALIDATION,
            format!("non-smooth cones: {:?}", smooth.offending_cones()),
        );
    }
    let report = CheckReport {
        calabi_yau: true,
        u: u.iter().map(|c| c.to_string()).collect(),
        smooth: true,
        cone_determinants: smooth.dets.iter().map(|d| d.to_string()).collect(),
        semiprojective: true,
        lambda_witness: lambda_witness.iter().map(rational_string).collect(),
        relations: file
            .kahler
            .gamma
            .iter()
            .map(|g| g.iter().map(|c| c.to_string()).collect())
            .collect(),
        q: file.kahler.q.iter().map(|&v| fmt_f64(v)).collect(),
        provenance,
    };
    if flags.json {
        return json_output(&report, EXIT_OK);
    }
    let mut text = String::new();
    text.push_str(&format!("calabi-yau: ok, u = ({})\n", report.u.join(", ")));
    text.push_str(&format!(
        "smooth: ok, cone determinants = ({})\n",
        report.cone_determinants.join(", ")
    ));
    text.push_str(&format!(
        "semi-projective: ok, lambda witness = ({})\n",
        report.lambda_witness.join(", ")
    ));
    for (a, g) in report.relations.iter().enumerate() {
        text.push_str(&format!("relation gamma_{} = ({})\n", a + 1, g.join(", ")));
    }
    for (a, q) in report.q.iter().enumerate() {
        text.push_str(&format!("q_{} = {}\n", a + 1, q));
    }
    PipelineOutput { stdout: text.into_bytes(), exit_code: EXIT_OK }
}

fn mirror_cmd(file: &FanFile, flags: &Flags, provenance: Provenance) -> PipelineOutput {
    let fam = match solve_family(file, flags) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let verified = verify_constraints(&fam, &file.kahler);
    let emb = embed_into_cm_mirror(&fam);
    let report = MirrorReport::build(&fam, &emb, verified.is_ok(), provenance);
    let exit = if verified.is_ok() { EXIT_OK } else { EXIT_VERIFICATION };
    if flags.json {
        return json_output(&report, exit);
    }
    let mut text = format!("{}\n", report.equation);
    if let Err(e) = verified {
        text.push_str(&format!("error: {e}\n"));
    }
    PipelineOutput { stdout: text.into_bytes(), exit_code: exit }
}

fn embed_cmd(file: &FanFile, flags: &Flags, provenance: Provenance) -> PipelineOutput {
    let fam = match solve_family(file, flags) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let emb = embed_into_cm_mirror(&fam);
    let report = MirrorReport::build(&fam, &emb, true, provenance);
    if flags.json {
        return json_output(&report, EXIT_OK);
    }
    let mut text = format!("target: {}\n", emb.target.equation_string());
    for (i, (c, w)) in emb.substitutions.iter().enumerate() {
        let names = fam.z_names();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        text.push_str(&format!(
            "Z{} = {}\n",
            i + 1,
            crate::laurent::format_term(&name_refs, w, c)
        ));
    }
    if emb.relations.is_empty() {
        text.push_str("relations: none\n");
    }
    for rel in &emb.relations {
        text.push_str(&format!("relation: {}\n", rel.to_text()));
    }
    PipelineOutput { stdout: text.into_bytes(), exit_code: EXIT_OK }
}

fn superpotential_cmd(file: &FanFile, flags: &Flags, provenance: Provenance) -> PipelineOutput {
    let poly = MomentPolytope::new(file.fan.clone(), file.kahler.clone());
    let x = match poly.interior_point() {
        Ok(x) => x,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let w = match superpotential(&poly, &x) {
        Ok(w) => w,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let weights = w.weights();
    let value = w.eval(&vec![Complex64::new(0.0, 0.0); file.fan.rank()]);
    let report = SuperpotentialReport {
        x: x.iter().map(rational_string).collect(),
        terms: w
            .exponents
            .iter()
            .zip(&w.areas)
            .zip(&weights)
            .map(|((e, a), &wt)| SuperpotentialTermRow {
                exponent: e.clone(),
                area_over_two_pi: rational_string(a),
                weight: fmt_f64(wt),
            })
            .collect(),
        value_at_b_zero: fmt_complex(value),
        provenance,
    };
    if flags.json {
        return json_output(&report, EXIT_OK);
    }
    let mut text = format!("fiber x = ({})\n", report.x.join(", "));
    for t in &report.terms {
        let e: Vec<String> = t.exponent.iter().map(|c| c.to_string()).collect();
        text.push_str(&format!(
            "term: v = ({}), area/2pi = {}, weight = {}\n",
            e.join(", "),
            t.area_over_two_pi,
            t.weight
        ));
    }
    text.push_str(&format!("W(0) = {}\n", report.value_at_b_zero));
    PipelineOutput { stdout: text.into_bytes(), exit_code: EXIT_OK }
}

fn discriminant_cmd(
    file: &FanFile,
    flags: &Flags,
    eps_abs: f64,
    provenance: Provenance,
) -> (PipelineOutput, Option<Vec<u8>>) {
    if eps_abs <= 0.0 {
        return (fail(EXIT_VALIDATION, "eps must be positive"), None);
    }
    let u = match calabi_yau_vector(&file.fan) {
        Ok(u) => u,
        Err(e) => return (fail(EXIT_VALIDATION, e), None),
    };
    let frame = match adapted_basis(&file.fan, &u) {
        Ok(f) => f,
        Err(e) => return (fail(EXIT_VALIDATION, e), None),
    };
    let poly = MomentPolytope::new(file.fan.clone(), file.kahler.clone());
    let base = discriminant_graph(&poly, &frame, eps_abs);
    let report = BaseGraphReport::build(&base, provenance);
    let svg = if flags.svg.is_some() {
        match crate::svg::emit_svg(&base) {
            Ok(b) => Some(b),
            Err(e) => return (fail(EXIT_VALIDATION, e), None),
        }
    } else {
        None
    };
    let out = if flags.json {
        json_output(&report, EXIT_OK)
    } else {
        let mut text = format!(
            "wall height |eps| = {}\nvertices: {}, points: {}, bounded edges: {}, unbounded edges: {}\n",
            report.wall_height,
            report.num_vertices,
            report.num_points,
            report.num_bounded_edges,
            report.num_unbounded_edges
        );
        for p in &report.pieces {
            let verts: Vec<String> = p.vertices.iter().map(|v| format!("({})", v.join(", "))).collect();
            let rays: Vec<String> = p.rays.iter().map(|v| format!("({})", v.join(", "))).collect();
            text.push_str(&format!(
                "piece {{{}, {}}}: {} vertices [{}]{}\n",
                p.pair.0,
                p.pair.1,
                p.kind,
                verts.join(", "),
                if rays.is_empty() {
                    String::new()
                } else {
                    format!(" rays [{}]", rays.join(", "))
                }
            ));
        }
        PipelineOutput { stdout: text.into_bytes(), exit_code: EXIT_OK }
    };
    (out, svg)
}

fn disks_cmd(file: &FanFile, flags: &Flags, provenance: Provenance) -> PipelineOutput {
    use rand::SeedableRng;
    let poly = MomentPolytope::new(file.fan.clone(), file.kahler.clone());
    let x = match poly.interior_point() {
        Ok(x) => x,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(flags.seed);
    let mut max_rel = 0.0_f64;
    let mut max_boundary = 0.0_f64;
    let order = 32;
    for _ in 0..flags.samples {
        let disk = match BlaschkeDisk::random(&poly, &x, &mut rng, 3) {
            Ok(d) => d,
            Err(e) => return fail(EXIT_VALIDATION, e),
        };
        if maslov_index(&disk) != 2 * disk.total_degree() {
            return fail(EXIT_VERIFICATION, "Maslov index mismatch");
        }
        let expect = disk_area_closed_form(&disk);
        let area = match disk_area_numeric(&disk, order) {
            Ok(a) => a,
            Err(e) => return fail(EXIT_VERIFICATION, e),
        };
        if expect > 0.0 {
            max_rel = max_rel.max((area - expect).abs() / expect);
        }
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
    let report = DiskReport {
        samples: flags.samples,
        seed: flags.seed,
        quadrature_order: order,
        max_area_rel_err: fmt_f64(max_rel),
        maslov_consistent: true,
        boundary_modulus_max_err: fmt_f64(max_boundary),
        provenance,
    };
    let exit = if passed { EXIT_OK } else { EXIT_VERIFICATION };
    if flags.json {
        return json_output(&report, exit);
    }
    let text = format!(
        "samples: {}\nmax relative area error: {}\nmax boundary modulus error: {}\nmaslov consistent: true\n",
        report.samples, report.max_area_rel_err, report.boundary_modulus_max_err
    );
    PipelineOutput { stdout: text.into_bytes(), exit_code: exit }
}

fn critical_points_cmd(file: &FanFile, flags: &Flags, provenance: Provenance) -> PipelineOutput {
    let fam = match solve_family(file, flags) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let qv: Vec<Complex64> = file.kahler.q.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let f = fam.curve_at(&qv);
    let qmag = file
        .kahler
        .q
        .iter()
        .cloned()
        .fold(1.0_f64, f64::min)
        .clamp(1e-3, 1.0);
    let starts = newton_start_grid(fam.curve_vars().max(1), qmag, 8);
    let search = critical_points(&f, &starts, flags.tol);
    let report = CriticalPointReport {
        q: file.kahler.q.iter().map(|&v| fmt_f64(v)).collect(),
        tol: fmt_f64(flags.tol),
        attempted_starts: search.attempted,
        converged_starts: search.converged,
        points: search
            .points
            .iter()
            .map(|p| CriticalPointRow {
                z: p.point.iter().map(|&c| fmt_complex(c)).collect(),
                value: fmt_complex(p.value),
                grad_norm: fmt_f64(p.grad_norm),
                iterations: p.iterations,
            })
            .collect(),
        provenance,
    };
    if flags.json {
        return json_output(&report, EXIT_OK);
    }
    let mut text = format!("critical points: {}\n", report.points.len());
    for p in &report.points {
        text.push_str(&format!(
            "z = ({}), value = {}, |grad| = {}\n",
            p.z.join(", "),
            p.value,
            p.grad_norm
        ));
    }
    PipelineOutput { stdout: text.into_bytes(), exit_code: EXIT_OK }
}

fn verify_cmd(file: &FanFile, flags: &Flags, eps_abs: f64, provenance: Provenance) -> PipelineOutput {
    let results = crate::verify::run_all(&file.fan, &file.kahler, eps_abs, flags.seed, flags.samples);
    let all_passed = results.iter().all(|r| r.passed);
    let report = VerifyReport {
        seed: flags.seed,
        samples: flags.samples,
        checks: results
            .iter()
            .map(|r| VerifyCheckRow {
                name: r.name.clone(),
                passed: r.passed,
                detail: r.detail.clone(),
            })
            .collect(),
        all_passed,
        provenance,
    };
    let exit = if all_passed { EXIT_OK } else { EXIT_VERIFICATION };
    if flags.json {
        return json_output(&report, exit);
    }
    let mut text = String::new();
    for r in &report.checks {
        text.push_str(&format!(
            "check {:<28} {}  ({})\n",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            r.detail
        ));
    }
    text.push_str(if all_passed { "all checks passed\n" } else { "verification FAILED\n" });
    PipelineOutput { stdout: text.into_bytes(), exit_code: exit }
}

fn json_output<T: serde::Serialize>(value: &T, exit_code: i32) -> PipelineOutput {
    let mut stdout = serde_json::to_vec_pretty(value).expect("report serialization");
    stdout.push(b'\n');
    PipelineOutput { stdout, exit_code }
}

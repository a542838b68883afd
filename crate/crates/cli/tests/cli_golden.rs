//! Golden-file tests for the command-line surface: exact stdout bytes,
//! exit codes, determinism, and cache transparency.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

fn fan(name: &str) -> PathBuf {
    workspace_root().join("fans").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syzmirror"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_cache(args: &[&str], cache_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syzmirror"))
        .args(args)
        .env("SYZMIRROR_CACHE_DIR", cache_dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn mirror_equations_are_golden() {
    let cases = [
        ("kp2.fan", "u*v = 1 + z1 + z2 + q*z1^-1*z2^-1\n"),
        ("kp1.fan", "u*v = 1 + z1 + q*z1^-1\n"),
        ("c3.fan", "u*v = 1 + z1 + z2\n"),
        ("c4.fan", "u*v = 1 + z1 + z2 + z3\n"),
    ];
    for (file, expect) in cases {
        let out = run(&["mirror", fan(file).to_str().unwrap(), "--no-cache"]);
        assert!(out.status.success(), "{file}: {out:?}");
        assert_eq!(stdout_of(&out), expect, "{file}");
    }
}

#[test]
fn explicit_gauge_cone_matches_the_default_on_kp2() {
    let out = run(&[
        "mirror",
        fan("kp2.fan").to_str().unwrap(),
        "--gauge-cone",
        "1,2,4",
        "--no-cache",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "u*v = 1 + z1 + z2 + q*z1^-1*z2^-1\n");
}

#[test]
fn embed_lists_the_residual_relation() {
    let out = run(&["embed", fan("kp2.fan").to_str().unwrap(), "--no-cache"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("target: u*v = 1 + Z1 + Z2 + Z3"), "{text}");
    assert!(text.contains("relation: Z1*Z2*Z3 = q"), "{text}");
    let out = run(&["embed", fan("kp1.fan").to_str().unwrap(), "--no-cache"]);
    assert!(stdout_of(&out).contains("relation: Z1*Z2 = q"));
    let out = run(&["embed", fan("c3.fan").to_str().unwrap(), "--no-cache"]);
    assert!(stdout_of(&out).contains("relations: none"));
}

#[test]
fn check_reports_the_cy_data() {
    let out = run(&["check", fan("kp2.fan").to_str().unwrap(), "--no-cache"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("u = (0, 0, 1)"), "{text}");
    assert!(text.contains("relation gamma_1 = (1, 1, 1, -3)"), "{text}");
}

#[test]
fn invalid_input_exits_1_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fan");
    std::fs::write(
        &bad,
        std::fs::read_to_string(fan("kp2.fan"))
            .unwrap()
            .replace("[1, 2, 4]", "[0, 2, 4]"),
    )
    .unwrap();
    let out = run(&["mirror", bad.to_str().unwrap(), "--no-cache"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).starts_with("error:"));

    let missing = run(&["mirror", dir.path().join("nope.fan").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn verify_passes_on_all_bundled_fans() {
    for file in ["kp1.fan", "kp2.fan", "c3.fan", "c4.fan"] {
        let out = run(&[
            "verify",
            fan(file).to_str().unwrap(),
            "--seed",
            "7",
            "--samples",
            "25",
            "--no-cache",
        ]);
        let text = stdout_of(&out);
        assert!(out.status.success(), "{file}:\n{text}");
        assert!(text.contains("all checks passed"), "{file}:\n{text}");
    }
}

#[test]
fn discriminant_output_and_svg_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let svg1 = dir.path().join("a.svg");
    let svg2 = dir.path().join("b.svg");
    let base_args = |svg: &Path| {
        vec![
            "discriminant".to_string(),
            fan("kp1.fan").to_str().unwrap().to_string(),
            "--eps".to_string(),
            "1.0".to_string(),
            "--svg".to_string(),
            svg.to_str().unwrap().to_string(),
            "--no-cache".to_string(),
        ]
    };
    let args1 = base_args(&svg1);
    let args2 = base_args(&svg2);
    let out1 = run(&args1.iter().map(String::as_str).collect::<Vec<_>>());
    let out2 = run(&args2.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout);
    let text = stdout_of(&out1);
    assert!(text.contains("points: 2"), "{text}");
    let s1 = std::fs::read(&svg1).unwrap();
    let s2 = std::fs::read(&svg2).unwrap();
    assert!(!s1.is_empty());
    assert_eq!(s1, s2);
}

#[test]
fn cache_is_transparent_and_populated() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let fan_path = fan("kp2.fan");
    let args = ["mirror", fan_path.to_str().unwrap(), "--json"];
    let cold = run_with_cache(&args, &cache);
    assert!(cold.status.success());
    let entries = std::fs::read_dir(&cache).unwrap().count();
    assert!(entries >= 1, "cache not populated");
    let warm = run_with_cache(&args, &cache);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.status.code(), warm.status.code());
    // and bypassing the cache still yields the same bytes
    let nocache = run_with_cache(
        &["mirror", fan("kp2.fan").to_str().unwrap(), "--json", "--no-cache"],
        &cache,
    );
    assert_eq!(cold.stdout, nocache.stdout);
}

#[test]
fn json_report_carries_equation_and_provenance() {
    let out = run(&["mirror", fan("kp2.fan").to_str().unwrap(), "--json", "--no-cache"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["equation"], "u*v = 1 + z1 + z2 + q*z1^-1*z2^-1");
    assert_eq!(v["gauge_cone"], serde_json::json!([1, 2, 4]));
    assert_eq!(v["constraints_verified"], true);
    assert_eq!(v["embedding_relations"], serde_json::json!(["Z1*Z2*Z3 = q"]));
    assert!(v["provenance"]["input_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn superpotential_and_disks_commands_run() {
    let out = run(&["superpotential", fan("c3.fan").to_str().unwrap(), "--no-cache"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(text.matches("term:").count(), 3, "{text}");

    let out = run(&[
        "disks",
        fan("kp1.fan").to_str().unwrap(),
        "--samples",
        "10",
        "--seed",
        "3",
        "--no-cache",
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("maslov consistent: true"));
}

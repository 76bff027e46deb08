use std::path::Path;
use std::process::{Command, Output};

use overhang_core::exact::{a_max, crapper_w, ParamSet};
use overhang_core::solver::{newton_solve, NewtonOptions};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_overhang"));
    c.env_remove("OVERHANG_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn coeffs(v: &Value) -> Vec<f64> {
    v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_f64().unwrap())
        .collect()
}

fn out_arg(d: &Path) -> String {
    d.to_str().unwrap().to_owned()
}

#[test]
fn solve_converges_on_the_overhanging_branch() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--A",
        "0.44",
        "--G",
        "0.01",
        "--out",
        &out_arg(d.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&d.path().join("report.json"));
    assert_eq!(rep["converged"], true);
    assert!(rep["final_residual"].as_f64().unwrap() < 1e-11);
    let c = read_json(&d.path().join("coefficients.json"));
    assert_eq!(c["N"], 128);
    assert_eq!(c["G"], 0.01);
    assert_eq!(coeffs(&c).len(), 129);
    let csv = std::fs::read_to_string(d.path().join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,x,y,x_alpha,y_alpha"));
    assert_eq!(lines.count(), 512);
}

#[test]
fn zero_gravity_solve_reproduces_the_exact_coefficients() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--A",
        "0.44",
        "--G",
        "0",
        "--format",
        "json",
        "--out",
        &out_arg(d.path()),
    ]);
    assert!(o.status.success());
    let got = coeffs(&read_json(&d.path().join("coefficients.json")));
    let exact = crapper_w(0.44, 128).unwrap();
    for (g, e) in got.iter().zip(exact.coeffs()) {
        assert!((g - e).abs() < 1e-11);
    }
    assert!(!d.path().join("profile.csv").exists());
    assert!(!d.path().join("profile.svg").exists());
}

#[test]
fn coefficient_file_reloads_bit_identically() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("coefficients.json");
    assert!(run(&[
        "solve",
        "--A",
        "0.3",
        "--G",
        "0.02",
        "--N",
        "64",
        "--M",
        "256",
        "--out",
        &out_arg(d.path())
    ])
    .status
    .success());
    let stored = coeffs(&read_json(&p));
    let params = ParamSet::with_gravity(0.3, 0.02).unwrap();
    let opts = NewtonOptions {
        points: Some(256),
        ..Default::default()
    };
    let (w, _) = newton_solve(&crapper_w(0.3, 64).unwrap(), &params, &opts).unwrap();
    assert_eq!(stored.len(), w.coeffs().len());
    assert!(stored
        .iter()
        .zip(w.coeffs())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn continuation_trace_has_requested_steps() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&[
        "continue",
        "--A",
        "0.3",
        "--G",
        "0.05",
        "--steps",
        "10",
        "--N",
        "64",
        "--M",
        "256",
        "--out",
        &out_arg(d.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_json(&d.path().join("trace.json"));
    let steps = t["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 11);
    assert_eq!(steps[0]["params"]["gravity"], 0.0);
    assert!((steps[10]["params"]["gravity"].as_f64().unwrap() - 0.05).abs() < 1e-15);
    assert_eq!(t["direction"], "gravity");
}

#[test]
fn touching_at_zero_gravity_finds_the_limiting_amplitude() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["touching", "--G", "0", "--out", &out_arg(d.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_json(&d.path().join("touching.json"));
    let a = t["A_star"].as_f64().unwrap();
    assert!((a - a_max().a_max).abs() < 1e-6, "{a}");
    assert_eq!(t["report"]["classification"], "tangential");
}

#[test]
fn inverted_bracket_is_a_usage_error() {
    let o = run(&["touching", "--G", "0", "--lo", "0.46", "--hi", "0.45"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(run(&["solve", "--A", "0.6"]).status.code(), Some(2));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(
        run(&["solve", "--A", "0.3", "--N", "128", "--M", "128"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--A", "abc"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_one() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--A",
        "0.3",
        "--G",
        "10",
        "--N",
        "64",
        "--M",
        "256",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_suites_pass_including_zero_amplitude() {
    for suite in ["exact", "lemmas", "linear"] {
        let o = run(&["verify", "--suite", suite, "--A", "0,0.25,0.4"]);
        assert!(
            o.status.success(),
            "{suite}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["passed"], true);
        assert!(!v["entries"].as_array().unwrap().is_empty());
    }
    let o = run(&["verify", "--suite", "linear", "--A", "0"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let smin = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["check"] == "min_singular_value")
        .unwrap();
    assert_eq!(smin["informational"], true);
}

#[test]
fn lemma_suite_reports_the_denominator_verdict() {
    let o = run(&["verify", "--suite", "lemmas", "--A", "0.3"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let verdict = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["check"] == "denominator_verdict")
        .unwrap();
    assert_eq!(verdict["value"], 2.0);
}

#[test]
fn svg_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&[
            "solve",
            "--A",
            "0.4",
            "--G",
            "0.01",
            "--N",
            "64",
            "--M",
            "256",
            "--format",
            "svg",
            "--out",
            &out_arg(d.path()),
        ]);
        assert!(o.status.success());
    }
    let sa = std::fs::read(a.path().join("profile.svg")).unwrap();
    let sb = std::fs::read(b.path().join("profile.svg")).unwrap();
    assert_eq!(sa, sb);
    assert!(!a.path().join("coefficients.json").exists());
}

#[test]
fn flat_wave_is_a_straight_line() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(&[
        "exact",
        "--A",
        "0",
        "--M",
        "64",
        "--out",
        &out_arg(d.path())
    ])
    .status
    .success());
    let csv = std::fs::read_to_string(d.path().join("profile.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((f[1] - f[0]).abs() < 1e-14 && f[2].abs() < 1e-14);
    }
    let svg = std::fs::read_to_string(d.path().join("profile.svg")).unwrap();
    let pts = svg
        .split("points=\"")
        .nth(1)
        .unwrap()
        .split('"')
        .next()
        .unwrap();
    let ys: Vec<&str> = pts
        .split(' ')
        .map(|p| p.split(',').nth(1).unwrap())
        .collect();
    assert!(ys.iter().all(|y| *y == ys[0]));
}

#[test]
fn flags_override_the_config_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.toml");
    let out = d.path().join("from_config");
    std::fs::write(
        &cfg,
        format!(
            "A = 0.3\nG = 0.02\nN = 32\nM = 128\nformat = \"json\"\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = bin()
        .args(["solve", "--config", cfg.to_str().unwrap(), "--G", "0.01"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = read_json(&out.join("coefficients.json"));
    assert_eq!(c["A"], 0.3);
    assert_eq!(c["G"], 0.01);
    assert_eq!(c["N"], 32);
    assert!(!out.join("profile.csv").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.toml");
    std::fs::write(&cfg, "A = 0.3\namplitude = 0.2\n").unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn environment_sets_the_default_output_directory() {
    let d = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["exact", "--A", "0.2", "--M", "64", "--format", "json"])
        .env("OVERHANG_OUT_DIR", d.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let p = read_json(&d.path().join("params.json"));
    assert_eq!(p["A"], 0.2);
    assert_eq!(p["overhang"]["overhanging"], false);
}

#[test]
fn exact_profiles_below_and_above_the_limiting_amplitude() {
    let am = a_max().a_max;
    for (scale, count, class) in [(0.8, 0, "none"), (1.06, 2, "transversal")] {
        let d = tempfile::tempdir().unwrap();
        let a = format!("{}", scale * am);
        assert!(run(&["exact", "--A", &a, "--out", &out_arg(d.path())])
            .status
            .success());
        let p = read_json(&d.path().join("params.json"));
        assert_eq!(p["intersections"]["count"], count);
        assert_eq!(p["intersections"]["classification"], class);
        assert_eq!(p["overhang"]["overhanging"], scale > 1.0);
        assert!(d.path().join("profile.svg").exists());
    }
}

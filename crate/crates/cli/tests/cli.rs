use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cavity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity"))
        .args(args)
        .env_remove("CAVITY_THREADS")
        .output()
        .expect("spawn cavity")
}

fn ok_json(args: &[&str]) -> Value {
    let out = cavity(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(args: &[&str]) -> (i32, String) {
    let out = cavity(args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_degree6() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(&["analyze", "--poly", "degree6", "--grid", "64", "--out", s(dir.path())]);
    assert_eq!(v["verdict"], "oscillatory");
    assert_eq!(v["ovals"], 3);
    assert_eq!(v["nested"], true);
    for k in 1..=3 {
        let text = fs::read_to_string(dir.path().join(format!("oval_{k}.csv"))).unwrap();
        assert!(text.lines().count() > 10);
    }
    assert!(dir.path().join("mask.csv").is_file());
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary, v);
}

#[test]
fn analyze_unbounded_and_non_oscillatory() {
    let dir = tempfile::tempdir().unwrap();
    let o = s(dir.path());
    let v = ok_json(&["analyze", "--poly", "hyperbola", "--grid", "16", "--lo", "1,-1", "--hi", "3,1", "--out", o]);
    assert_eq!(v["verdict"], "oscillatory");
    assert!(v["ovals"].is_null());
    assert!(v["mask_cells"].as_u64().unwrap() > 0);
    let (c, err) = code(&["analyze", "--poly", "hyperbola", "--out", o]);
    assert_eq!(c, 2, "{err}");
    assert!(err.contains("--lo"), "{err}");

    let xy = dir.path().join("xy.poly");
    fs::write(&xy, "1 1 1\n-1 0 0\n").unwrap();
    let v = ok_json(&["analyze", "--poly", s(&xy), "--out", o]);
    assert_eq!(v["verdict"], "not oscillatory");
    let w = v["counterexample"].as_array().unwrap();
    assert!(w[0].as_f64().unwrap() * w[1].as_f64().unwrap() < 0.0);
}

#[test]
fn separator_reports() {
    let v = ok_json(&["separator", "--poly", "degree6"]);
    assert_eq!(v["report"]["pass"], true);
    assert_eq!(v["report"]["degree_q"], 4);
    let v = ok_json(&["separator", "--poly", "circle", "--q", "3"]);
    assert_eq!(v["report"]["pass"], true);
    let v = ok_json(&["separator", "--poly", "degree6", "--q", "-1"]);
    assert_eq!(v["report"]["pass"], false);
    assert!(!v["report"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn reconstruct_with_phantom() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec.csv");
    let v = ok_json(&[
        "reconstruct",
        "--poly",
        "circle",
        "--phantom",
        "gauss 0.2,0.1 0.12 1",
        "--grid",
        "64",
        "--out",
        s(&out),
    ]);
    let err = v["relative_l2_error"].as_f64().unwrap();
    assert!(err < 0.03, "relative error {err}");
    assert!(out.is_file());
}

#[test]
fn simulate_then_reconstruct_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let sino = dir.path().join("s.csv");
    let rec = dir.path().join("r.csv");
    let args = ["--poly", "circle", "--directions", "90", "--nsigma", "128"];
    let mut a = vec!["simulate", "--phantom", "gauss 0,0 0.2 1", "--out", s(&sino)];
    a.extend(args);
    ok_json(&a);
    let mut a = vec!["reconstruct", "--sinogram", s(&sino), "--grid", "32", "--out", s(&rec)];
    a.extend(args);
    let v = ok_json(&a);
    assert!(v["max"].as_f64().unwrap() > 0.9);
}

#[test]
fn timereverse_matches_backprojection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tr.pgm");
    let v = ok_json(&[
        "timereverse",
        "--poly",
        "circle",
        "--phantom",
        "gauss 0.2,0.1 0.12 1",
        "--directions",
        "90",
        "--nsigma",
        "256",
        "--grid",
        "48",
        "--format",
        "pgm16",
        "--out",
        s(&out),
    ]);
    assert!(v["max_delta_vs_fbp"].as_f64().unwrap() < 1e-2);
    assert!(out.is_file());
}

#[test]
fn levitate_sphere_constant_density() {
    let v = ok_json(&["levitate", "--poly", "sphere", "--q", "2"]);
    let m = v["max_normalized"].as_f64().unwrap();
    assert!(m < 1e-9, "max normalized field {m}");
}

#[test]
fn levitate_degree6_with_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rep.json");
    let v = ok_json(&["levitate", "--poly", "degree6", "--count", "4", "--out", s(&out)]);
    assert!(v["max_normalized"].as_f64().unwrap() < 1e-9);
    let saved: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved, v);
}

#[test]
fn layer_levitate_sphere() {
    let v = ok_json(&[
        "layer-levitate",
        "--poly",
        "sphere",
        "--q",
        "2",
        "--lo-level",
        "-0.19",
        "--hi-level",
        "0.21",
        "--count",
        "3",
    ]);
    assert!(v["max_normalized"].as_f64().unwrap() < 1e-8);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = s(dir.path());
    let bad = dir.path().join("bad.poly");
    fs::write(&bad, "1 0 2\n1 2 0\n-1 0\n").unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["analyze", "--poly", "nope", "--out", o], "nope"),
        (vec!["analyze", "--poly", "circle", "--point", "0,0,0", "--out", o], "--point"),
        (vec!["simulate", "--poly", "circle", "--phantom", "gauss 0,0 0.1 1", "--nsigma", "4", "--out", o], "nsigma"),
        (vec!["simulate", "--poly", "circle", "--phantom", "blob 1", "--out", o], "phantom"),
        (vec!["analyze", "--poly", "sphere", "--format", "pgm16", "--grid", "8", "--out", o], "pgm16"),
        (vec!["analyze", "--poly", s(&bad), "--out", o], "line 3"),
        (vec!["levitate", "--poly", "circle", "--probe", "0.1"], "point"),
        (vec!["levitate", "--poly", "circle", "--threads", "0"], "threads"),
    ];
    for (args, needle) in cases {
        let (c, err) = code(&args);
        assert_eq!(c, 2, "{args:?}: {err}");
        assert!(err.contains(needle), "{args:?}: {err}");
    }
    let (c, _) = code(&["levitate", "--poly", "circle", "--bogus"]);
    assert_eq!(c, 2);
}

#[test]
fn numerical_errors_exit_3() {
    let (c, err) = code(&["levitate", "--poly", "circle", "--probe", "1,0"]);
    assert_eq!(c, 3, "{err}");
    assert!(err.starts_with("error: levitation:"), "{err}");
    let (c, err) = code(&["levitate", "--poly", "hyperbola"]);
    assert_eq!(c, 3, "{err}");
}

#[test]
fn single_thread_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok_json(&[
            "--threads",
            "1",
            "reconstruct",
            "--poly",
            "circle",
            "--phantom",
            "gauss 0.2,0.1 0.12 1",
            "--directions",
            "60",
            "--nsigma",
            "128",
            "--grid",
            "24",
            "--out",
            s(&out),
        ]);
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# analyze with defaults from a file\ncommand = analyze\npoly = degree6\ngrid = 8\nout = {}\n",
            dir.path().display()
        ),
    )
    .unwrap();
    let v = ok_json(&["--config", s(&cfg), "--grid", "20"]);
    assert_eq!(v["grid_cells"], 400);
    assert_eq!(v["verdict"], "oscillatory");
}

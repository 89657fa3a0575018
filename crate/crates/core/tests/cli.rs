use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subspace-reduce"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn generate(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name);
    let path = path.to_str().unwrap().to_string();
    let mut args = vec![
        "generate",
        "--ambient-dim",
        "6",
        "--l",
        "2",
        "--k",
        "1",
        "--count",
        "7",
        "--seed",
        "3",
    ];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", &path]);
    let out = run(&args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

#[test]
fn generate_writes_data_and_truth() {
    let dir = TempDir::new().unwrap();
    let data = generate(dir.path(), "pts.csv", &["--noise", "0.01"]);
    let text = std::fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().all(|l| l.split(',').count() == 6));
    let truth: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pts.truth.json")).unwrap())
            .unwrap();
    assert_eq!(truth["partition"].as_array().unwrap().len(), 2);
    assert_eq!(truth["bundle"]["cap_dim"], 1);
}

#[test]
fn oracle_and_solve_agree_on_small_data() {
    let dir = TempDir::new().unwrap();
    let data = generate(dir.path(), "pts.csv", &["--noise", "0.02"]);
    let oracle = json(&run(&["oracle", &data, "--l", "2", "--k", "1"]));
    let solved = json(&run(&[
        "solve",
        &data,
        "--l",
        "2",
        "--k",
        "1",
        "--restarts",
        "50",
        "--seed",
        "4",
    ]));
    assert_eq!(oracle["certified_optimal"], true);
    assert_eq!(solved["certified_optimal"], false);
    let (e0, e) = (
        oracle["error"].as_f64().unwrap(),
        solved["error"].as_f64().unwrap(),
    );
    assert!(e >= e0 - 1e-9 && e <= e0 + 1e-9, "{e} vs {e0}");
    assert_eq!(oracle["labels"].as_array().unwrap().len(), 7);
}

#[test]
fn solve_is_reproducible_and_writes_out() {
    let dir = TempDir::new().unwrap();
    let data = generate(dir.path(), "pts.csv", &["--noise", "0.05"]);
    let report = dir.path().join("report.json");
    let args = [
        "solve",
        &data,
        "--l",
        "2",
        "--k",
        "1",
        "--seed",
        "8",
        "--out",
        report.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let first = std::fs::read(&report).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read(&report).unwrap());
}

#[test]
fn reduce_solve_reports_bound() {
    let dir = TempDir::new().unwrap();
    let data = generate(dir.path(), "pts.csv", &["--noise", "0.01"]);
    let rep = json(&run(&[
        "reduce-solve",
        &data,
        "--l",
        "2",
        "--k",
        "1",
        "--dist",
        "bernoulli",
        "--r",
        "3",
        "--seed",
        "2",
    ]));
    assert_eq!(rep["r"], 3);
    assert_eq!(rep["reduced_certified"], true);
    assert_eq!(rep["bound_satisfied"], true);
    assert!(rep["e0"].as_f64().is_some());

    let auto = json(&run(&[
        "reduce-solve",
        &data,
        "--l",
        "2",
        "--k",
        "1",
        "--eta",
        "0.5",
        "--delta",
        "0.1",
        "--no-full-oracle",
    ]));
    assert!(auto["r"].as_u64().unwrap() > 1000);
    assert!(auto["e0"].is_null() && auto["bound_value"].is_null());
}

#[test]
fn bounds_prints_closed_forms() {
    let v = json(&run(&[
        "bounds",
        "--epsilon",
        "0.5",
        "--eta",
        "0.5",
        "--delta",
        "0.1",
        "--l",
        "2",
        "--d",
        "3",
        "--k",
        "1",
        "--m",
        "20",
        "--e0",
        "0.2",
        "--r",
        "100",
    ]));
    assert!((v["c0"].as_f64().unwrap() - 1.0 / 24.0).abs() < 1e-15);
    assert_eq!(v["min_reduced_dim"], 3924);
    assert!((v["eta_epsilon"].as_f64().unwrap() - 0.5 / 3.0).abs() < 1e-15);
    assert!((v["theorem_bound"].as_f64().unwrap() - (1.5 * 0.2 + 0.5 * 2.0)).abs() < 1e-12);
    assert!(v["concentration_failure_bound"].as_f64().unwrap() < 0.032);
}

#[test]
fn check_concentration_reports_rate() {
    let v = json(&run(&[
        "check-concentration",
        "--r",
        "100",
        "--ambient-dim",
        "20",
        "--vectors",
        "20",
        "--trials",
        "50",
    ]));
    assert_eq!(v["report"]["trials"], 1000);
    assert_eq!(v["within_bound"], true);
}

#[test]
fn experiment_writes_reports() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        r#"
trials = 5
master_seed = 1
[dataset]
source = "synthetic"
ambient_dim = 10
l = 2
k = 1
count = 6
noise_sigma = 0.02
[model]
l = 2
k = 1
[reduction]
distribution = "gaussian"
r = 4
epsilon = 0.5
[output]
rows = "rows.csv"
summary = "summary.json"
timings = "timings.csv"
"#,
    )
    .unwrap();
    let out = run(&["experiment", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 6);
    assert!(rows.starts_with("trial,r,epsilon,rank,e0,reduced_error"));
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["totals"]["trials"], 5);
    assert_eq!(summary["violations"]["hard"], 0);
    assert!(summary["config_echo"]["model"]["l"] == 2);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("timings.csv"))
            .unwrap()
            .lines()
            .count(),
        6
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\nx,3\n").unwrap();
    assert_eq!(
        run(&["solve", bad.to_str().unwrap(), "--l", "2", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve", "/nonexistent.csv", "--l", "2", "--k", "1"])
            .status
            .code(),
        Some(2)
    );

    let data = generate(dir.path(), "pts.csv", &[]);
    assert_eq!(
        run(&["oracle", &data, "--l", "2", "--k", "1", "--budget", "10"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["oracle", &data, "--l", "7", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["bounds", "--epsilon", "1.5"]).status.code(), Some(2));
    assert_eq!(
        run(&["experiment", "/nonexistent.toml"]).status.code(),
        Some(2)
    );
}

#[test]
fn header_flag_skips_first_line() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("h.csv");
    std::fs::write(&path, "a,b,c\n1,0,0\n2,0,0\n0,1,0\n0,0,3\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&["oracle", p, "--l", "2", "--k", "1"]).status.code(),
        Some(2)
    );
    let v = json(&run(&["oracle", p, "--header", "--l", "3", "--k", "1"]));
    assert!(v["error"].as_f64().unwrap() < 1e-12);
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BALL3: &str = r#"{"dim":3,"kind":"Ball","center":[0,0,0],"radius":1}"#;

fn conekit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conekit"))
        .current_dir(dir)
        .env("CONEKIT_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ball.json"), BALL3).unwrap();
    std::fs::write(dir.path().join("ball3.json"), BALL3).unwrap();
    dir
}

#[test]
fn bootstrap_reports_divergence_to_plus_infinity() {
    let dir = workdir();
    let out = conekit(dir.path(), &["bootstrap", "--n", "3", "--s", "1", "--a", "0", "--p", "2", "--k", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "DivergesPlus");
    assert_eq!(v["sequence"].as_array().unwrap().len(), 51);
    assert_eq!(v["p_critical"], 5.0);
}

#[test]
fn kernel_verify_h3_on_ball_is_deterministic() {
    let dir = workdir();
    let args = ["kernel-verify", "--which", "H3", "--domain", "ball.json", "--samples", "1000", "--seed", "7"];
    let a = conekit(dir.path(), &args);
    let b = conekit(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["pass"], true);
    assert!(v["min_margin"].as_f64().unwrap() >= -1e-12);
    let c = conekit(dir.path(), &["kernel-verify", "--which", "H3", "--domain", "ball.json", "--samples", "1000", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn solve_writes_profile_and_report() {
    let dir = workdir();
    let out = conekit(dir.path(), &["--out", "run", "solve", "--domain", "ball3.json", "--p", "2", "--t", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["sup_norm"].as_f64().unwrap() >= 1.5);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/solve.json")).unwrap()).unwrap();
    assert_eq!(report, v);
    let csv = std::fs::read_to_string(dir.path().join("run/solve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,u(r)"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (r, u) = l.split_once(',').unwrap();
            (r.parse().unwrap(), u.parse().unwrap())
        })
        .collect();
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|(r, u)| *r >= 0.0 && *r <= 1.0 + 1e-12 && *u >= -1e-12));
    assert!(!csv.contains('\r'));
}

#[test]
fn report_keys_are_sorted() {
    let dir = workdir();
    let out = conekit(dir.path(), &["solve", "--domain", "ball.json", "--p", "2", "--t", "0", "--nodes", "16"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(keys.contains(&"sup_norm"));
}

#[test]
fn exit_codes() {
    let dir = workdir();
    let code = |args: &[&str]| conekit(dir.path(), args).status.code();
    assert_eq!(code(&["frobnicate"]), Some(64));
    assert_eq!(code(&["bootstrap", "--n", "3", "--s", "1", "--p", "0.5"]), Some(64));
    std::fs::write(dir.path().join("bad.json"), "{bad").unwrap();
    assert_eq!(code(&["--config", "bad.json", "bootstrap"]), Some(64));
    // not converged within the iteration budget
    assert_eq!(code(&["solve", "--domain", "ball.json", "--p", "2", "--t", "0", "--nodes", "16", "--max-iters", "3"]), Some(2));
    // the source is far beyond the extremal value
    assert_eq!(code(&["solve", "--domain", "ball.json", "--p", "2", "--t", "1000", "--nodes", "16"]), Some(3));
}

#[test]
fn config_file_fills_missing_options() {
    let dir = workdir();
    std::fs::write(dir.path().join("run.json"), r#"{"params":{"n":3,"s":1,"a":0,"p":7},"k":20}"#).unwrap();
    let out = conekit(dir.path(), &["--config", "run.json", "bootstrap"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "DivergesMinus");
    let out = conekit(dir.path(), &["--config", "run.json", "bootstrap", "--p", "2"]);
    assert_eq!(json(&out)["verdict"], "DivergesPlus");
}

#[test]
fn blowup_csv_table() {
    let dir = workdir();
    std::fs::write(
        dir.path().join("square.json"),
        r#"{"dim":2,"kind":"Polygon2D","vertices":[[0,0],[1,0],[1,1],[0,1]]}"#,
    )
    .unwrap();
    let out = conekit(dir.path(), &["--format", "csv", "blowup", "--domain", "square.json", "--x0", "0,0", "--rho", "1e-2,1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rho,hausdorff,cone_angle");
    assert_eq!(lines.len(), 3);
    let angle: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
    assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn kernel_eval_matches_library() {
    let dir = workdir();
    let out = conekit(dir.path(), &["kernel-eval", "--domain", "ball.json", "--s", "1", "--x", "0.1,0,0", "--y", "0,0.5,0"]);
    assert_eq!(out.status.code(), Some(0));
    use conekit::kernels::{GreenKernel, Kernel};
    let k = GreenKernel::new(1.0, conekit::geometry::DomainSpec::from_json(BALL3).unwrap()).unwrap();
    let expect = k.eval(&[0.1, 0.0, 0.0], &[0.0, 0.5, 0.0]).unwrap();
    assert_eq!(json(&out)["value"].as_f64().unwrap(), expect);
}

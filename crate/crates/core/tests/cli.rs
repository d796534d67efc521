use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sparse-ergodic"));
    c.env_remove("SPARSE_ERGODIC_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn rows(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("row is json")).collect()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn weil_quadratic_matches_root_p() {
    let out = run(&["arith", "weil", "--p", "7", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &rows(&out)[0];
    let max = r["metrics"]["max"].as_f64().unwrap();
    assert!((max - 7f64.powf(-0.5)).abs() < 1e-9);
    assert_eq!(r["pass"], Value::Bool(true));
}

#[test]
fn count_en_small() {
    let out = run(&["blocks", "count-en", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rows(&out)[0]["metrics"]["count"], 8);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["arith", "weil", "--p", "7", "--m", "9"]).status.code(), Some(2));
    assert_eq!(run(&["arith", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["all-acceptance", "--only", "16"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"seed": 1, "commands": []}"#).unwrap();
    assert_eq!(run(&["--config", empty.to_str().unwrap()]).status.code(), Some(2));
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"commands": [{"module": "arith", "op": "weil"}], "extra": 1}"#).unwrap();
    assert_eq!(run(&["--config", unknown.to_str().unwrap()]).status.code(), Some(2));

    let out = bin().env("SPARSE_ERGODIC_SEED", "abc").args(["blocks", "plan"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threshold_failure_exits_1() {
    // a thousand lattice steps cannot bring the ergodic average within 1e-12
    let out = run(&["dyn", "run", "--sequence", "lattice", "--limit", "1000", "--threshold", "1e-12"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(rows(&out)[0]["pass"], Value::Bool(false));
}

#[test]
fn acceptance_lines() {
    let out = run(&["all-acceptance", "--only", "2,11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("[PASS] 02 "));
    assert!(lines[1].starts_with("[PASS] 11 "));
}

#[test]
fn config_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 5, "commands": [
            {"module": "arith", "op": "weil", "p": 11},
            {"module": "random", "family": "speckled", "action": "sample", "jmin": 2, "jmax": 5},
            {"module": "group", "op": "ttstar", "j": 2},
            {"module": "all-acceptance", "only": [2, 15]}
        ]}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let m = manifest(&a);
    assert_eq!(m["seed"], 5);
    let mut files: Vec<String> =
        m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap().to_string()).collect();
    files.push("manifest.json".into());
    assert!(files.iter().any(|f| f.starts_with("series/")));
    for f in files {
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f} differs");
    }
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name);
    let env_only = bin()
        .env("SPARSE_ERGODIC_SEED", "7")
        .args(["group", "random", "--jmax", "3", "--out", out("env").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(env_only.status.code(), Some(0));
    assert_eq!(manifest(&out("env"))["seed"], 7);

    let flag = bin()
        .env("SPARSE_ERGODIC_SEED", "7")
        .args(["--seed", "9", "group", "random", "--jmax", "3", "--out", out("flag").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(0));
    assert_eq!(manifest(&out("flag"))["seed"], 9);

    // different seeds give different random draws, same seed gives the same ones
    let again = bin()
        .env("SPARSE_ERGODIC_SEED", "7")
        .args(["group", "random", "--jmax", "3", "--out", out("again").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(env_only.stdout, again.stdout);
    assert_ne!(env_only.stdout, flag.stdout);
}

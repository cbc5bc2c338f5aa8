//! End-to-end tests of the three commands through the compiled binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use mdpcert_cli::model_format::write_model;
use mdpcert_testmodels::{detour_chain, three_state};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mdpcert"))
}

fn tmp(name: &str) -> PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("mdpcert-test-{}-{}", std::process::id(), name));
    dir
}

fn write_three_state() -> PathBuf {
    let path = tmp("three_state.mdp");
    std::fs::write(&path, write_model(&three_state())).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary must run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn certify_three_state_pi_and_check() {
    let model = write_three_state();
    let out_path = tmp("three_state.cert");
    let out = run(bin()
        .args(["certify", "--model"])
        .arg(&model)
        .args(["--query", "Pmin=? [F target]", "--bound", "both", "--method", "pi", "--out"])
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("s1 = 1/2"));

    for suffix in ["lower", "upper"] {
        let cert = PathBuf::from(format!("{}.{suffix}", out_path.display()));
        let out = run(bin().args(["check", "--model"]).arg(&model).arg("--certificate").arg(&cert));
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains("valid"));
    }
}

#[test]
fn certify_rejects_unknown_label() {
    let model = write_three_state();
    let out = run(bin()
        .args(["certify", "--model"])
        .arg(&model)
        .args(["--query", "Pmin=? [F nothing]", "--out"])
        .arg(tmp("unused.cert")));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_detects_tampering_with_exit_4() {
    let model = write_three_state();
    let out_path = tmp("three_state-tamper.cert");
    let out = run(bin()
        .args(["certify", "--model"])
        .arg(&model)
        .args(["--query", "Pmin=? [F target]", "--bound", "upper", "--method", "pi", "--out"])
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let tampered = text.replace("x 0 1/2 1", "x 0 2/5 1");
    assert_ne!(text, tampered);
    std::fs::write(&out_path, tampered).unwrap();
    let out = run(bin().args(["check", "--model"]).arg(&model).arg("--certificate").arg(&out_path));
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    // Machine-parseable: one failure per line, `COND state LHS RHS`.
    let line = stderr.lines().next().expect("diagnostic expected");
    let fields: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(fields.len(), 4);
    assert_eq!(fields[0], "bellman_decrease");
    assert_eq!(fields[1], "1");
}

#[test]
fn check_dimension_mismatch_is_usage_error() {
    let model = write_three_state();
    let out_path = tmp("three_state-dim.cert");
    let out = run(bin()
        .args(["certify", "--model"])
        .arg(&model)
        .args(["--query", "Pmin=? [F target]", "--bound", "upper", "--out"])
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(0));
    // A model with a different size.
    let small = tmp("small.mdp");
    std::fs::write(&small, "mdp 1\nlabel target 0\n0 0 -> 0 1\n").unwrap();
    let out = run(bin().args(["check", "--model"]).arg(&small).arg("--certificate").arg(&out_path));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}

#[test]
fn oracle_prints_values_and_caps() {
    let model = write_three_state();
    let out = run(bin()
        .args(["oracle", "--model"])
        .arg(&model)
        .args(["--query", "Pmin=? [F target]"]));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("s1 = 1/2"));
    assert!(stdout(&out).contains("strategy:"));

    let out = run(bin()
        .args(["oracle", "--model"])
        .arg(&model)
        .args(["--query", "Pmin=? [F target]", "--cap", "2"]));
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn oracle_detour_chain_semantics() {
    let path = tmp("e5.mdp");
    std::fs::write(&path, write_model(&detour_chain())).unwrap();
    let out = run(bin()
        .args(["oracle", "--model"])
        .arg(&path)
        .args(["--query", "Emin=? [F target]"]));
    assert!(stdout(&out).contains("s0 = 100"));
    let out = run(bin()
        .args(["oracle", "--model"])
        .arg(&path)
        .args(["--query", "Emin=? [F target] semantics=rho"]));
    assert!(stdout(&out).contains("s0 = 0"));
}

#[test]
fn usage_errors_exit_1() {
    let out = run(bin().args(["certify", "--model", "/nonexistent.mdp", "--query", "x", "--out", "/tmp/x"]));
    assert_eq!(out.status.code(), Some(1));
    let out = run(bin().args(["frobnicate"]));
    assert_eq!(out.status.code(), Some(1));
    let model = write_three_state();
    let out = run(bin()
        .args(["certify", "--model"])
        .arg(&model)
        .args(["--query", "Pmin=? [F target]", "--gamma", "7/5", "--out"])
        .arg(tmp("unused2.cert")));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certify_ii_reports_values_within_epsilon() {
    let model = write_three_state();
    let out_path = tmp("three_state-ii.cert");
    let out = run(bin()
        .args(["certify", "--model"])
        .arg(&model)
        .args([
            "--query",
            "Pmin=? [F target]",
            "--bound",
            "both",
            "--method",
            "ii",
            "--rounding",
            "safe",
            "--gamma",
            "1/20",
            "--epsilon",
            "1/1000000",
            "--out",
        ])
        .arg(&out_path));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for suffix in ["lower", "upper"] {
        let cert = PathBuf::from(format!("{}.{suffix}", out_path.display()));
        let out = run(bin().args(["check", "--model"]).arg(&model).arg("--certificate").arg(&cert));
        assert_eq!(out.status.code(), Some(0));
    }
}

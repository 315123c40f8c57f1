use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn ost(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ost")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn comply_exit_codes() {
    let (code, out, _) = ost(&["comply", path(&fixture("clnt_sess.ost")), path(&fixture("prov_sess.ost"))]);
    assert_eq!(code, 0);
    assert!(out.contains("oracle: compliant") && out.contains("synth: *.(buy"), "{out}");

    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.ost", "!Nat.end");
    let (code, out, _) = ost(&["comply", &a, &a]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("synth: fail"));

    let (code, _, err) = ost(&["comply", &a, "/nonexistent.ost"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
}

#[test]
fn synth_prints_orchestrator_or_fail() {
    let dir = TempDir::new().unwrap();
    let end = write(&dir, "end.ost", "end");
    let (code, out, _) = ost(&["synth", &end, &end]);
    assert_eq!((code, out.trim()), (0, "1"));

    let a = write(&dir, "a.ost", "!Nat.end");
    let b = write(&dir, "b.ost", "?Bool.end");
    let (code, out, _) = ost(&["synth", &a, &b]);
    assert_eq!((code, out.trim()), (1, "fail"));

    let c = path(&fixture("intro_client_sess.ost")).to_string();
    let s = path(&fixture("intro_prov_sess.ost")).to_string();
    let (_, out, _) = ost(&["synth", &c, &s, "--mode", "all-safe"]);
    assert!(out.contains("(+)"), "{out}");
}

#[test]
fn typecheck_reports() {
    let (code, out, _) = ost(&["typecheck", path(&fixture("movie.ost"))]);
    assert_eq!((code, out.trim()), (0, "∅"));

    let (code, _, err) = ost(&["typecheck", path(&fixture("err_both_output.ost"))]);
    assert_eq!(code, 1);
    assert!(err.contains("ComplianceFailure"), "{err}");

    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.ost", "request a:(!Nat)(k).");
    let (code, _, err) = ost(&["typecheck", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("parse error"), "{err}");

    let open = write(&dir, "open.ost", "k^-!<1>.k^-?(x)");
    let (code, out, _) = ost(&["typecheck", &open]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "{k^-: !Nat.?Nat}");
}

#[test]
fn run_exit_codes_and_json() {
    let movie = path(&fixture("movie.ost")).to_string();
    let dead = path(&fixture("deadlock.ost")).to_string();
    let (code, out, _) = ost(&["run", &dead, "--cleanup", "false"]);
    assert_eq!(code, 3);
    assert!(out.contains("classification: ComplianceDependentDeadlock(c0)"), "{out}");
    let (code, _, _) = ost(&["run", &dead]);
    assert_eq!(code, 0);
    let (code, out, _) = ost(&["run", &movie, "--step-limit", "3"]);
    assert_eq!(code, 4, "{out}");

    let (code, out, _) = ost(&["run", &movie, "--output", "json", "--seed", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["version", "mode", "cleanup", "seed", "steps", "final"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 5);
    let step = &v["steps"][0];
    for key in ["step", "rule", "channel", "label", "state"] {
        assert!(step.get(key).is_some(), "missing {key}");
    }
    assert!(v["final"]["errors"].is_array());
}

#[test]
fn seeded_runs_are_reproducible() {
    let movie = path(&fixture("movie.ost")).to_string();
    let a = ost(&["run", &movie, "--seed", "11"]);
    let b = ost(&["run", &movie, "--seed", "11"]);
    assert_eq!(a, b);
}

#[test]
fn replay_and_trace_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("trace.json");
    let (code, text, _) = ost(&[
        "run",
        path(&fixture("movie.ost")),
        "--replay",
        path(&fixture("rental.replay")),
        "--trace",
        path(&out),
    ]);
    assert_eq!(code, 0);
    assert!(text.lines().next().unwrap().contains("Link a/b"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 14);
}

#[test]
fn env_file_fixes_function_results() {
    let dir = TempDir::new().unwrap();
    let env = write(
        &dir,
        "env.json",
        r#"{"ready": {"params": ["Nat"], "result": "Bool", "cases": [{"args": [1], "result": true}]}}"#,
    );
    let p = write(&dir, "p.ost", "request a:(!Nat)(k).if ready(1) then k!<1> else k!<2> | accept a:(?Nat)(k).k?(x)");
    let (code, out, _) = ost(&["run", &p, "--env", &env]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("If then"), "{out}");
    assert!(!out.contains("If else"), "{out}");
}

#[test]
fn fuzz_summary() {
    let (code, out, _) = ost(&["fuzz", "--suite", "synth", "--n", "50", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "synth: 50 cases, 0 failures");
    let (code, out, _) = ost(&["fuzz", "--suite", "roundtrip", "--n", "20"]);
    assert_eq!((code, out.trim()), (0, "roundtrip: 20 cases, 0 failures"));
}

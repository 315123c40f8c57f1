//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use ost_cli::{cmd_comply, cmd_run, cmd_synth, cmd_typecheck, fuzz, parse_replay, CliConfig, EXIT_OK, EXIT_RUNTIME_ERROR};
use ost_core::congruence::{canonicalize, congruent};
use ost_core::propgen::Suite;
use ost_core::semantics::{classify_errors, run, Replay, SemanticsMode};
use ost_core::surface::{parse_orch, parse_process_file};
use ost_core::syntax::{Arms, Context, Orchestrator, Process};
use ost_core::typecheck::{typecheck, TypeErrorKind};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn process(name: &str) -> Process {
    let path = fixture(name);
    parse_process_file(&std::fs::read_to_string(&path).unwrap(), &path.display().to_string()).unwrap()
}

/// Sorts the arms of every choice so that arm order does not matter.
fn sorted(f: &Orchestrator) -> Orchestrator {
    let arms = |a: &Arms<Orchestrator>| {
        let mut v: Vec<_> = a.iter().map(|(l, g)| (l.clone(), sorted(g))).collect();
        v.sort();
        Arms::new(v).unwrap()
    };
    match f {
        Orchestrator::Idle => Orchestrator::Idle,
        Orchestrator::Io(g) => Orchestrator::io(sorted(g)),
        Orchestrator::Prefix(l, g) => Orchestrator::prefix(l.clone(), sorted(g)),
        Orchestrator::External(a) => Orchestrator::External(arms(a)),
        Orchestrator::Internal(a) => Orchestrator::Internal(arms(a)),
    }
}

fn check(cond: bool, why: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why.into())
    }
}

fn suite_clean(suite: Suite, n: usize) -> Result<(), String> {
    let s = fuzz(suite, n, 0, None);
    match s.failures.first() {
        None => Ok(()),
        Some(f) => Err(format!("{} of {n} cases failed; first: {f}", s.failures.len())),
    }
}

fn running_example_compliance() -> Result<(), String> {
    let g = cmd_comply(&fixture("clnt_sess.ost"), &fixture("prov_sess.ost"), Some(&fixture("g.ost")));
    let h = cmd_comply(&fixture("bank_cust_sess.ost"), &fixture("bank_sess.ost"), Some(&fixture("h.ost")));
    check(g.code == EXIT_OK && g.stdout.trim() == "compliant", format!("g: {}", g.stdout.trim()))?;
    check(h.code == EXIT_OK && h.stdout.trim() == "compliant", format!("h: {}", h.stdout.trim()))
}

fn priority_synthesis() -> Result<(), String> {
    let r = cmd_synth(&fixture("intro_client_sess_priority.ost"), &fixture("intro_prov_sess.ost"), false);
    let got = parse_orch(r.stdout.trim()).map_err(|e| format!("{e}: {}", r.stdout))?;
    let want = parse_orch(&std::fs::read_to_string(fixture("f2.ost")).unwrap()).unwrap();
    check(sorted(&got) == sorted(&want), format!("got {got}"))
}

fn running_system_typing() -> Result<(), String> {
    let r = cmd_typecheck(&fixture("movie.ost"), &CliConfig::default());
    check(r.code == EXIT_OK && r.stdout.trim() == "∅", format!("{}{}", r.stdout, r.stderr))
}

fn error_rejection() -> Result<(), String> {
    let cases = [
        ("err_both_output.ost", TypeErrorKind::ComplianceFailure, "OrchSynchError"),
        ("err_same_polarity.ost", TypeErrorKind::PolarityClash, "OrchSynchError"),
        ("err_io_vs_label.ost", TypeErrorKind::ComplianceFailure, "OrchSynchError"),
        ("err_vacuous.ost", TypeErrorKind::ComplianceFailure, "VacuousOrchError"),
    ];
    let mut diagnostics = Vec::new();
    for (file, kind, class) in cases {
        let p = process(file);
        let e = typecheck(&Context::new(), &p, SemanticsMode::Plain).err().ok_or(format!("{file} typechecks"))?;
        check(e.kind == kind, format!("{file}: {e}"))?;
        diagnostics.push(e.to_string());
        let classes = classify_errors(&canonicalize(&p).map_err(|e| e.to_string())?, true);
        check(
            classes.iter().any(|c| c.to_string().starts_with(class)),
            format!("{file}: classified {classes:?}"),
        )?;
    }
    diagnostics.sort();
    diagnostics.dedup();
    check(diagnostics.len() == 4, "diagnostics are not distinct")
}

fn figure_trace() -> Result<(), String> {
    let out = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
    let r = cmd_run(&fixture("movie.ost"), &CliConfig::default(), Some(&fixture("rental.replay")), Some(out.path()));
    check(r.code == EXIT_OK, format!("exit {}: {}", r.code, r.stdout))?;
    let script = parse_replay(&std::fs::read_to_string(fixture("rental.replay")).unwrap())?;
    let want: Vec<String> = script.iter().map(|s| s.rule.clone()).collect();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.path()).unwrap()).unwrap();
    let got: Vec<String> = json["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["rule"].as_str().unwrap().to_string())
        .collect();
    check(got == want, format!("rules {got:?}"))?;
    let trace = run(&process("movie.ost"), SemanticsMode::Plain, true, &mut Replay::new(script), 100)
        .map_err(|e| e.to_string())?;
    check(
        congruent(&trace.final_state.to_process(), &process("movie_final.ost")),
        format!("final state {}", trace.final_state),
    )
}

fn deadlock_and_cleanup() -> Result<(), String> {
    let off = CliConfig {
        cleanup: false,
        ..CliConfig::default()
    };
    let r = cmd_run(&fixture("deadlock.ost"), &off, None, None);
    check(
        r.code == EXIT_RUNTIME_ERROR && r.stdout.contains("ComplianceDependentDeadlock(c0)"),
        format!("without clean-up: exit {}", r.code),
    )?;
    let r = cmd_run(&fixture("deadlock.ost"), &CliConfig::default(), None, None);
    check(r.code == EXIT_OK, format!("with clean-up: exit {}", r.code))?;
    let trace = run(
        &process("deadlock.ost"),
        SemanticsMode::Plain,
        true,
        &mut ost_core::semantics::Deterministic,
        100,
    )
    .map_err(|e| e.to_string())?;
    check(
        congruent(&trace.final_state.to_process(), &process("deadlock_final.ost")),
        format!("final state {}", trace.final_state),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<(), String>); 10] = [
        ("running-example compliance", running_example_compliance),
        ("priority synthesis", priority_synthesis),
        ("synthesis vs oracle, 1000 pairs", || suite_clean(Suite::Synth, 1000)),
        ("typing of the running system", running_system_typing),
        ("error terms rejected and classified", error_rejection),
        ("rental trace replay", figure_trace),
        ("deadlock and clean-up", deadlock_and_cleanup),
        ("subject reduction, 500 processes", || suite_clean(Suite::SubjectReduction, 500)),
        ("error freeness, 500 processes", || suite_clean(Suite::ErrorFreeness, 500)),
        ("congruence and round-trip, 1000 each", || {
            suite_clean(Suite::Congruence, 1000)?;
            suite_clean(Suite::RoundTrip, 1000)
        }),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(()) => println!("criterion {:>2} {name}: pass ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.1}s): {e}", i + 1);
            }
        }
    }
    println!("{} of 10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::path::PathBuf;

use ost_core::compliance::{check_compliance, synth, synth_ud, SynthResult};
use ost_core::congruence::{canonicalize, congruent};
use ost_core::semantics::{
    classify_errors, run, Deterministic, ErrorClass, Replay, ReplayStep, SemanticsMode,
};
use ost_core::surface::{parse_orch_file, parse_process_file, parse_type_file};
use ost_core::syntax::{Context, Orchestrator, Process, SessionType};
use ost_core::typecheck::{typecheck, TypeErrorKind};

fn read(name: &str) -> (String, String) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    (std::fs::read_to_string(&path).unwrap(), path.display().to_string())
}

fn ty(name: &str) -> SessionType {
    let (src, file) = read(name);
    parse_type_file(&src, &file).unwrap()
}

fn orch(name: &str) -> Orchestrator {
    let (src, file) = read(name);
    parse_orch_file(&src, &file).unwrap()
}

fn process(name: &str) -> Process {
    let (src, file) = read(name);
    parse_process_file(&src, &file).unwrap()
}

#[test]
fn movie_orchestrators_are_compliant() {
    assert!(check_compliance(&orch("g.ost"), &ty("clnt_sess.ost"), &ty("prov_sess.ost")));
    assert!(check_compliance(&orch("h.ost"), &ty("bank_cust_sess.ost"), &ty("bank_sess.ost")));
    assert!(!check_compliance(&orch("h.ost"), &ty("clnt_sess.ost"), &ty("prov_sess.ost")));
}

#[test]
fn priorities_select_the_preferred_rental() {
    let got = synth(&ty("intro_client_sess_priority.ost"), &ty("intro_prov_sess.ost"));
    assert_eq!(got, SynthResult::Ok(orch("f2.ost")));
}

#[test]
fn unprioritized_synthesis_keeps_both_safe_rentals() {
    let SynthResult::Ok(f) = synth_ud(&ty("intro_client_sess.ost"), &ty("intro_prov_sess.ost")) else {
        panic!("expected an orchestrator")
    };
    assert_eq!(f.to_string(), "*.(buy.(uhd.*.(ok.* + no) + hd.*.(ok.* + no)) + rent.(sd.*.(ok.* + no) (+) ld.*.(ok.* + no)))");
}

#[test]
fn running_system_is_closed() {
    let d = typecheck(&Context::new(), &process("movie.ost"), SemanticsMode::Plain).unwrap();
    assert!(d.is_empty(), "{d}");
}

#[test]
fn error_terms_are_rejected_and_classified() {
    let cases = [
        ("err_both_output.ost", TypeErrorKind::ComplianceFailure, "OrchSynchError"),
        ("err_same_polarity.ost", TypeErrorKind::PolarityClash, "OrchSynchError"),
        ("err_io_vs_label.ost", TypeErrorKind::ComplianceFailure, "OrchSynchError"),
        ("err_vacuous.ost", TypeErrorKind::ComplianceFailure, "VacuousOrchError"),
    ];
    let mut details = Vec::new();
    for (file, kind, class) in cases {
        let p = process(file);
        let e = typecheck(&Context::new(), &p, SemanticsMode::Plain).unwrap_err();
        assert_eq!(e.kind, kind, "{file}: {e}");
        details.push(e.to_string());
        let classes = classify_errors(&canonicalize(&p).unwrap(), true);
        assert!(classes.iter().any(|c| c.to_string().starts_with(class)), "{file}: {classes:?}");
    }
    details.sort();
    details.dedup();
    assert_eq!(details.len(), 4);
}

fn rental_script() -> Vec<ReplayStep> {
    [
        ("Link", None),
        ("OrchComm", None),
        ("If", Some("else")),
        ("OrchSel", Some("rent")),
        ("OrchSSel", Some("sd")),
        ("OrchComm", None),
        ("If", Some("then")),
        ("OrchSel", Some("ok")),
        ("Link", None),
        ("OrchComm", None),
        ("OrchDeleg", None),
        ("OrchSSel", Some("Mcard")),
        ("OrchComm", None),
        ("OrchComm", None),
    ]
    .into_iter()
    .map(|(r, l)| ReplayStep::new(r, l))
    .collect()
}

#[test]
fn rental_trace() {
    let mut sched = Replay::new(rental_script());
    let trace = run(&process("movie.ost"), SemanticsMode::Plain, true, &mut sched, 100).unwrap();
    let rules: Vec<&str> = trace.steps.iter().map(|s| s.rule.name()).collect();
    assert_eq!(
        rules,
        [
            "Link", "OrchComm", "If", "OrchSel", "OrchSSel", "OrchComm", "If", "OrchSel", "Link", "OrchComm",
            "OrchDeleg", "OrchSSel", "OrchComm", "OrchComm"
        ]
    );
    assert!(congruent(&trace.final_state.to_process(), &process("movie_final.ost")), "{}", trace.final_state);
    assert_eq!(trace.errors, vec![ErrorClass::NotAnError]);
}

#[test]
fn rental_run_under_deterministic_scheduler_terminates() {
    let trace = run(&process("movie.ost"), SemanticsMode::Plain, true, &mut Deterministic, 100).unwrap();
    assert_eq!(trace.errors, vec![ErrorClass::NotAnError]);
    assert!(trace.final_state.threads.iter().all(|t| *t == Process::Inact), "{}", trace.final_state);
}

#[test]
fn pending_server_output_deadlocks_without_cleanup() {
    let p = process("deadlock.ost");
    let stuck = run(&p, SemanticsMode::Plain, false, &mut Deterministic, 100).unwrap();
    assert_eq!(stuck.errors, vec![ErrorClass::ComplianceDependentDeadlock("c0".into())]);
    let cleaned = run(&p, SemanticsMode::Plain, true, &mut Deterministic, 100).unwrap();
    assert!(congruent(&cleaned.final_state.to_process(), &process("deadlock_final.ost")), "{}", cleaned.final_state);
}

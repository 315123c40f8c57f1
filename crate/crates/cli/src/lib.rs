//! Commands behind the `ost` binary. Each command returns a [`Report`]
//! holding its exit status and output, so it can be driven from tests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ost_core::compliance::{check_compliance, oracle_compliant, synth, synth_ud, SynthResult};
use ost_core::propgen::{run_case, CaseFailure, Suite};
use ost_core::semantics::{
    state_hash, Deterministic, ErrorClass, Outcome, Replay, ReplayStep, Scheduler, SeededRandom,
    Semantics, SemanticsMode, Trace,
};
use ost_core::surface::{
    parse_orch_file, parse_process_file, parse_type_file, pretty_orch, ParseError,
};
use ost_core::syntax::{Context, FnSig, FunctionTable, GroundType, GroundValue};
use ost_core::typecheck::typecheck_with;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME_ERROR: i32 = 3;
pub const EXIT_STEP_LIMIT: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub mode: SemanticsMode,
    pub cleanup: bool,
    pub seed: Option<u64>,
    pub step_limit: usize,
    pub output: OutputFormat,
    /// JSON file of function stubs.
    pub env_file: Option<PathBuf>,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            mode: SemanticsMode::Plain,
            cleanup: true,
            seed: None,
            step_limit: 10_000,
            output: OutputFormat::Text,
            env_file: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    fn usage(msg: impl Into<String>) -> Self {
        Report {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into() + "\n",
        }
    }
}

fn read(path: &Path) -> Result<String, Report> {
    fs::read_to_string(path).map_err(|e| Report::usage(format!("cannot read {}: {e}", path.display())))
}

fn parsed<T>(path: &Path, parse: fn(&str, &str) -> Result<T, ParseError>) -> Result<T, Report> {
    let src = read(path)?;
    parse(&src, &path.display().to_string()).map_err(|e| Report::usage(format!("parse error: {e}")))
}

fn show(r: &SynthResult) -> String {
    match r {
        SynthResult::Ok(f) => pretty_orch(f),
        SynthResult::Fail => "fail".into(),
    }
}

pub fn cmd_comply(client: &Path, server: &Path, orch: Option<&Path>) -> Report {
    let go = || -> Result<Report, Report> {
        let c = parsed(client, parse_type_file)?;
        let s = parsed(server, parse_type_file)?;
        if let Some(o) = orch {
            let f = parsed(o, parse_orch_file)?;
            let ok = check_compliance(&f, &c, &s);
            return Ok(Report {
                code: if ok { EXIT_OK } else { EXIT_FAIL },
                stdout: format!("{}\n", if ok { "compliant" } else { "not compliant" }),
                stderr: String::new(),
            });
        }
        let ok = oracle_compliant(&c, &s, 256).map_err(|e| Report::usage(e.to_string()))?;
        let mut out = String::new();
        writeln!(out, "oracle: {}", if ok { "compliant" } else { "not compliant" }).unwrap();
        writeln!(out, "synth: {}", show(&synth(&c, &s))).unwrap();
        writeln!(out, "synth-ud: {}", show(&synth_ud(&c, &s))).unwrap();
        Ok(Report {
            code: if ok { EXIT_OK } else { EXIT_FAIL },
            stdout: out,
            stderr: String::new(),
        })
    };
    go().unwrap_or_else(|r| r)
}

/// `all_safe` selects the synthesis keeping every safe speculative option.
pub fn cmd_synth(client: &Path, server: &Path, all_safe: bool) -> Report {
    let go = || -> Result<Report, Report> {
        let c = parsed(client, parse_type_file)?;
        let s = parsed(server, parse_type_file)?;
        let r = if all_safe { synth_ud(&c, &s) } else { synth(&c, &s) };
        Ok(Report {
            code: if r.is_fail() { EXIT_FAIL } else { EXIT_OK },
            stdout: show(&r) + "\n",
            stderr: String::new(),
        })
    };
    go().unwrap_or_else(|r| r)
}

#[derive(Debug, Deserialize)]
struct StubCase {
    args: Vec<serde_json::Value>,
    result: serde_json::Value,
}

#[derive(Debug, Deserialize)]
struct Stub {
    params: Vec<String>,
    result: String,
    #[serde(default)]
    cases: Vec<StubCase>,
}

fn json_value(v: &serde_json::Value, ty: &GroundType) -> Result<GroundValue, String> {
    use serde_json::Value as J;
    match (v, ty.name()) {
        (J::Number(n), "Nat") => n.as_u64().map(GroundValue::Nat).ok_or_else(|| format!("{n} is not a Nat")),
        (J::Bool(b), "Bool") => Ok(GroundValue::Bool(*b)),
        (J::String(s), "String") => Ok(GroundValue::Str(s.clone())),
        (v, name) if !matches!(name, "Nat" | "Bool" | "String") => {
            // named ground types are written as their coercion `Name(arg)`
            let inner = match v {
                J::Number(n) => GroundValue::Nat(n.as_u64().ok_or_else(|| format!("{n} is not a Nat"))?),
                J::Bool(b) => GroundValue::Bool(*b),
                J::String(s) => GroundValue::Str(s.clone()),
                other => return Err(format!("unsupported value {other}")),
            };
            Ok(GroundValue::Sym {
                tag: name.to_string(),
                args: vec![inner],
                ty: ty.clone(),
            })
        }
        (v, name) => Err(format!("{v} is not a {name}")),
    }
}

/// The default function table extended with the stubs in `path`:
/// `{"name": {"params": [..], "result": "T", "cases": [{"args": [..], "result": v}]}}`.
pub fn load_env(path: Option<&Path>) -> Result<FunctionTable, String> {
    let mut table = FunctionTable::default();
    let Some(path) = path else { return Ok(table) };
    let src = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let stubs: BTreeMap<String, Stub> = serde_json::from_str(&src).map_err(|e| format!("{}: {e}", path.display()))?;
    for (name, stub) in stubs {
        let params: Vec<GroundType> = stub.params.iter().map(GroundType::new).collect();
        let result = GroundType::new(&stub.result);
        let mut sig = FnSig::new(params.clone(), result.clone());
        for case in stub.cases {
            if case.args.len() != params.len() {
                return Err(format!("{name}: case has {} arguments, expected {}", case.args.len(), params.len()));
            }
            let args = case
                .args
                .iter()
                .zip(&params)
                .map(|(v, t)| json_value(v, t))
                .collect::<Result<Vec<_>, _>>()?;
            sig.cases.insert(args, json_value(&case.result, &result)?);
        }
        table.register(&name, sig);
    }
    Ok(table)
}

pub fn cmd_typecheck(file: &Path, cfg: &CliConfig) -> Report {
    let go = || -> Result<Report, Report> {
        let p = parsed(file, parse_process_file)?;
        let table = load_env(cfg.env_file.as_deref()).map_err(Report::usage)?;
        Ok(match typecheck_with(&table, &Context::new(), &p, cfg.mode) {
            Ok(d) => {
                let d = d.without_ends();
                let text = if d.is_empty() { "∅".to_string() } else { d.to_string() };
                Report {
                    code: EXIT_OK,
                    stdout: text + "\n",
                    stderr: String::new(),
                }
            }
            Err(e) => Report {
                code: EXIT_FAIL,
                stdout: String::new(),
                stderr: format!("{}: {e}\n", file.display()),
            },
        })
    };
    go().unwrap_or_else(|r| r)
}

/// Reads a replay script: one step per line, `Rule` or `Rule label`;
/// `#` starts a comment.
pub fn parse_replay(src: &str) -> Result<Vec<ReplayStep>, String> {
    src.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut words = l.split_whitespace();
            let rule = words.next().unwrap();
            let label = words.next();
            if words.next().is_some() {
                return Err(format!("bad replay line `{l}`"));
            }
            Ok(ReplayStep::new(rule, label))
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonStep {
    pub step: usize,
    pub rule: String,
    pub channel: Option<String>,
    pub label: Option<String>,
    pub state: String,
    pub hash: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonFinal {
    pub state: String,
    pub hash: String,
    pub outcome: String,
    pub errors: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonTrace {
    pub version: u32,
    pub mode: String,
    pub cleanup: bool,
    pub seed: Option<u64>,
    pub steps: Vec<JsonStep>,
    #[serde(rename = "final")]
    pub final_: JsonFinal,
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Terminated => "terminated",
        Outcome::Halted => "halted",
        Outcome::StepLimitExceeded => "step-limit-exceeded",
    }
}

pub fn trace_json(t: &Trace) -> JsonTrace {
    JsonTrace {
        version: 1,
        mode: t.mode.name().into(),
        cleanup: t.cleanup,
        seed: t.seed,
        steps: t
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| JsonStep {
                step: i + 1,
                rule: s.rule.name().into(),
                channel: s.channel.clone(),
                label: s.label.as_ref().map(|l| l.as_str().to_string()),
                state: s.state.to_string(),
                hash: state_hash(&s.state),
            })
            .collect(),
        final_: JsonFinal {
            state: t.final_state.to_string(),
            hash: state_hash(&t.final_state),
            outcome: outcome_name(t.outcome).into(),
            errors: t.errors.iter().map(|e| e.to_string()).collect(),
        },
    }
}

pub fn trace_text(t: &Trace) -> String {
    let mut out = String::new();
    for (i, s) in t.steps.iter().enumerate() {
        write!(out, "{:>3} {}", i + 1, s.rule).unwrap();
        if let Some(c) = &s.channel {
            write!(out, " {c}").unwrap();
        }
        if let Some(l) = &s.label {
            write!(out, " {l}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "final: {}", t.final_state).unwrap();
    writeln!(out, "outcome: {}", outcome_name(t.outcome)).unwrap();
    let errors: Vec<String> = t.errors.iter().map(|e| e.to_string()).collect();
    writeln!(out, "classification: {}", errors.join(", ")).unwrap();
    out
}

/// Runs a process. The scheduler is the replay script when given, else a
/// seeded random one when `cfg.seed` is set, else the deterministic one.
pub fn cmd_run(file: &Path, cfg: &CliConfig, replay: Option<&Path>, trace_out: Option<&Path>) -> Report {
    let go = || -> Result<Report, Report> {
        let p = parsed(file, parse_process_file)?;
        let table = load_env(cfg.env_file.as_deref()).map_err(Report::usage)?;
        let mut sched: Box<dyn Scheduler> = match (replay, cfg.seed) {
            (Some(r), _) => Box::new(Replay::new(parse_replay(&read(r)?).map_err(Report::usage)?)),
            (None, Some(seed)) => Box::new(SeededRandom::new(seed)),
            (None, None) => Box::new(Deterministic),
        };
        let sem = Semantics::new(cfg.mode, cfg.cleanup).with_table(table);
        let trace = sem
            .run(&p, sched.as_mut(), cfg.step_limit)
            .map_err(|e| Report::usage(format!("malformed process: {e}")))?;
        let json = || serde_json::to_string_pretty(&trace_json(&trace)).unwrap() + "\n";
        if let Some(out) = trace_out {
            fs::write(out, json()).map_err(|e| Report::usage(format!("cannot write {}: {e}", out.display())))?;
        }
        let code = if trace.outcome == Outcome::StepLimitExceeded {
            EXIT_STEP_LIMIT
        } else if trace.errors.iter().any(|e| *e != ErrorClass::NotAnError) {
            EXIT_RUNTIME_ERROR
        } else {
            EXIT_OK
        };
        Ok(Report {
            code,
            stdout: match cfg.output {
                OutputFormat::Text => trace_text(&trace),
                OutputFormat::Json => json(),
            },
            stderr: String::new(),
        })
    };
    go().unwrap_or_else(|r| r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzSummary {
    pub suite: Suite,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
}

/// Runs `n` cases of a suite on the rayon pool. Case `i` uses seed
/// `seed + i`, so results do not depend on the number of threads.
pub fn fuzz(suite: Suite, n: usize, seed: u64, max_depth: Option<usize>) -> FuzzSummary {
    let depth = max_depth.unwrap_or(suite.default_depth());
    let mut failures: Vec<CaseFailure> = (0..n as u64)
        .into_par_iter()
        .filter_map(|i| run_case(suite, seed.wrapping_add(i), depth).err())
        .collect();
    failures.sort_by_key(|f| f.seed);
    FuzzSummary {
        suite,
        cases: n,
        failures,
    }
}

pub fn cmd_fuzz(suites: &[Suite], n: usize, seed: u64, max_depth: Option<usize>) -> Report {
    let mut out = String::new();
    let mut failed = false;
    for &suite in suites {
        let s = fuzz(suite, n, seed, max_depth);
        writeln!(out, "{}: {} cases, {} failures", suite, s.cases, s.failures.len()).unwrap();
        if let Some(first) = s.failures.first() {
            failed = true;
            writeln!(out, "{first}").unwrap();
        }
    }
    Report {
        code: if failed { EXIT_FAIL } else { EXIT_OK },
        stdout: out,
        stderr: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = CliConfig::default();
        assert_eq!(c.mode, SemanticsMode::Plain);
        assert!(c.cleanup);
        assert_eq!(c.step_limit, 10_000);
        assert_eq!(c.output, OutputFormat::Text);
    }

    #[test]
    fn replay_scripts() {
        let s = parse_replay("Link\n# comment\nOrchSel rent  # pick rent\n\n").unwrap();
        assert_eq!(s, vec![ReplayStep::new("Link", None), ReplayStep::new("OrchSel", Some("rent"))]);
        assert!(parse_replay("If then else").is_err());
    }

    #[test]
    fn stub_values_follow_their_types() {
        let nat = GroundType::nat();
        assert_eq!(json_value(&serde_json::json!(3), &nat), Ok(GroundValue::Nat(3)));
        assert!(json_value(&serde_json::json!(true), &nat).is_err());
        let v = json_value(&serde_json::json!(7), &GroundType::new("Amount")).unwrap();
        assert_eq!(v.ground_type(), GroundType::new("Amount"));
    }
}

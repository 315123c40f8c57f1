use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{gen_orch, gen_runtime, gen_synth_pair, gen_type, gen_typed_process, rewrite_neighbours, rewrite_walk, shrink};
use crate::compliance::{check_compliance, is_deterministic, oracle_compliant, synth, synth_ud, SynthResult};
use crate::congruence::{canonicalize, CanonicalProcess};
use crate::semantics::{ErrorClass, Semantics, SemanticsMode};
use crate::surface::{parse_orch, parse_process, parse_type, pretty_orch, pretty_process, pretty_type};
use crate::syntax::{Context, Process, SessionType, Typing};
use crate::typecheck::typecheck;

/// Successors explored per state.
pub const BRANCHING: usize = 4;
/// Longest reduction sequence explored.
pub const STEP_LIMIT: usize = 200;
const STATE_CAP: usize = 4000;
const ORACLE_DEPTH: usize = 64;
const MODES: [SemanticsMode; 3] = [
    SemanticsMode::Plain,
    SemanticsMode::PriorityType,
    SemanticsMode::PriorityProcess,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Synth,
    SubjectReduction,
    ErrorFreeness,
    Congruence,
    RoundTrip,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Synth,
        Suite::SubjectReduction,
        Suite::ErrorFreeness,
        Suite::Congruence,
        Suite::RoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Synth => "synth",
            Suite::SubjectReduction => "subject-reduction",
            Suite::ErrorFreeness => "error-freeness",
            Suite::Congruence => "congruence",
            Suite::RoundTrip => "roundtrip",
        }
    }

    pub fn default_depth(self) -> usize {
        match self {
            Suite::Synth => 5,
            Suite::SubjectReduction | Suite::ErrorFreeness => 3,
            Suite::Congruence | Suite::RoundTrip => 4,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseFailure {
    pub suite: Suite,
    pub seed: u64,
    pub message: String,
    /// Shrunk input, in surface syntax.
    pub counterexample: String,
}

impl fmt::Display for CaseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} case {}: {}\n  counterexample: {}",
            self.suite, self.seed, self.message, self.counterexample
        )
    }
}

/// Checks synthesis against the brute-force oracle on one pair.
pub fn check_synth_case(
    client: &SessionType,
    server: &SessionType,
    synth_fn: &dyn Fn(&SessionType, &SessionType) -> SynthResult,
) -> Result<(), String> {
    let expected = oracle_compliant(client, server, ORACLE_DEPTH).map_err(|e| e.to_string())?;
    match synth_fn(client, server) {
        SynthResult::Ok(f) if !expected => Err(format!("synthesized {} but the pair is not compliant", pretty_orch(&f))),
        SynthResult::Ok(f) if !check_compliance(&f, client, server) => {
            Err(format!("synthesized {} fails the compliance check", pretty_orch(&f)))
        }
        SynthResult::Ok(f) if !is_deterministic(&f) => Err(format!("synthesized {} is not deterministic", pretty_orch(&f))),
        SynthResult::Fail if expected => Err("synthesis failed on a compliant pair".into()),
        _ => Ok(()),
    }?;
    match synth_ud(client, server) {
        SynthResult::Ok(f) if !expected || !check_compliance(&f, client, server) => {
            Err(format!("all-safe synthesis gave {}", pretty_orch(&f)))
        }
        SynthResult::Fail if expected => Err("all-safe synthesis failed on a compliant pair".into()),
        _ => Ok(()),
    }
}

/// Summary of a bounded exploration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exploration {
    pub states: usize,
    pub stuck: usize,
}

/// Breadth-first walk over the states reachable from `p`, following at most
/// [`BRANCHING`] redexes per state (sampled by `seed` when more are enabled)
/// up to [`STEP_LIMIT`] steps. `visit` sees each state once, with a flag
/// telling whether it is stuck.
pub fn explore(
    p: &Process,
    sem: &Semantics,
    seed: u64,
    visit: &mut dyn FnMut(&CanonicalProcess, bool) -> Result<(), String>,
) -> Result<Exploration, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = canonicalize(p).map_err(|e| e.to_string())?;
    let mut seen: HashSet<CanonicalProcess> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut summary = Exploration { states: 0, stuck: 0 };
    while let Some((s, depth)) = queue.pop_front() {
        let mut redexes = sem.redexes(&s);
        summary.states += 1;
        summary.stuck += usize::from(redexes.is_empty());
        visit(&s, redexes.is_empty())?;
        if depth >= STEP_LIMIT || seen.len() >= STATE_CAP {
            continue;
        }
        if redexes.len() > BRANCHING {
            redexes.shuffle(&mut rng);
            redexes.truncate(BRANCHING);
        }
        for r in &redexes {
            let next = sem.apply(&s, r).map_err(|e| e.to_string())?;
            if seen.insert(next.clone()) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    Ok(summary)
}

fn typed_empty(p: &Process, mode: SemanticsMode) -> Result<Typing, String> {
    let d = typecheck(&Context::new(), p, mode).map_err(|e| e.to_string())?;
    if !d.without_ends().is_empty() {
        return Err(format!("typing is not empty: {d:?}"));
    }
    Ok(d)
}

fn subject_reduction(p: &Process, seed: u64) -> Result<(), String> {
    for mode in MODES {
        let d0 = typed_empty(p, mode)?;
        for cleanup in [false, true] {
            let sem = Semantics::new(mode, cleanup);
            explore(p, &sem, seed, &mut |s, _| match typecheck(&Context::new(), &s.to_process(), mode) {
                Ok(d) if d.equivalent(&d0) => Ok(()),
                Ok(d) => Err(format!("[{} cleanup={cleanup}] typing changed to {d:?} at {s}", mode.name())),
                Err(e) => Err(format!("[{} cleanup={cleanup}] {e} at {s}", mode.name())),
            })?;
        }
    }
    Ok(())
}

fn error_freeness(p: &Process, seed: u64) -> Result<(), String> {
    for mode in MODES {
        typed_empty(p, mode)?;
        for cleanup in [false, true] {
            let sem = Semantics::new(mode, cleanup);
            explore(p, &sem, seed, &mut |s, _| {
                let bad = sem.classify(s).into_iter().find(|e| match e {
                    ErrorClass::OrchSynchError(_) | ErrorClass::VacuousOrchError(_) => true,
                    ErrorClass::ComplianceDependentDeadlock(_) => cleanup,
                    ErrorClass::NotAnError => false,
                });
                match bad {
                    Some(e) => Err(format!("[{} cleanup={cleanup}] {e} at {s}", mode.name())),
                    None => Ok(()),
                }
            })?;
        }
    }
    Ok(())
}

fn congruence(p: &Process, seed: u64) -> Result<(), String> {
    let c = canonicalize(p).map_err(|e| e.to_string())?;
    let same = |q: &Process| -> Result<(), String> {
        match canonicalize(q) {
            Ok(d) if d == c => Ok(()),
            Ok(d) => Err(format!("{} and its rewrite {} normalize to {c} and {d}", pretty_process(p), pretty_process(q))),
            Err(e) => Err(format!("rewrite {} rejected: {e}", pretty_process(q))),
        }
    };
    same(&c.to_process())?;
    same(&rewrite_walk(seed, p, 40))?;
    // every process within two rewrites
    let mut frontier = vec![p.clone()];
    for _ in 0..2 {
        let mut next = Vec::new();
        for q in &frontier {
            for r in rewrite_neighbours(q).into_iter().take(60) {
                same(&r)?;
                next.push(r);
            }
        }
        frontier = next;
    }
    Ok(())
}

fn round_trip(seed: u64, depth: usize) -> Result<(), String> {
    let t = gen_type(seed, depth, true, seed % 2 == 0);
    let text = pretty_type(&t);
    match parse_type(&text) {
        Ok(u) if u == t => {}
        other => return Err(format!("type `{text}` reparsed as {other:?}")),
    }
    let f = gen_orch(seed, depth);
    let text = pretty_orch(&f);
    match parse_orch(&text) {
        Ok(g) if g == f => {}
        other => return Err(format!("orchestrator `{text}` reparsed as {other:?}")),
    }
    for p in [gen_typed_process(seed, 1 + (seed % 3) as usize, depth), gen_runtime(seed)] {
        let text = pretty_process(&p);
        match parse_process(&text) {
            Ok(q) if q == p => {}
            other => return Err(format!("process `{text}` reparsed as {other:?}")),
        }
    }
    Ok(())
}

fn process_failure(suite: Suite, seed: u64, p: Process, message: String, check: fn(&Process, u64) -> Result<(), String>) -> CaseFailure {
    let small = shrink(p, |q| typed_empty(q, SemanticsMode::Plain).is_ok() && check(q, seed).is_err());
    CaseFailure {
        suite,
        seed,
        message,
        counterexample: pretty_process(&small),
    }
}

/// Runs one case of a suite. Cases are independent and determined by
/// `(seed, max_depth)`.
pub fn run_case(suite: Suite, seed: u64, max_depth: usize) -> Result<(), CaseFailure> {
    match suite {
        Suite::Synth => {
            let (c, s) = gen_synth_pair(seed, max_depth);
            check_synth_case(&c, &s, &synth).map_err(|message| {
                let (c, s) = shrink((c, s), |(c, s)| check_synth_case(c, s, &synth).is_err());
                CaseFailure {
                    suite,
                    seed,
                    message,
                    counterexample: format!("{} vs {}", pretty_type(&c), pretty_type(&s)),
                }
            })
        }
        Suite::SubjectReduction | Suite::ErrorFreeness => {
            let check = if suite == Suite::SubjectReduction { subject_reduction } else { error_freeness };
            let p = gen_typed_process(seed, 1 + (seed % 2) as usize, max_depth);
            check(&p, seed).map_err(|m| process_failure(suite, seed, p, m, check))
        }
        Suite::Congruence => {
            let p = gen_runtime(seed);
            congruence(&p, seed).map_err(|message| CaseFailure {
                suite,
                seed,
                message,
                counterexample: pretty_process(&p),
            })
        }
        Suite::RoundTrip => round_trip(seed, max_depth).map_err(|message| CaseFailure {
            suite,
            seed,
            message,
            counterexample: format!("seed {seed}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Orchestrator;

    #[test]
    fn suites_pass_on_a_few_seeds() {
        for suite in Suite::ALL {
            for seed in 0..10 {
                if let Err(e) = run_case(suite, seed, suite.default_depth()) {
                    panic!("{e}");
                }
            }
        }
    }

    #[test]
    fn broken_synthesis_is_caught() {
        let idle = |_: &SessionType, _: &SessionType| SynthResult::Ok(Orchestrator::Idle);
        let caught = (0..50).any(|seed| {
            let (c, s) = gen_synth_pair(seed, 4);
            check_synth_case(&c, &s, &idle).is_err()
        });
        assert!(caught);
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}

//! Reduction of runtime processes.
//!
//! States are kept in canonical form. A step rewrites the threads and
//! orchestrators of a canonical configuration and canonicalizes the result.

mod scheduler;

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::compliance::{synth, synth_ud, SynthResult};
use crate::congruence::{canonicalize, render, CanonicalProcess, MalformedRuntime};
use crate::syntax::{
    all_channel_names, fresh_name, subst_channel, subst_value, ChannelRef, Context, FunctionTable, GroundType,
    GroundValue, Label, Orchestrator, Polarity, Process,
};
use crate::typecheck::recv_var_types;

pub use scheduler::{Deterministic, Replay, ReplayStep, Scheduler, SeededRandom};

/// How speculative selections are resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SemanticsMode {
    /// Any label the orchestrator and both parties allow.
    #[default]
    Plain,
    /// Sessions open with a priority orchestrator.
    PriorityType,
    /// The speculating party takes its first allowed label.
    PriorityProcess,
}

impl SemanticsMode {
    pub fn name(self) -> &'static str {
        match self {
            SemanticsMode::Plain => "plain",
            SemanticsMode::PriorityType => "priority-type",
            SemanticsMode::PriorityProcess => "priority-process",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Link,
    LinkPT,
    LinkPP,
    OrchComm,
    OrchDeleg,
    OrchSel,
    OrchSSel,
    OrchSSelPP,
    If,
    OrchClnUp1,
    OrchClnUp2,
    OrchClnUp3,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Link => "Link",
            Rule::LinkPT => "LinkPT",
            Rule::LinkPP => "LinkPP",
            Rule::OrchComm => "OrchComm",
            Rule::OrchDeleg => "OrchDeleg",
            Rule::OrchSel => "OrchSel",
            Rule::OrchSSel => "OrchSSel",
            Rule::OrchSSelPP => "OrchSSelPP",
            Rule::If => "If",
            Rule::OrchClnUp1 => "OrchClnUp1",
            Rule::OrchClnUp2 => "OrchClnUp2",
            Rule::OrchClnUp3 => "OrchClnUp3",
        }
    }

    pub fn is_cleanup(self) -> bool {
        matches!(self, Rule::OrchClnUp1 | Rule::OrchClnUp2 | Rule::OrchClnUp3)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Link { req: usize, acc: usize, orch: Orchestrator },
    Comm { session: usize, from: usize, to: usize, value: GroundValue },
    Deleg { session: usize, from: usize, to: usize },
    Sel { session: usize, from: usize, to: usize },
    SSel { session: usize, from: usize, to: usize },
    If { thread: usize, branch: bool },
    Cleanup { session: usize, thread: usize },
}

/// An enabled reduction of a canonical state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub rule: Rule,
    /// Session acted on, or the two ports `a/b` for `Link`.
    pub channel: Option<String>,
    /// Label chosen by a selection, `then`/`else` for `If`.
    pub label: Option<Label>,
    pub action: Action,
    choice: usize,
}

impl Redex {
    /// Threads taking part, used to order redexes.
    pub fn threads(&self) -> Vec<usize> {
        match &self.action {
            Action::Link { req, acc, .. } => vec![*req, *acc],
            Action::Comm { from, to, .. }
            | Action::Deleg { from, to, .. }
            | Action::Sel { from, to, .. }
            | Action::SSel { from, to, .. } => vec![*from, *to],
            Action::If { thread, .. } | Action::Cleanup { thread, .. } => vec![*thread],
        }
    }

    /// Structural order: proper redexes before clean-up, then by the
    /// threads involved, then by the choice made.
    pub fn order_key(&self) -> (bool, Vec<usize>, usize) {
        (self.rule.is_cleanup(), self.threads(), self.choice)
    }
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if let Some(c) = &self.channel {
            write!(f, " {c}")?;
        }
        if let Some(l) = &self.label {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("redex `{0}` is not enabled in this state")]
pub struct StaleRedex(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorClass {
    NotAnError,
    OrchSynchError(String),
    VacuousOrchError(String),
    ComplianceDependentDeadlock(String),
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorClass::NotAnError => f.write_str("NotAnError"),
            ErrorClass::OrchSynchError(k) => write!(f, "OrchSynchError({k})"),
            ErrorClass::VacuousOrchError(k) => write!(f, "VacuousOrchError({k})"),
            ErrorClass::ComplianceDependentDeadlock(k) => write!(f, "ComplianceDependentDeadlock({k})"),
        }
    }
}

/// The reduction relation for a mode, clean-up setting and function table.
#[derive(Clone, Debug)]
pub struct Semantics {
    pub mode: SemanticsMode,
    pub cleanup: bool,
    pub table: FunctionTable,
}

fn thread_subject(t: &Process) -> Option<&ChannelRef> {
    t.subject().filter(|c| c.pol.is_some())
}

fn then_else(b: bool) -> Label {
    Label::from_static(if b { "then" } else { "else" })
}

impl Semantics {
    pub fn new(mode: SemanticsMode, cleanup: bool) -> Self {
        Semantics {
            mode,
            cleanup,
            table: FunctionTable::default(),
        }
    }

    pub fn with_table(mut self, table: FunctionTable) -> Self {
        self.table = table;
        self
    }

    pub fn redexes(&self, r: &CanonicalProcess) -> Vec<Redex> {
        let mut out = Vec::new();
        self.link_redexes(r, &mut out);
        for (i, t) in r.threads.iter().enumerate() {
            if let Process::If { cond, .. } = t {
                let branches = match self.table.eval(cond) {
                    Ok(GroundValue::Bool(b)) => vec![b],
                    Ok(GroundValue::Sym { ty, .. }) if ty == GroundType::bool() => vec![true, false],
                    _ => vec![],
                };
                for b in branches {
                    out.push(Redex {
                        rule: Rule::If,
                        channel: None,
                        label: Some(then_else(b)),
                        action: Action::If { thread: i, branch: b },
                        choice: usize::from(!b),
                    });
                }
            }
        }
        for s in 0..r.sessions.len() {
            self.session_redexes(r, s, &mut out);
        }
        out.sort_by_key(|x| x.order_key());
        out
    }

    fn link_redexes(&self, r: &CanonicalProcess, out: &mut Vec<Redex>) {
        for (i, t) in r.threads.iter().enumerate() {
            let Process::Request { port, ty: client, .. } = t else { continue };
            for (j, u) in r.threads.iter().enumerate() {
                let Process::Accept { port: p2, ty: server, .. } = u else { continue };
                let (rule, res) = match self.mode {
                    SemanticsMode::Plain => (Rule::Link, synth_ud(client, server)),
                    SemanticsMode::PriorityType => (Rule::LinkPT, synth(client, server)),
                    SemanticsMode::PriorityProcess => (Rule::LinkPP, synth_ud(client, server)),
                };
                if let SynthResult::Ok(orch) = res {
                    out.push(Redex {
                        rule,
                        channel: Some(format!("{port}/{p2}")),
                        label: None,
                        action: Action::Link { req: i, acc: j, orch },
                        choice: 0,
                    });
                }
            }
        }
    }

    fn session_redexes(&self, r: &CanonicalProcess, s: usize, out: &mut Vec<Redex>) {
        let (name, f) = &r.sessions[s];
        let on_k: Vec<(usize, &Process, Polarity)> = r
            .threads
            .iter()
            .enumerate()
            .filter_map(|(i, t)| {
                let c = thread_subject(t)?;
                (c.name == *name).then(|| (i, t, c.pol.unwrap()))
            })
            .collect();
        let chan = Some(name.clone());
        for &(i, ti, pi) in &on_k {
            for &(j, tj, pj) in &on_k {
                if i == j || pi != pj.dual() {
                    continue;
                }
                match (f, ti, tj) {
                    (Orchestrator::Io(_), Process::Send { expr, .. }, Process::Recv { .. }) => {
                        if let Ok(value) = self.table.eval(expr) {
                            out.push(Redex {
                                rule: Rule::OrchComm,
                                channel: chan.clone(),
                                label: None,
                                action: Action::Comm { session: s, from: i, to: j, value },
                                choice: 0,
                            });
                        }
                    }
                    (Orchestrator::Io(_), Process::Throw { .. }, Process::Catch { .. }) => out.push(Redex {
                        rule: Rule::OrchDeleg,
                        channel: chan.clone(),
                        label: None,
                        action: Action::Deleg { session: s, from: i, to: j },
                        choice: 0,
                    }),
                    (_, Process::Select { label, .. }, Process::Branch { arms, .. }) => {
                        let allowed = f.as_external().is_some_and(|h| h.iter().any(|(l, _)| *l == label));
                        if allowed && arms.contains(label) {
                            out.push(Redex {
                                rule: Rule::OrchSel,
                                channel: chan.clone(),
                                label: Some(label.clone()),
                                action: Action::Sel { session: s, from: i, to: j },
                                choice: 0,
                            });
                        }
                    }
                    (_, Process::Spec { arms: spec, .. }, Process::Branch { arms: offers, .. }) => {
                        let Some(h) = f.as_internal() else { continue };
                        let ok = |l: &Label| h.iter().any(|(m, _)| *m == l) && offers.contains(l);
                        if self.mode == SemanticsMode::PriorityProcess {
                            if let Some((pos, (l, _))) = spec.iter().enumerate().find(|(_, (l, _))| ok(l)) {
                                out.push(Redex {
                                    rule: Rule::OrchSSelPP,
                                    channel: chan.clone(),
                                    label: Some(l.clone()),
                                    action: Action::SSel { session: s, from: i, to: j },
                                    choice: pos,
                                });
                            }
                        } else {
                            for (pos, (l, _)) in h.iter().enumerate() {
                                if spec.contains(l) && offers.contains(l) {
                                    out.push(Redex {
                                        rule: Rule::OrchSSel,
                                        channel: chan.clone(),
                                        label: Some((*l).clone()),
                                        action: Action::SSel { session: s, from: i, to: j },
                                        choice: pos,
                                    });
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        if !(self.cleanup && f.is_idle()) {
            return;
        }
        for &(i, t, p) in &on_k {
            if p != Polarity::Plus {
                continue;
            }
            let push = |rule: Rule, label: Option<Label>, choice: usize, out: &mut Vec<Redex>| {
                out.push(Redex {
                    rule,
                    channel: chan.clone(),
                    label,
                    action: Action::Cleanup { session: s, thread: i },
                    choice,
                })
            };
            match t {
                Process::Send { .. } | Process::Recv { .. } | Process::Select { .. } => {
                    push(Rule::OrchClnUp1, None, 0, out)
                }
                Process::Branch { arms, .. } => {
                    for (pos, (l, _)) in arms.iter().enumerate() {
                        push(Rule::OrchClnUp2, Some(l.clone()), pos, out);
                    }
                }
                Process::Spec { arms, .. } => {
                    for (pos, (l, _)) in arms.iter().enumerate() {
                        push(Rule::OrchClnUp3, Some(l.clone()), pos, out);
                    }
                }
                _ => {}
            }
        }
    }

    pub fn apply(&self, r: &CanonicalProcess, redex: &Redex) -> Result<CanonicalProcess, StaleRedex> {
        if !self.redexes(r).contains(redex) {
            return Err(StaleRedex(redex.to_string()));
        }
        let mut sessions = r.sessions.clone();
        let mut threads = r.threads.clone();
        let label = redex.label.as_ref();
        let arm_of = |p: &Process| -> Process {
            match p {
                Process::Branch { arms, .. } | Process::Spec { arms, .. } => {
                    arms.get(label.expect("labelled redex")).expect("enabled label").clone()
                }
                _ => unreachable!("checked by enumeration"),
            }
        };
        match &redex.action {
            Action::Link { req, acc, orch } => {
                let avoid = all_channel_names(&r.to_process());
                let k = fresh_name("k", &avoid);
                let open = |t: &Process, pol: Polarity| match t {
                    Process::Request { chan, body, .. } | Process::Accept { chan, body, .. } => {
                        subst_channel(body, chan, &ChannelRef::polarized(k.clone(), pol))
                    }
                    _ => unreachable!(),
                };
                threads[*req] = open(&r.threads[*req], Polarity::Minus);
                threads[*acc] = open(&r.threads[*acc], Polarity::Plus);
                sessions.push((k.clone(), orch.clone()));
            }
            Action::Comm { session, from, to, value } => {
                let Orchestrator::Io(g) = &r.sessions[*session].1 else { unreachable!() };
                sessions[*session].1 = (**g).clone();
                let (Process::Send { cont, .. }, Process::Recv { var, cont: rc, .. }) = (&r.threads[*from], &r.threads[*to])
                else {
                    unreachable!()
                };
                threads[*from] = (**cont).clone();
                threads[*to] = subst_value(rc, var, value);
            }
            Action::Deleg { session, from, to } => {
                let Orchestrator::Io(g) = &r.sessions[*session].1 else { unreachable!() };
                sessions[*session].1 = (**g).clone();
                let (Process::Throw { sent, cont, .. }, Process::Catch { bound, cont: cc, .. }) =
                    (&r.threads[*from], &r.threads[*to])
                else {
                    unreachable!()
                };
                threads[*from] = (**cont).clone();
                threads[*to] = subst_channel(cc, bound, sent);
            }
            Action::Sel { session, from, to } | Action::SSel { session, from, to } => {
                let l = label.expect("labelled redex");
                let f = &r.sessions[*session].1;
                let next = f
                    .as_external()
                    .into_iter()
                    .chain(f.as_internal())
                    .flatten()
                    .find(|(m, _)| *m == l)
                    .map(|(_, g)| g.clone())
                    .expect("enabled label");
                sessions[*session].1 = next;
                threads[*from] = match &r.threads[*from] {
                    Process::Select { cont, .. } => (**cont).clone(),
                    p => arm_of(p),
                };
                threads[*to] = arm_of(&r.threads[*to]);
            }
            Action::If { thread, branch } => {
                let Process::If { then, els, .. } = &r.threads[*thread] else { unreachable!() };
                threads[*thread] = if *branch { (**then).clone() } else { (**els).clone() };
            }
            Action::Cleanup { thread, .. } => {
                threads[*thread] = match &r.threads[*thread] {
                    Process::Send { cont, .. } | Process::Select { cont, .. } => (**cont).clone(),
                    Process::Recv { var, cont, .. } => {
                        let g = self.recv_type(r, *thread);
                        subst_value(cont, var, &GroundValue::default_for(&g))
                    }
                    p => arm_of(p),
                };
            }
        }
        Ok(canonicalize(&render(&sessions, &threads)).expect("reducts stay well formed"))
    }

    /// Ground type inferred for the variable of the input heading `thread`;
    /// `Nat` when the state cannot be typed.
    fn recv_type(&self, r: &CanonicalProcess, thread: usize) -> GroundType {
        let path = thread_path(r.sessions.len(), r.threads.len(), thread);
        recv_var_types(&self.table, &Context::new(), &r.to_process())
            .ok()
            .and_then(|m| m.get(&path).cloned())
            .unwrap_or_else(GroundType::nat)
    }

    /// Error classes of a state; `[NotAnError]` if none applies.
    pub fn classify(&self, r: &CanonicalProcess) -> Vec<ErrorClass> {
        let mut out = Vec::new();
        let stuck = self.redexes(r).is_empty();
        for (s, (name, f)) in r.sessions.iter().enumerate() {
            let on_k: Vec<(usize, Polarity)> = r
                .threads
                .iter()
                .enumerate()
                .filter_map(|(i, t)| thread_subject(t).filter(|c| c.name == *name).map(|c| (i, c.pol.unwrap())))
                .collect();
            let synch = on_k.iter().enumerate().any(|(a, (i, _))| {
                on_k[a + 1..].iter().any(|(j, _)| {
                    let sub = CanonicalProcess {
                        sessions: vec![r.sessions[s].clone()],
                        threads: vec![r.threads[*i].clone(), r.threads[*j].clone()],
                    };
                    self.redexes(&sub).is_empty()
                })
            });
            if synch {
                out.push(ErrorClass::OrchSynchError(name.clone()));
            }
            if f.is_idle() && on_k.iter().any(|(_, p)| *p == Polarity::Minus) {
                out.push(ErrorClass::VacuousOrchError(name.clone()));
            }
            if stuck && f.is_idle() && on_k.iter().any(|(_, p)| *p == Polarity::Plus) {
                out.push(ErrorClass::ComplianceDependentDeadlock(name.clone()));
            }
        }
        if out.is_empty() {
            out.push(ErrorClass::NotAnError);
        }
        out
    }

    /// Runs `p` to termination, until the scheduler halts, or for at most
    /// `step_limit` steps. Proper redexes are offered to the scheduler
    /// before clean-up ones.
    pub fn run(
        &self,
        p: &Process,
        scheduler: &mut dyn Scheduler,
        step_limit: usize,
    ) -> Result<Trace, MalformedRuntime> {
        let initial = canonicalize(p)?;
        let mut state = initial.clone();
        let mut steps = Vec::new();
        let outcome = loop {
            let all = self.redexes(&state);
            let proper: Vec<Redex> = all.iter().filter(|x| !x.rule.is_cleanup()).cloned().collect();
            let candidates = if proper.is_empty() { all } else { proper };
            if candidates.is_empty() {
                break Outcome::Terminated;
            }
            if steps.len() >= step_limit {
                break Outcome::StepLimitExceeded;
            }
            let Some(i) = scheduler.choose(&candidates) else {
                break Outcome::Halted;
            };
            let redex = candidates[i].clone();
            state = self.apply(&state, &redex).expect("scheduler picks enabled redexes");
            steps.push(TraceStep {
                rule: redex.rule,
                channel: redex.channel,
                label: redex.label,
                state: state.clone(),
            });
        };
        let errors = self.classify(&state);
        Ok(Trace {
            mode: self.mode,
            cleanup: self.cleanup,
            seed: scheduler.seed(),
            initial,
            steps,
            final_state: state,
            outcome,
            errors,
        })
    }
}

/// Path of thread `i` in [`CanonicalProcess::to_process`].
fn thread_path(sessions: usize, threads: usize, i: usize) -> Vec<usize> {
    let mut path = Vec::new();
    for _ in 0..sessions {
        path.extend([0, 1]);
    }
    path.extend(std::iter::repeat(1).take(i));
    if i + 1 < threads {
        path.push(0);
    }
    path
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// No redex is left.
    Terminated,
    /// The scheduler declined to continue.
    Halted,
    StepLimitExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub channel: Option<String>,
    pub label: Option<Label>,
    pub state: CanonicalProcess,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub mode: SemanticsMode,
    pub cleanup: bool,
    pub seed: Option<u64>,
    pub initial: CanonicalProcess,
    pub steps: Vec<TraceStep>,
    pub final_state: CanonicalProcess,
    pub outcome: Outcome,
    pub errors: Vec<ErrorClass>,
}

impl Trace {
    pub fn rules(&self) -> Vec<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }
}

/// Hex SHA-256 of the rendered state.
pub fn state_hash(r: &CanonicalProcess) -> String {
    hex::encode(Sha256::digest(r.to_string().as_bytes()))
}

pub fn enumerate_redexes(r: &CanonicalProcess, mode: SemanticsMode, cleanup: bool) -> Vec<Redex> {
    Semantics::new(mode, cleanup).redexes(r)
}

pub fn apply(r: &CanonicalProcess, redex: &Redex, mode: SemanticsMode, cleanup: bool) -> Result<CanonicalProcess, StaleRedex> {
    Semantics::new(mode, cleanup).apply(r, redex)
}

pub fn classify_errors(r: &CanonicalProcess, cleanup: bool) -> Vec<ErrorClass> {
    Semantics::new(SemanticsMode::Plain, cleanup).classify(r)
}

pub fn run(
    p: &Process,
    mode: SemanticsMode,
    cleanup: bool,
    scheduler: &mut dyn Scheduler,
    step_limit: usize,
) -> Result<Trace, MalformedRuntime> {
    Semantics::new(mode, cleanup).run(p, scheduler, step_limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_process;

    fn state(src: &str) -> CanonicalProcess {
        canonicalize(&parse_process(src).unwrap()).unwrap()
    }

    fn rules(r: &CanonicalProcess, mode: SemanticsMode, cleanup: bool) -> Vec<String> {
        enumerate_redexes(r, mode, cleanup).iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn link_opens_a_session() {
        let r = state("request a:(!Nat)(k).k!<1> | accept a:(?Nat)(k).k?(x)");
        let red = enumerate_redexes(&r, SemanticsMode::Plain, true);
        assert_eq!(red.len(), 1);
        let next = apply(&r, &red[0], SemanticsMode::Plain, true).unwrap();
        assert_eq!(next, state("(new s)(orch s {*} | s^-!<1> | s^+?(y))"));
    }

    #[test]
    fn incompatible_requests_do_not_link() {
        let r = state("request a:(!Nat)(k).k!<1> | accept a:(?Bool)(k).k?(x)");
        assert!(enumerate_redexes(&r, SemanticsMode::Plain, true).is_empty());
    }

    #[test]
    fn speculative_selection_by_mode() {
        let r = state("(new k)(orch k {a (+) b} | k^- spec{b: 0, a: 0} | k^+|>{a: 0, b: 0})");
        assert_eq!(rules(&r, SemanticsMode::Plain, false), ["OrchSSel c0 a", "OrchSSel c0 b"]);
        assert_eq!(rules(&r, SemanticsMode::PriorityProcess, false), ["OrchSSelPP c0 b"]);
    }

    #[test]
    fn cleanup_only_with_idle_orchestrator_and_flag() {
        let src = "(new k)(orch k {1} | k^+!<1>.k^+|>{a: 0, b: 0})";
        let r = state(src);
        assert!(rules(&r, SemanticsMode::Plain, false).is_empty());
        let s = Semantics::new(SemanticsMode::Plain, true);
        let red = s.redexes(&r);
        assert_eq!(red[0].rule, Rule::OrchClnUp1);
        let next = s.apply(&r, &red[0]).unwrap();
        assert_eq!(rules(&next, SemanticsMode::Plain, true), ["OrchClnUp2 c0 a", "OrchClnUp2 c0 b"]);
    }

    #[test]
    fn cleanup_receives_a_typed_default() {
        let r = state("(new k)(orch k {1} | k^+?(x).(new j)(orch j {*} | j^-!<x> | j^+?(y).if y then 0 else 0))");
        let s = Semantics::new(SemanticsMode::Plain, true);
        let red = s.redexes(&r);
        let next = s.apply(&r, &red[0]).unwrap();
        assert!(next.to_string().contains("!<false>"), "{next}");
    }

    #[test]
    fn stale_redex_rejected() {
        let r = state("request a:(!Nat)(k).k!<1> | accept a:(?Nat)(k).k?(x)");
        let red = enumerate_redexes(&r, SemanticsMode::Plain, true).remove(0);
        let next = apply(&r, &red, SemanticsMode::Plain, true).unwrap();
        assert!(apply(&next, &red, SemanticsMode::Plain, true).is_err());
    }

    #[test]
    fn error_classification() {
        let cases = [
            ("(new k)(orch k {*} | k^+!<1> | k^-!<2>)", true, "OrchSynchError"),
            ("(new k)(orch k {l + m} | k^+<|l | k^+|>{l: 0})", true, "OrchSynchError"),
            ("(new k)(orch k {l + m} | k^+!<1> | k^-?(x))", true, "OrchSynchError"),
            ("(new k)(orch k {1} | k^-!<1> | 0)", true, "VacuousOrchError"),
            ("(new k)(orch k {1} | k^+?(x))", false, "ComplianceDependentDeadlock"),
            ("(new k)(orch k {1} | k^+?(x))", true, "NotAnError"),
        ];
        for (src, cleanup, want) in cases {
            let got = classify_errors(&state(src), cleanup);
            assert!(got.iter().any(|e| e.to_string().starts_with(want)), "{src}: {got:?}");
        }
    }

    #[test]
    fn symbolic_conditions_branch_both_ways() {
        let r = state("if available(\"x\") then 0 else k^+!<1>");
        assert_eq!(rules(&r, SemanticsMode::Plain, true), ["If then", "If else"]);
    }

    #[test]
    fn thread_paths_match_rendering() {
        let r = state("(new k)(orch k {*} | k^-!<1> | k^+?(x) | j^+?(z))");
        let p = r.to_process();
        for i in 0..r.threads.len() {
            let mut node = &p;
            for step in thread_path(1, 3, i) {
                node = match node {
                    Process::Par(a, b) => if step == 0 { a } else { b },
                    Process::Restrict { body, .. } => body,
                    _ => panic!(),
                };
            }
            assert_eq!(node, &r.threads[i]);
        }
    }
}

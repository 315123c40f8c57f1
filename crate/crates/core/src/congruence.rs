//! Structural congruence through canonical forms.
//!
//! A runtime process is flattened into a configuration: every orchestrated
//! restriction is extruded to the top, and what remains is a multiset of
//! threads. Bound names are then chosen deterministically (`c0, c1, ...` for
//! sessions, `b0, ...` and `v0, ...` for binders inside a thread) and the
//! threads sorted, so congruent processes render identically.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    all_channel_names, free_channels, free_vars, fresh_name, rename_channel, Arms, ChannelRef, Expression,
    Orchestrator, Process,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MalformedRuntime {
    #[error("restriction of `{0}` has no orchestrator")]
    MissingOrchestrator(String),
    #[error("restriction of `{0}` has more than one orchestrator")]
    DuplicateOrchestrator(String),
}

/// A process in canonical form: restricted sessions with their
/// orchestrators, and the parallel threads under them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalProcess {
    pub sessions: Vec<(String, Orchestrator)>,
    pub threads: Vec<Process>,
}

impl CanonicalProcess {
    /// The process `(new c0)(orch c0 {f0} | (new c1)(... | T1 | (T2 | ...)))`.
    pub fn to_process(&self) -> Process {
        render(&self.sessions, &self.threads)
    }

    pub fn session(&self, name: &str) -> Option<&Orchestrator> {
        self.sessions.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

impl fmt::Display for CanonicalProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_process())
    }
}

pub fn render(sessions: &[(String, Orchestrator)], threads: &[Process]) -> Process {
    let mut body = threads.split_last().map(|(last, init)| {
        init.iter()
            .rev()
            .fold(last.clone(), |acc, t| Process::par(t.clone(), acc))
    });
    for (name, f) in sessions.iter().rev() {
        let orch = Process::orch(name, f.clone());
        body = Some(Process::restrict(name, match body {
            Some(b) => Process::par(orch, b),
            None => orch,
        }));
    }
    body.unwrap_or(Process::Inact)
}

/// Configuration with all orchestrated restrictions at the top. Restricted
/// names are made distinct from each other and from every other name in `p`.
pub fn flatten(p: &Process) -> Result<CanonicalProcess, MalformedRuntime> {
    let mut avoid = all_channel_names(p);
    let mut out = CanonicalProcess {
        sessions: Vec::new(),
        threads: Vec::new(),
    };
    flatten_into(p, &mut avoid, &mut out)?;
    Ok(out)
}

fn flatten_into(p: &Process, avoid: &mut BTreeSet<String>, out: &mut CanonicalProcess) -> Result<(), MalformedRuntime> {
    match p {
        Process::Par(a, b) => {
            flatten_into(a, avoid, out)?;
            flatten_into(b, avoid, out)
        }
        Process::Restrict { chan, body } => {
            let comps = body.par_components();
            let orchs: Vec<&Orchestrator> = comps
                .iter()
                .filter_map(|q| match q {
                    Process::Orch { chan: c, orch } if c == chan => Some(orch),
                    _ => None,
                })
                .collect();
            match orchs.len() {
                0 => return Err(MalformedRuntime::MissingOrchestrator(chan.clone())),
                1 => {}
                _ => return Err(MalformedRuntime::DuplicateOrchestrator(chan.clone())),
            }
            let name = fresh_name(chan, avoid);
            avoid.insert(name.clone());
            out.sessions.push((name.clone(), orchs[0].clone()));
            for q in comps {
                if matches!(q, Process::Orch { chan: c, .. } if c == chan) {
                    continue;
                }
                flatten_into(&rename_channel(q, chan, &name), avoid, out)?;
            }
            Ok(())
        }
        _ => {
            out.threads.push(p.clone());
            Ok(())
        }
    }
}

struct Prefixes {
    session: String,
    binder: String,
    var: String,
}

fn prefix_avoiding(base: &str, taken: &BTreeSet<String>) -> String {
    let mut pre = base.to_string();
    while taken.iter().any(|n| {
        n.strip_prefix(pre.as_str())
            .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
    }) {
        pre.push('_');
    }
    pre
}

const PERMUTATION_CAP: usize = 720;

pub fn canonicalize(p: &Process) -> Result<CanonicalProcess, MalformedRuntime> {
    let flat = flatten(p)?;
    let session_names: BTreeSet<String> = flat.sessions.iter().map(|(n, _)| n.clone()).collect();
    let free: BTreeSet<String> = free_channels(p).into_iter().filter(|n| !session_names.contains(n)).collect();
    let mut fv = BTreeSet::new();
    for t in &flat.threads {
        fv.extend(free_vars(t));
    }
    let pre = Prefixes {
        session: prefix_avoiding("c", &free),
        binder: prefix_avoiding("b", &free),
        var: prefix_avoiding("v", &fv),
    };

    // Sort threads by their shape with each session name replaced by its
    // orchestrator, then break remaining ties by trying permutations.
    let keyed: Vec<(String, Process)> = flat
        .threads
        .iter()
        .map(|t| {
            let map: Vec<(String, String)> = flat
                .sessions
                .iter()
                .map(|(n, f)| (n.clone(), format!("<{f}>")))
                .collect();
            (canon_thread(t, &map, &pre).to_string(), t.clone())
        })
        .collect();
    let mut keyed = keyed;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut groups: Vec<Vec<Process>> = Vec::new();
    let mut last: Option<&str> = None;
    for (k, t) in &keyed {
        if last == Some(k.as_str()) {
            groups.last_mut().unwrap().push(t.clone());
        } else {
            groups.push(vec![t.clone()]);
        }
        last = Some(k);
    }
    let total: usize = groups
        .iter()
        .map(|g| (1..=g.len()).product::<usize>())
        .try_fold(1usize, |acc, n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);

    let orders: Vec<Vec<Process>> = if total <= PERMUTATION_CAP && !flat.sessions.is_empty() {
        group_orders(&groups)
    } else {
        vec![groups.concat()]
    };
    let mut best: Option<(String, CanonicalProcess)> = None;
    for order in orders {
        let c = name_sessions(&flat.sessions, &order, &pre);
        let s = c.to_string();
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, c));
        }
    }
    Ok(best.expect("at least one order").1)
}

fn group_orders(groups: &[Vec<Process>]) -> Vec<Vec<Process>> {
    let mut out = vec![Vec::new()];
    for g in groups {
        let perms = permutations(g);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for prefix in &out {
            for p in &perms {
                let mut v: Vec<Process> = prefix.clone();
                v.extend(p.iter().cloned());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn permutations(items: &[Process]) -> Vec<Vec<Process>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// Names sessions by first occurrence in `threads`; sessions that no thread
/// mentions come last, ordered by orchestrator.
fn name_sessions(sessions: &[(String, Orchestrator)], threads: &[Process], pre: &Prefixes) -> CanonicalProcess {
    let mut order: Vec<usize> = Vec::new();
    for t in threads {
        for n in occurrences(t) {
            if let Some(i) = sessions.iter().position(|(s, _)| *s == n) {
                if !order.contains(&i) {
                    order.push(i);
                }
            }
        }
    }
    let mut unused: Vec<usize> = (0..sessions.len()).filter(|i| !order.contains(i)).collect();
    unused.sort_by_key(|i| sessions[*i].1.to_string());
    order.extend(unused);
    let map: Vec<(String, String)> = order
        .iter()
        .enumerate()
        .map(|(j, i)| (sessions[*i].0.clone(), format!("{}{j}", pre.session)))
        .collect();
    let mut rendered: Vec<(String, Process)> = threads
        .iter()
        .map(|t| canon_thread(t, &map, pre))
        .map(|t| (t.to_string(), t))
        .collect();
    rendered.sort_by(|a, b| a.0.cmp(&b.0));
    CanonicalProcess {
        sessions: order
            .iter()
            .zip(&map)
            .map(|(i, (_, new))| (new.clone(), sessions[*i].1.clone()))
            .collect(),
        threads: rendered.into_iter().map(|(_, t)| t).collect(),
    }
}

/// Channel names in `p` in pre-order.
fn occurrences(p: &Process) -> Vec<String> {
    let mut out = Vec::new();
    fn go(p: &Process, out: &mut Vec<String>) {
        let mut push = |c: &str| out.push(c.to_string());
        match p {
            Process::Inact => {}
            Process::Par(a, b) => {
                go(a, out);
                go(b, out);
            }
            Process::Request { body, .. } | Process::Accept { body, .. } | Process::Restrict { body, .. } => {
                go(body, out)
            }
            Process::Send { chan, cont, .. } | Process::Recv { chan, cont, .. } | Process::Select { chan, cont, .. } => {
                push(&chan.name);
                go(cont, out);
            }
            Process::Catch { chan, cont, .. } => {
                push(&chan.name);
                go(cont, out);
            }
            Process::Throw { chan, sent, cont } => {
                push(&chan.name);
                push(&sent.name);
                go(cont, out);
            }
            Process::Branch { chan, arms } | Process::Spec { chan, arms, .. } => {
                push(&chan.name);
                arms.iter().for_each(|(_, q)| go(q, out));
            }
            Process::If { then, els, .. } => {
                go(then, out);
                go(els, out);
            }
            Process::Orch { chan, .. } => push(chan),
        }
    }
    go(p, &mut out);
    out
}

struct Canon<'a> {
    chans: Vec<(String, String)>,
    vars: Vec<(String, String)>,
    binders: usize,
    nvars: usize,
    pre: &'a Prefixes,
}

/// Renames sessions through `map` and every binder of `t` canonically.
fn canon_thread(t: &Process, map: &[(String, String)], pre: &Prefixes) -> Process {
    let mut c = Canon {
        chans: map.to_vec(),
        vars: Vec::new(),
        binders: 0,
        nvars: 0,
        pre,
    };
    c.go(t)
}

impl Canon<'_> {
    fn chan(&self, r: &ChannelRef) -> ChannelRef {
        ChannelRef {
            name: self.name(&r.name),
            pol: r.pol,
        }
    }

    fn name(&self, n: &str) -> String {
        self.chans
            .iter()
            .rev()
            .find(|(a, _)| a == n)
            .map(|(_, b)| b.clone())
            .unwrap_or_else(|| n.to_string())
    }

    fn expr(&self, e: &Expression) -> Expression {
        match e {
            Expression::Literal(_) => e.clone(),
            Expression::Var(x) => Expression::Var(
                self.vars
                    .iter()
                    .rev()
                    .find(|(a, _)| a == x)
                    .map(|(_, b)| b.clone())
                    .unwrap_or_else(|| x.clone()),
            ),
            Expression::Apply(f, args) => Expression::Apply(f.clone(), args.iter().map(|a| self.expr(a)).collect()),
        }
    }

    fn bind<T>(&mut self, old: &str, f: impl FnOnce(&mut Self, String) -> T) -> T {
        let new = format!("{}{}", self.pre.binder, self.binders);
        self.binders += 1;
        self.chans.push((old.to_string(), new.clone()));
        let out = f(self, new);
        self.chans.pop();
        out
    }

    fn arms(&mut self, arms: &Arms<Process>) -> Arms<Process> {
        Arms::new(arms.iter().map(|(l, q)| (l.clone(), self.go(q))).collect()).expect("labels unchanged")
    }

    fn go(&mut self, p: &Process) -> Process {
        match p {
            Process::Inact => Process::Inact,
            Process::Par(a, b) => Process::par(self.go(a), self.go(b)),
            Process::Request { port, ty, chan, body } | Process::Accept { port, ty, chan, body } => {
                let req = matches!(p, Process::Request { .. });
                let port = self.name(port);
                self.bind(chan, |s, new| {
                    let body = Box::new(s.go(body));
                    if req {
                        Process::Request { port, ty: ty.clone(), chan: new, body }
                    } else {
                        Process::Accept { port, ty: ty.clone(), chan: new, body }
                    }
                })
            }
            Process::Send { chan, expr, cont } => Process::Send {
                chan: self.chan(chan),
                expr: self.expr(expr),
                cont: Box::new(self.go(cont)),
            },
            Process::Recv { chan, var, cont } => {
                let chan = self.chan(chan);
                let new = format!("{}{}", self.pre.var, self.nvars);
                self.nvars += 1;
                self.vars.push((var.clone(), new.clone()));
                let cont = Box::new(self.go(cont));
                self.vars.pop();
                Process::Recv { chan, var: new, cont }
            }
            Process::Throw { chan, sent, cont } => Process::Throw {
                chan: self.chan(chan),
                sent: self.chan(sent),
                cont: Box::new(self.go(cont)),
            },
            Process::Catch { chan, bound, cont } => {
                let chan = self.chan(chan);
                self.bind(bound, |s, new| Process::Catch {
                    chan,
                    bound: new,
                    cont: Box::new(s.go(cont)),
                })
            }
            Process::Select { chan, label, cont } => Process::Select {
                chan: self.chan(chan),
                label: label.clone(),
                cont: Box::new(self.go(cont)),
            },
            Process::Branch { chan, arms } => Process::Branch {
                chan: self.chan(chan),
                arms: self.arms(arms),
            },
            Process::Spec { chan, arms, prioritized } => Process::Spec {
                chan: self.chan(chan),
                arms: self.arms(arms),
                prioritized: *prioritized,
            },
            Process::If { cond, then, els } => Process::If {
                cond: self.expr(cond),
                then: Box::new(self.go(then)),
                els: Box::new(self.go(els)),
            },
            Process::Orch { chan, orch } => Process::Orch {
                chan: self.name(chan),
                orch: orch.clone(),
            },
            Process::Restrict { chan, body } => self.bind(chan, |s, new| Process::Restrict {
                chan: new,
                body: Box::new(s.go(body)),
            }),
        }
    }
}

/// Whether `p` and `q` have the same canonical form. Malformed processes
/// are congruent only to themselves.
pub fn congruent(p: &Process, q: &Process) -> bool {
    match (canonicalize(p), canonicalize(q)) {
        (Ok(a), Ok(b)) => a == b,
        _ => p == q,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_process;

    fn canon(src: &str) -> String {
        canonicalize(&parse_process(src).unwrap()).unwrap().to_string()
    }

    #[test]
    fn commutativity_and_associativity() {
        assert!(congruent(
            &parse_process("k^+!<1> | (j^-?(x) | 0)").unwrap(),
            &parse_process("(0 | j^-?(y)) | k^+!<1>").unwrap()
        ));
    }

    #[test]
    fn inaction_is_not_an_orchestrator() {
        assert!(!congruent(
            &parse_process("0").unwrap(),
            &parse_process("orch k {1}").unwrap()
        ));
    }

    #[test]
    fn restrictions_are_alpha_renamed_and_extruded() {
        let a = canon("(new k)(orch k {*} | k^-!<1> | (new j)(orch j {1} | k^+?(x)))");
        let b = canon("(new m)(orch m {1} | (new n)(orch n {*} | k^+!<2> | n^+?(y) | n^-!<1>))");
        assert_ne!(a, b);
        let c = canon("(new z)(orch z {1} | 0) | (new k)(orch k {*} | k^+?(x) | k^-!<1>)");
        assert_eq!(c, canon("(new k)(orch k {*} | (new q)(orch q {1} | k^-!<1> | 0) | k^+?(w))"));
    }

    #[test]
    fn symmetric_sessions_get_stable_names() {
        let a = canon("(new a)(orch a {*} | (new b)(orch b {1} | a^+!<1> | b^+!<1>))");
        let b = canon("(new b)(orch b {1} | (new a)(orch a {*} | b^+!<1> | a^+!<1>))");
        assert_eq!(a, b);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let p = parse_process("(new k)(orch k {*.(a + b)} | k^-!<1>.k^-<|a | k^+?(x).k^+|>{a: 0, b: 0}) | 0").unwrap();
        let once = canonicalize(&p).unwrap();
        assert_eq!(canonicalize(&once.to_process()).unwrap(), once);
    }

    #[test]
    fn malformed_restrictions_are_rejected() {
        let p = parse_process("(new k)(k^+!<1>)").unwrap();
        assert_eq!(canonicalize(&p), Err(MalformedRuntime::MissingOrchestrator("k".into())));
        let p = parse_process("(new k)(orch k {1} | orch k {*})").unwrap();
        assert!(matches!(canonicalize(&p), Err(MalformedRuntime::DuplicateOrchestrator(_))));
    }
}

use std::collections::BTreeSet;
use std::fmt;

use super::expr::{Expression, GroundValue};
use super::orch::Orchestrator;
use super::types::{Arms, Label, Polarity, SessionType};

/// A channel occurrence, polarized once the session has been opened.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelRef {
    pub name: String,
    pub pol: Option<Polarity>,
}

impl ChannelRef {
    pub fn plain(name: impl Into<String>) -> Self {
        ChannelRef {
            name: name.into(),
            pol: None,
        }
    }

    pub fn polarized(name: impl Into<String>, pol: Polarity) -> Self {
        ChannelRef {
            name: name.into(),
            pol: Some(pol),
        }
    }
}

impl fmt::Display for ChannelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pol {
            None => f.write_str(&self.name),
            Some(p) => write!(f, "{}^{}", self.name, p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Inact,
    Par(Box<Process>, Box<Process>),
    Request {
        port: String,
        ty: SessionType,
        chan: String,
        body: Box<Process>,
    },
    Accept {
        port: String,
        ty: SessionType,
        chan: String,
        body: Box<Process>,
    },
    Send {
        chan: ChannelRef,
        expr: Expression,
        cont: Box<Process>,
    },
    Recv {
        chan: ChannelRef,
        var: String,
        cont: Box<Process>,
    },
    Throw {
        chan: ChannelRef,
        sent: ChannelRef,
        cont: Box<Process>,
    },
    Catch {
        chan: ChannelRef,
        bound: String,
        cont: Box<Process>,
    },
    Select {
        chan: ChannelRef,
        label: Label,
        cont: Box<Process>,
    },
    Branch {
        chan: ChannelRef,
        arms: Arms<Process>,
    },
    Spec {
        chan: ChannelRef,
        arms: Arms<Process>,
        prioritized: bool,
    },
    If {
        cond: Expression,
        then: Box<Process>,
        els: Box<Process>,
    },
    Orch {
        chan: String,
        orch: Orchestrator,
    },
    Restrict {
        chan: String,
        body: Box<Process>,
    },
}

impl Process {
    pub fn par(a: Process, b: Process) -> Process {
        Process::Par(Box::new(a), Box::new(b))
    }

    /// Left-nested parallel composition of the given components; `Inact` when empty.
    pub fn par_all(mut items: Vec<Process>) -> Process {
        if items.is_empty() {
            return Process::Inact;
        }
        let first = items.remove(0);
        items.into_iter().fold(first, Process::par)
    }

    pub fn request(port: &str, ty: SessionType, chan: &str, body: Process) -> Process {
        Process::Request {
            port: port.into(),
            ty,
            chan: chan.into(),
            body: Box::new(body),
        }
    }

    pub fn accept(port: &str, ty: SessionType, chan: &str, body: Process) -> Process {
        Process::Accept {
            port: port.into(),
            ty,
            chan: chan.into(),
            body: Box::new(body),
        }
    }

    pub fn send(chan: ChannelRef, expr: Expression, cont: Process) -> Process {
        Process::Send {
            chan,
            expr,
            cont: Box::new(cont),
        }
    }

    pub fn recv(chan: ChannelRef, var: &str, cont: Process) -> Process {
        Process::Recv {
            chan,
            var: var.into(),
            cont: Box::new(cont),
        }
    }

    pub fn throw(chan: ChannelRef, sent: ChannelRef, cont: Process) -> Process {
        Process::Throw {
            chan,
            sent,
            cont: Box::new(cont),
        }
    }

    pub fn catch(chan: ChannelRef, bound: &str, cont: Process) -> Process {
        Process::Catch {
            chan,
            bound: bound.into(),
            cont: Box::new(cont),
        }
    }

    pub fn select(chan: ChannelRef, label: Label, cont: Process) -> Process {
        Process::Select {
            chan,
            label,
            cont: Box::new(cont),
        }
    }

    pub fn if_then_else(cond: Expression, then: Process, els: Process) -> Process {
        Process::If {
            cond,
            then: Box::new(then),
            els: Box::new(els),
        }
    }

    pub fn restrict(chan: &str, body: Process) -> Process {
        Process::Restrict {
            chan: chan.into(),
            body: Box::new(body),
        }
    }

    pub fn orch(chan: &str, orch: Orchestrator) -> Process {
        Process::Orch {
            chan: chan.into(),
            orch,
        }
    }

    /// The channel of the first action, when the process is a prefix on a
    /// session channel.
    pub fn subject(&self) -> Option<&ChannelRef> {
        match self {
            Process::Send { chan, .. }
            | Process::Recv { chan, .. }
            | Process::Throw { chan, .. }
            | Process::Catch { chan, .. }
            | Process::Select { chan, .. }
            | Process::Branch { chan, .. }
            | Process::Spec { chan, .. } => Some(chan),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Process::Inact | Process::Orch { .. } => 1,
            Process::Par(a, b) => 1 + a.size() + b.size(),
            Process::Request { body, .. }
            | Process::Accept { body, .. }
            | Process::Restrict { body, .. } => 1 + body.size(),
            Process::Send { cont, .. }
            | Process::Recv { cont, .. }
            | Process::Throw { cont, .. }
            | Process::Catch { cont, .. }
            | Process::Select { cont, .. } => 1 + cont.size(),
            Process::Branch { arms, .. } | Process::Spec { arms, .. } => {
                1 + arms.iter().map(|(_, p)| p.size()).sum::<usize>()
            }
            Process::If { then, els, .. } => 1 + then.size() + els.size(),
        }
    }

    /// Flattens nested `Par` nodes into their components, left to right.
    pub fn par_components(&self) -> Vec<&Process> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Process, out: &mut Vec<&'a Process>) {
            match p {
                Process::Par(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(p),
            }
        }
        go(self, &mut out);
        out
    }
}

/// Channel names occurring free in `p`.
pub fn free_channels(p: &Process) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(p, &mut out);
    out
}

fn collect_free(p: &Process, out: &mut BTreeSet<String>) {
    let bound = |chan: &str, body: &Process, out: &mut BTreeSet<String>| {
        let mut inner = BTreeSet::new();
        collect_free(body, &mut inner);
        inner.remove(chan);
        out.extend(inner);
    };
    match p {
        Process::Inact => {}
        Process::Par(a, b) => {
            collect_free(a, out);
            collect_free(b, out);
        }
        Process::Request { chan, body, .. }
        | Process::Accept { chan, body, .. }
        | Process::Restrict { chan, body } => bound(chan, body, out),
        Process::Send { chan, cont, .. }
        | Process::Recv { chan, cont, .. }
        | Process::Select { chan, cont, .. } => {
            out.insert(chan.name.clone());
            collect_free(cont, out);
        }
        Process::Throw { chan, sent, cont } => {
            out.insert(chan.name.clone());
            out.insert(sent.name.clone());
            collect_free(cont, out);
        }
        Process::Catch { chan, bound: b, cont } => {
            out.insert(chan.name.clone());
            bound(b, cont, out);
        }
        Process::Branch { chan, arms } | Process::Spec { chan, arms, .. } => {
            out.insert(chan.name.clone());
            for (_, q) in arms {
                collect_free(q, out);
            }
        }
        Process::If { then, els, .. } => {
            collect_free(then, out);
            collect_free(els, out);
        }
        Process::Orch { chan, .. } => {
            out.insert(chan.clone());
        }
    }
}

/// All channel names occurring in `p`, free or bound, including binders.
pub fn all_channel_names(p: &Process) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn go(p: &Process, out: &mut BTreeSet<String>) {
        match p {
            Process::Inact => {}
            Process::Par(a, b) => {
                go(a, out);
                go(b, out);
            }
            Process::Request { chan, body, .. }
            | Process::Accept { chan, body, .. }
            | Process::Restrict { chan, body } => {
                out.insert(chan.clone());
                go(body, out);
            }
            Process::Send { chan, cont, .. }
            | Process::Recv { chan, cont, .. }
            | Process::Select { chan, cont, .. } => {
                out.insert(chan.name.clone());
                go(cont, out);
            }
            Process::Throw { chan, sent, cont } => {
                out.insert(chan.name.clone());
                out.insert(sent.name.clone());
                go(cont, out);
            }
            Process::Catch { chan, bound, cont } => {
                out.insert(chan.name.clone());
                out.insert(bound.clone());
                go(cont, out);
            }
            Process::Branch { chan, arms } | Process::Spec { chan, arms, .. } => {
                out.insert(chan.name.clone());
                arms.iter().for_each(|(_, q)| go(q, out));
            }
            Process::If { then, els, .. } => {
                go(then, out);
                go(els, out);
            }
            Process::Orch { chan, .. } => {
                out.insert(chan.clone());
            }
        }
    }
    go(p, &mut out);
    out
}

/// A name based on `base` that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "k" } else { stem };
    (1..)
        .map(|i| format!("{stem}_{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

#[derive(Clone, Copy)]
enum Rewrite<'a> {
    /// Replace unpolarized occurrences of the name by the reference.
    Subst(&'a ChannelRef),
    /// Rename every occurrence, keeping polarities.
    Rename(&'a str),
}

impl Rewrite<'_> {
    fn target_name(&self) -> &str {
        match self {
            Rewrite::Subst(r) => &r.name,
            Rewrite::Rename(n) => n,
        }
    }

    fn apply(&self, from: &str, c: &ChannelRef) -> ChannelRef {
        if c.name != from {
            return c.clone();
        }
        match self {
            Rewrite::Subst(to) if c.pol.is_none() => (*to).clone(),
            Rewrite::Subst(_) => c.clone(),
            Rewrite::Rename(n) => ChannelRef {
                name: n.to_string(),
                pol: c.pol,
            },
        }
    }
}

/// Capture-avoiding substitution of `to` for the unpolarized free
/// occurrences of channel `from`.
pub fn subst_channel(p: &Process, from: &str, to: &ChannelRef) -> Process {
    rewrite(p, from, Rewrite::Subst(to))
}

/// Capture-avoiding renaming of every free occurrence of channel `from`
/// (polarized or not) to `to`.
pub fn rename_channel(p: &Process, from: &str, to: &str) -> Process {
    rewrite(p, from, Rewrite::Rename(to))
}

fn rewrite(p: &Process, from: &str, rw: Rewrite<'_>) -> Process {
    if from == rw.target_name() {
        if let Rewrite::Rename(_) = rw {
            return p.clone();
        }
    }
    let go = |q: &Process| Box::new(rewrite(q, from, rw));
    // Returns the binder name and body after the substitution passes under
    // the binder, renaming it first when it would capture the target.
    let under = |b: &String, body: &Process| -> (String, Box<Process>) {
        if b == from {
            return (b.clone(), Box::new(body.clone()));
        }
        let target = rw.target_name();
        if b == target && free_channels(body).contains(from) {
            let mut avoid = all_channel_names(body);
            avoid.insert(from.to_string());
            avoid.insert(target.to_string());
            let nb = fresh_name(b, &avoid);
            let renamed = rename_channel(body, b, &nb);
            return (nb, Box::new(rewrite(&renamed, from, rw)));
        }
        (b.clone(), Box::new(rewrite(body, from, rw)))
    };
    match p {
        Process::Inact => Process::Inact,
        Process::Par(a, b) => Process::Par(go(a), go(b)),
        Process::Request { port, ty, chan, body } => {
            let (chan, body) = under(chan, body);
            Process::Request { port: port.clone(), ty: ty.clone(), chan, body }
        }
        Process::Accept { port, ty, chan, body } => {
            let (chan, body) = under(chan, body);
            Process::Accept { port: port.clone(), ty: ty.clone(), chan, body }
        }
        Process::Restrict { chan, body } => {
            let (chan, body) = under(chan, body);
            Process::Restrict { chan, body }
        }
        Process::Send { chan, expr, cont } => Process::Send {
            chan: rw.apply(from, chan),
            expr: expr.clone(),
            cont: go(cont),
        },
        Process::Recv { chan, var, cont } => Process::Recv {
            chan: rw.apply(from, chan),
            var: var.clone(),
            cont: go(cont),
        },
        Process::Throw { chan, sent, cont } => Process::Throw {
            chan: rw.apply(from, chan),
            sent: rw.apply(from, sent),
            cont: go(cont),
        },
        Process::Catch { chan, bound, cont } => {
            let chan = rw.apply(from, chan);
            let (bound, cont) = under(bound, cont);
            Process::Catch { chan, bound, cont }
        }
        Process::Select { chan, label, cont } => Process::Select {
            chan: rw.apply(from, chan),
            label: label.clone(),
            cont: go(cont),
        },
        Process::Branch { chan, arms } => Process::Branch {
            chan: rw.apply(from, chan),
            arms: arms.map(|q| rewrite(q, from, rw)),
        },
        Process::Spec { chan, arms, prioritized } => Process::Spec {
            chan: rw.apply(from, chan),
            arms: arms.map(|q| rewrite(q, from, rw)),
            prioritized: *prioritized,
        },
        Process::If { cond, then, els } => Process::If {
            cond: cond.clone(),
            then: go(then),
            els: go(els),
        },
        Process::Orch { chan, orch } => Process::Orch {
            chan: match rw {
                Rewrite::Rename(n) if chan == from => n.to_string(),
                _ => chan.clone(),
            },
            orch: orch.clone(),
        },
    }
}

/// Substitutes the value `v` for the free expression variable `var`.
pub fn subst_value(p: &Process, var: &str, v: &GroundValue) -> Process {
    let go = |q: &Process| Box::new(subst_value(q, var, v));
    match p {
        Process::Inact | Process::Orch { .. } => p.clone(),
        Process::Par(a, b) => Process::Par(go(a), go(b)),
        Process::Request { port, ty, chan, body } => Process::Request {
            port: port.clone(),
            ty: ty.clone(),
            chan: chan.clone(),
            body: go(body),
        },
        Process::Accept { port, ty, chan, body } => Process::Accept {
            port: port.clone(),
            ty: ty.clone(),
            chan: chan.clone(),
            body: go(body),
        },
        Process::Restrict { chan, body } => Process::Restrict {
            chan: chan.clone(),
            body: go(body),
        },
        Process::Send { chan, expr, cont } => Process::Send {
            chan: chan.clone(),
            expr: expr.subst(var, v),
            cont: go(cont),
        },
        Process::Recv { chan, var: x, cont } => Process::Recv {
            chan: chan.clone(),
            var: x.clone(),
            cont: if x == var { cont.clone() } else { go(cont) },
        },
        Process::Throw { chan, sent, cont } => Process::Throw {
            chan: chan.clone(),
            sent: sent.clone(),
            cont: go(cont),
        },
        Process::Catch { chan, bound, cont } => Process::Catch {
            chan: chan.clone(),
            bound: bound.clone(),
            cont: go(cont),
        },
        Process::Select { chan, label, cont } => Process::Select {
            chan: chan.clone(),
            label: label.clone(),
            cont: go(cont),
        },
        Process::Branch { chan, arms } => Process::Branch {
            chan: chan.clone(),
            arms: arms.map(|q| subst_value(q, var, v)),
        },
        Process::Spec { chan, arms, prioritized } => Process::Spec {
            chan: chan.clone(),
            arms: arms.map(|q| subst_value(q, var, v)),
            prioritized: *prioritized,
        },
        Process::If { cond, then, els } => Process::If {
            cond: cond.subst(var, v),
            then: go(then),
            els: go(els),
        },
    }
}

/// True when `p` contains no named orchestrator, no restriction and no
/// polarized channel occurrence.
pub fn is_user_defined(p: &Process) -> bool {
    let plain = |c: &ChannelRef| c.pol.is_none();
    match p {
        Process::Inact => true,
        Process::Orch { .. } | Process::Restrict { .. } => false,
        Process::Par(a, b) => is_user_defined(a) && is_user_defined(b),
        Process::Request { body, .. } | Process::Accept { body, .. } => is_user_defined(body),
        Process::Send { chan, cont, .. }
        | Process::Recv { chan, cont, .. }
        | Process::Catch { chan, cont, .. }
        | Process::Select { chan, cont, .. } => plain(chan) && is_user_defined(cont),
        Process::Throw { chan, sent, cont } => plain(chan) && plain(sent) && is_user_defined(cont),
        Process::Branch { chan, arms } | Process::Spec { chan, arms, .. } => {
            plain(chan) && arms.iter().all(|(_, q)| is_user_defined(q))
        }
        Process::If { then, els, .. } => is_user_defined(then) && is_user_defined(els),
    }
}

/// Free expression variables of `p`.
pub fn free_vars(p: &Process) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn go(p: &Process, out: &mut BTreeSet<String>) {
        let push_expr = |e: &Expression, out: &mut BTreeSet<String>| {
            let mut v = Vec::new();
            e.free_vars(&mut v);
            out.extend(v);
        };
        match p {
            Process::Inact | Process::Orch { .. } => {}
            Process::Par(a, b) => {
                go(a, out);
                go(b, out);
            }
            Process::Request { body, .. }
            | Process::Accept { body, .. }
            | Process::Restrict { body, .. } => go(body, out),
            Process::Send { expr, cont, .. } => {
                push_expr(expr, out);
                go(cont, out);
            }
            Process::Recv { var, cont, .. } => {
                let mut inner = BTreeSet::new();
                go(cont, &mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            Process::Throw { cont, .. } | Process::Catch { cont, .. } | Process::Select { cont, .. } => {
                go(cont, out)
            }
            Process::Branch { arms, .. } | Process::Spec { arms, .. } => {
                arms.iter().for_each(|(_, q)| go(q, out))
            }
            Process::If { cond, then, els } => {
                push_expr(cond, out);
                go(then, out);
                go(els, out);
            }
        }
    }
    go(p, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: Polarity) -> ChannelRef {
        ChannelRef::polarized("k", p)
    }

    #[test]
    fn free_channels_examples() {
        let send = Process::send(k(Polarity::Minus), Expression::nat(1), Process::Inact);
        assert_eq!(free_channels(&send), BTreeSet::from(["k".to_string()]));
        let closed = Process::restrict("k", Process::par(Process::orch("k", Orchestrator::Idle), Process::Inact));
        assert!(free_channels(&closed).is_empty());
        let both = Process::par(
            send,
            Process::recv(ChannelRef::polarized("j", Polarity::Plus), "x", Process::Inact),
        );
        assert_eq!(free_channels(&both), BTreeSet::from(["j".to_string(), "k".to_string()]));
    }

    #[test]
    fn subst_channel_examples() {
        let p = Process::send(ChannelRef::plain("k"), Expression::nat(1), Process::Inact);
        assert_eq!(
            subst_channel(&p, "k", &k(Polarity::Minus)),
            Process::send(k(Polarity::Minus), Expression::nat(1), Process::Inact)
        );
        assert_eq!(subst_channel(&Process::Inact, "k", &k(Polarity::Plus)), Process::Inact);
        let shadow = Process::restrict("k", Process::par(Process::orch("k", Orchestrator::Idle), p));
        assert_eq!(subst_channel(&shadow, "k", &k(Polarity::Plus)), shadow);
    }

    #[test]
    fn subst_channel_avoids_capture() {
        // request a:(end)(j). k!<1>.j!<2>.0 with k := j^-
        let body = Process::send(
            ChannelRef::plain("k"),
            Expression::nat(1),
            Process::send(ChannelRef::plain("j"), Expression::nat(2), Process::Inact),
        );
        let p = Process::request("a", SessionType::End, "j", body);
        let out = subst_channel(&p, "k", &ChannelRef::polarized("j", Polarity::Minus));
        match out {
            Process::Request { chan, body, .. } => {
                assert_ne!(chan, "j");
                assert_eq!(
                    *body,
                    Process::send(
                        ChannelRef::polarized("j", Polarity::Minus),
                        Expression::nat(1),
                        Process::send(ChannelRef::plain(chan.clone()), Expression::nat(2), Process::Inact)
                    )
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn subst_value_examples() {
        let p = Process::send(k(Polarity::Minus), Expression::var("x"), Process::Inact);
        assert_eq!(
            subst_value(&p, "x", &GroundValue::Nat(4)),
            Process::send(k(Polarity::Minus), Expression::nat(4), Process::Inact)
        );
        assert_eq!(subst_value(&Process::Inact, "x", &GroundValue::Bool(true)), Process::Inact);
        let rebound = Process::recv(
            k(Polarity::Minus),
            "x",
            Process::send(k(Polarity::Minus), Expression::var("x"), Process::Inact),
        );
        assert_eq!(subst_value(&rebound, "x", &GroundValue::Nat(4)), rebound);
    }

    #[test]
    fn user_defined_examples() {
        let closed = Process::restrict("k", Process::par(Process::orch("k", Orchestrator::Idle), Process::Inact));
        assert!(!is_user_defined(&closed));
        assert!(!is_user_defined(&Process::send(k(Polarity::Plus), Expression::nat(1), Process::Inact)));
        assert!(is_user_defined(&Process::send(ChannelRef::plain("k"), Expression::nat(1), Process::Inact)));
    }
}

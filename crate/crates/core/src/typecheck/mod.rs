//! Type reconstruction for processes.
//!
//! Session types of channel ends are inferred from their use. Ends bound by
//! `request`/`accept` are checked against the annotation; a restricted
//! channel contributes a compliance constraint between its two ends, solved
//! once the whole process has been traversed. Whatever stays undetermined
//! gets a default (`end`, `Nat`, all offered branch labels).

mod solve;
mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::semantics::SemanticsMode;
use crate::syntax::{
    ChannelRef, Context, Expression, FunctionTable, GroundType, Label, Orchestrator, Polarity, Process, SessionType,
    Typing,
};
use solve::{Compliance, SolveFailure};
use store::{GId, Node, PId, Store, TyId, UnifyError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    ComplianceFailure,
    PolarityClash,
    GroundTypeMismatch,
    LabelMismatch,
    ArityOrShape,
    UnboundChannel,
    UnboundVariable,
    BranchTypingDisagreement,
    IncompleteTyping,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A typing failure. `location` is the path of child indices from the root
/// to the offending subterm (`Par`: 0 left, 1 right; arms by position;
/// `if`: 0 then, 1 else; prefixes and binders: 0 continuation).
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub location: Vec<usize>,
    pub detail: String,
    pub pair: Option<(SessionType, SessionType)>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)?;
        if let Some((a, b)) = &self.pair {
            write!(f, " [client `{a}`, server `{b}`]")?;
        }
        if !self.location.is_empty() {
            let path: Vec<String> = self.location.iter().map(|i| i.to_string()).collect();
            write!(f, " at /{}", path.join("/"))?;
        }
        Ok(())
    }
}

impl TypeError {
    fn new(kind: TypeErrorKind, location: &[usize], detail: impl Into<String>) -> Self {
        TypeError {
            kind,
            location: location.to_vec(),
            detail: detail.into(),
            pair: None,
        }
    }
}

/// Infers the typing of the free channel ends of `p`.
pub fn typecheck(gamma: &Context, p: &Process, mode: SemanticsMode) -> Result<Typing, TypeError> {
    typecheck_with(&FunctionTable::default(), gamma, p, mode)
}

pub fn typecheck_with(
    table: &FunctionTable,
    gamma: &Context,
    p: &Process,
    _mode: SemanticsMode,
) -> Result<Typing, TypeError> {
    infer(table, gamma, p).map(|r| r.typing)
}

/// Ground types of the variables bound by value inputs, keyed by the path of
/// the input prefix.
pub fn recv_var_types(
    table: &FunctionTable,
    gamma: &Context,
    p: &Process,
) -> Result<BTreeMap<Vec<usize>, GroundType>, TypeError> {
    infer(table, gamma, p).map(|r| r.recv_types)
}

/// Checks `p` against a claimed typing: the claim must agree with the
/// inferred one on every end that is not `end`.
pub fn check(gamma: &Context, p: &Process, claimed: &Typing) -> Result<(), TypeError> {
    let inferred = typecheck(gamma, p, SemanticsMode::Plain)?;
    for ((name, pol), t) in inferred.without_ends().iter() {
        match claimed.get(name, *pol) {
            Some(u) if u.equivalent(t) => {}
            Some(u) => {
                return Err(TypeError::new(
                    TypeErrorKind::LabelMismatch,
                    &[],
                    format!("{name}^{pol} is used as `{t}` but claimed as `{u}`"),
                ))
            }
            None => {
                return Err(TypeError::new(
                    TypeErrorKind::IncompleteTyping,
                    &[],
                    format!("{name}^{pol}: `{t}` is missing from the claimed typing"),
                ))
            }
        }
    }
    for ((name, pol), u) in claimed.without_ends().iter() {
        if inferred.get(name, *pol).is_none() {
            return Err(TypeError::new(
                TypeErrorKind::IncompleteTyping,
                &[],
                format!("{name}^{pol} is claimed as `{u}` but the process does not finish it"),
            ));
        }
    }
    Ok(())
}

/// Whether `p` is typable with exactly `claimed`, up to `end` entries.
pub fn admits(gamma: &Context, p: &Process, claimed: &Typing) -> bool {
    check(gamma, p, claimed).is_ok()
}

/// Union of two typings with disjoint domains.
pub fn typing_compose(a: &Typing, b: &Typing) -> Result<Typing, TypeError> {
    a.compose(b).map_err(|clash| {
        let ends: Vec<String> = clash.iter().map(|(n, p)| format!("{n}^{p}")).collect();
        TypeError::new(TypeErrorKind::PolarityClash, &[], format!("ends typed twice: {}", ends.join(", ")))
    })
}

pub fn is_completed(d: &Typing) -> bool {
    d.is_completed()
}

struct Inferred {
    typing: Typing,
    recv_types: BTreeMap<Vec<usize>, GroundType>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum KPol {
    Minus,
    Plus,
    Var(PId),
}

type Key = (usize, KPol);
type Delta = BTreeMap<Key, TyId>;

#[derive(Clone, Copy)]
enum Binding {
    Session(usize, Polarity),
    Caught(usize, PId),
    Restricted(usize),
}

struct Gen<'a> {
    table: &'a FunctionTable,
    store: Store,
    chans: Vec<(String, Binding)>,
    vars: Vec<(String, GId)>,
    free: BTreeMap<String, usize>,
    next_id: usize,
    constraints: Vec<Compliance>,
    roots: Vec<(TyId, TyId)>,
    origins: Vec<Vec<usize>>,
    recvs: Vec<(Vec<usize>, GId)>,
    path: Vec<usize>,
}

fn kpol(p: Polarity) -> KPol {
    match p {
        Polarity::Minus => KPol::Minus,
        Polarity::Plus => KPol::Plus,
    }
}

fn infer(table: &FunctionTable, gamma: &Context, p: &Process) -> Result<Inferred, TypeError> {
    let mut g = Gen {
        table,
        store: Store::default(),
        chans: Vec::new(),
        vars: Vec::new(),
        free: BTreeMap::new(),
        next_id: 0,
        constraints: Vec::new(),
        roots: Vec::new(),
        origins: Vec::new(),
        recvs: Vec::new(),
        path: Vec::new(),
    };
    for (x, t) in gamma.iter() {
        let id = g.store.ground(t.clone());
        g.vars.push((x.clone(), id));
    }
    let delta = g.gen(p)?;
    let constraints = std::mem::take(&mut g.constraints);
    if let Err(SolveFailure { origin, reason, pair }) = solve::solve(&mut g.store, constraints, &g.roots) {
        return Err(TypeError {
            kind: TypeErrorKind::ComplianceFailure,
            location: g.origins[origin].clone(),
            detail: reason,
            pair,
        });
    }
    let names: BTreeMap<usize, &String> = g.free.iter().map(|(n, id)| (*id, n)).collect();
    let mut typing = Typing::new();
    for ((id, pol), t) in &delta {
        let pol = match pol {
            KPol::Minus => Polarity::Minus,
            KPol::Plus => Polarity::Plus,
            KPol::Var(q) => g.store.pol_or_default(*q),
        };
        let ty = g
            .store
            .to_session_type(*t)
            .ok_or_else(|| TypeError::new(TypeErrorKind::ArityOrShape, &[], "cyclic session type"))?;
        let name = names.get(id).expect("only free ends remain");
        if typing.insert(name, pol, ty).is_some() {
            return Err(TypeError::new(
                TypeErrorKind::PolarityClash,
                &[],
                format!("{name}^{pol} is used by two threads"),
            ));
        }
    }
    let recv_types = g
        .recvs
        .iter()
        .map(|(path, gid)| (path.clone(), g.store.ground_or_default(*gid)))
        .collect();
    Ok(Inferred { typing, recv_types })
}

fn unify_kind(e: &UnifyError) -> TypeErrorKind {
    match e {
        UnifyError::Shape => TypeErrorKind::ArityOrShape,
        UnifyError::Ground(..) => TypeErrorKind::GroundTypeMismatch,
        UnifyError::Labels => TypeErrorKind::LabelMismatch,
        UnifyError::Polarity => TypeErrorKind::PolarityClash,
    }
}

impl Gen<'_> {
    fn err(&self, kind: TypeErrorKind, detail: impl Into<String>) -> TypeError {
        TypeError::new(kind, &self.path, detail)
    }

    fn fresh_id(&mut self) -> usize {
        self.next_id += 1;
        self.next_id - 1
    }

    fn child<T>(&mut self, i: usize, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(i);
        let out = f(self);
        self.path.pop();
        out
    }

    fn resolve(&mut self, c: &ChannelRef) -> Result<Key, TypeError> {
        let bound = self.chans.iter().rev().find(|(n, _)| *n == c.name).map(|(_, b)| *b);
        match (bound, c.pol) {
            (Some(Binding::Session(id, p)), None) => Ok((id, kpol(p))),
            (Some(Binding::Session(id, p)), Some(q)) if p == q => Ok((id, kpol(p))),
            (Some(Binding::Session(..)), Some(_)) => Err(self.err(
                TypeErrorKind::PolarityClash,
                format!("`{c}` names the opposite end of a session opened here"),
            )),
            (Some(Binding::Caught(id, q)), pol) => {
                if let Some(p) = pol {
                    let pid = self.store.pol(p);
                    self.store.unify_pol(q, pid).map_err(|_| {
                        self.err(TypeErrorKind::PolarityClash, format!("`{c}` disagrees with the received polarity"))
                    })?;
                }
                Ok((id, KPol::Var(q)))
            }
            (Some(Binding::Restricted(id)), Some(p)) => Ok((id, kpol(p))),
            (Some(Binding::Restricted(_)), None) | (None, None) => Err(self.err(
                TypeErrorKind::UnboundChannel,
                format!("channel `{c}` is used without a polarity and is not bound by request, accept or input"),
            )),
            (None, Some(p)) => {
                let next = self.next_id;
                let id = *self.free.entry(c.name.clone()).or_insert(next);
                if id == next {
                    self.next_id += 1;
                }
                Ok((id, kpol(p)))
            }
        }
    }

    fn take(&mut self, d: &mut Delta, k: &Key) -> TyId {
        match d.remove(k) {
            Some(t) => t,
            None => self.store.end(),
        }
    }

    fn pid_of(&mut self, k: KPol) -> PId {
        match k {
            KPol::Minus => self.store.pol(Polarity::Minus),
            KPol::Plus => self.store.pol(Polarity::Plus),
            KPol::Var(q) => q,
        }
    }

    fn expr(&mut self, e: &Expression) -> Result<GId, TypeError> {
        match e {
            Expression::Literal(v) => Ok(self.store.ground(v.ground_type())),
            Expression::Var(x) => self
                .vars
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, g)| *g)
                .ok_or_else(|| self.err(TypeErrorKind::UnboundVariable, format!("unbound variable `{x}`"))),
            Expression::Apply(f, args) => {
                let ids = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
                if let Some(sig) = self.table.signature(f) {
                    if sig.params.len() != ids.len() {
                        return Err(self.err(
                            TypeErrorKind::ArityOrShape,
                            format!("`{f}` expects {} arguments, found {}", sig.params.len(), ids.len()),
                        ));
                    }
                    let (params, result) = (sig.params.clone(), sig.result.clone());
                    for (id, want) in ids.into_iter().zip(params) {
                        let w = self.store.ground(want);
                        self.store.unify_ground(id, w).map_err(|e| {
                            let detail = match e {
                                UnifyError::Ground(a, b) => format!("argument of `{f}` has type {b}, expected {a}"),
                                _ => format!("bad argument to `{f}`"),
                            };
                            self.err(TypeErrorKind::GroundTypeMismatch, detail)
                        })?;
                    }
                    Ok(self.store.ground(result))
                } else if let Some(g) = self.table.coercion(f) {
                    if ids.len() != 1 {
                        return Err(self.err(TypeErrorKind::ArityOrShape, format!("`{f}` takes one argument")));
                    }
                    Ok(self.store.ground(g))
                } else {
                    Err(self.err(TypeErrorKind::ArityOrShape, format!("unknown function `{f}`")))
                }
            }
        }
    }

    fn disjoint(&self, a: &mut Delta, b: Delta) -> Result<(), TypeError> {
        for (k, t) in b {
            let clash = a.keys().any(|j| self.same_end(j, &k));
            if clash {
                return Err(self.err(
                    TypeErrorKind::PolarityClash,
                    format!("channel end {} is used by two parallel threads", self.end_name(&k)),
                ));
            }
            a.insert(k, t);
        }
        Ok(())
    }

    fn same_end(&self, a: &Key, b: &Key) -> bool {
        if a.0 != b.0 {
            return false;
        }
        let val = |k: KPol| match k {
            KPol::Minus => Some(Polarity::Minus),
            KPol::Plus => Some(Polarity::Plus),
            KPol::Var(q) => self.store.pvalue(q),
        };
        match (a.1, b.1) {
            (KPol::Var(p), KPol::Var(q)) if self.store.pfind(p) == self.store.pfind(q) => true,
            (x, y) => matches!((val(x), val(y)), (Some(p), Some(q)) if p == q),
        }
    }

    fn end_name(&self, k: &Key) -> String {
        let name = self
            .free
            .iter()
            .find(|(_, id)| **id == k.0)
            .map(|(n, _)| n.clone())
            .or_else(|| {
                self.chans.iter().rev().find(|(_, b)| match b {
                    Binding::Session(id, _) | Binding::Caught(id, _) | Binding::Restricted(id) => *id == k.0,
                }).map(|(n, _)| n.clone())
            })
            .unwrap_or_else(|| format!("#{}", k.0));
        match k.1 {
            KPol::Minus => format!("{name}^-"),
            KPol::Plus => format!("{name}^+"),
            KPol::Var(_) => name,
        }
    }

    /// Merges the typings of alternative continuations, which must agree on
    /// every end (absent ends count as `end`).
    fn agree(&mut self, deltas: Vec<Delta>) -> Result<Delta, TypeError> {
        let keys: BTreeSet<Key> = deltas.iter().flat_map(|d| d.keys().copied()).collect();
        let mut out = Delta::new();
        for k in keys {
            let mut ts = Vec::new();
            for d in &deltas {
                let t = match d.get(&k) {
                    Some(t) => *t,
                    None => self.store.end(),
                };
                ts.push(t);
            }
            for t in &ts[1..] {
                if let Err(e) = self.store.unify(ts[0], *t) {
                    return Err(self.err(
                        TypeErrorKind::BranchTypingDisagreement,
                        format!("alternatives use {} differently ({e:?})", self.end_name(&k)),
                    ));
                }
            }
            out.insert(k, ts[0]);
        }
        Ok(out)
    }

    fn gen(&mut self, p: &Process) -> Result<Delta, TypeError> {
        match p {
            Process::Inact => Ok(Delta::new()),
            Process::Par(a, b) => {
                let mut da = self.child(0, |g| g.gen(a))?;
                let db = self.child(1, |g| g.gen(b))?;
                self.disjoint(&mut da, db)?;
                Ok(da)
            }
            Process::Request { ty, chan, body, .. } | Process::Accept { ty, chan, body, .. } => {
                let pol = if matches!(p, Process::Request { .. }) { Polarity::Minus } else { Polarity::Plus };
                let id = self.fresh_id();
                self.chans.push((chan.clone(), Binding::Session(id, pol)));
                let res = self.child(0, |g| g.gen(body));
                self.chans.pop();
                let mut d = res?;
                let used = self.take(&mut d, &(id, kpol(pol)));
                let declared = self.store.from_session_type(ty);
                if let Err(e) = self.store.unify(used, declared) {
                    let shown = self.store.to_session_type(used).map(|t| t.to_string()).unwrap_or_default();
                    return Err(self.err(
                        unify_kind(&e),
                        format!("`{chan}` is declared `{ty}` but used as `{shown}`"),
                    ));
                }
                Ok(d)
            }
            Process::Send { chan, expr, cont } => {
                let g = self.expr(expr)?;
                let mut d = self.child(0, |s| s.gen(cont))?;
                let k = self.resolve(chan)?;
                let c = self.take(&mut d, &k);
                let t = self.store.fresh(Node::OutV(g, c));
                d.insert(k, t);
                Ok(d)
            }
            Process::Recv { chan, var, cont } => {
                let g = self.store.gvar();
                self.recvs.push((self.path.clone(), g));
                self.vars.push((var.clone(), g));
                let res = self.child(0, |s| s.gen(cont));
                self.vars.pop();
                let mut d = res?;
                let k = self.resolve(chan)?;
                let c = self.take(&mut d, &k);
                let t = self.store.fresh(Node::InV(g, c));
                d.insert(k, t);
                Ok(d)
            }
            Process::Throw { chan, sent, cont } => {
                let mut d = self.child(0, |s| s.gen(cont))?;
                let k = self.resolve(chan)?;
                let j = self.resolve(sent)?;
                if self.same_end(&k, &j) {
                    return Err(self.err(TypeErrorKind::PolarityClash, format!("`{chan}` is sent over itself")));
                }
                if d.keys().any(|x| self.same_end(x, &j)) {
                    return Err(self.err(
                        TypeErrorKind::PolarityClash,
                        format!("`{sent}` is used after being sent"),
                    ));
                }
                let c = self.take(&mut d, &k);
                let carried = self.store.var();
                let q = self.pid_of(j.1);
                let t = self.store.fresh(Node::OutS(carried, q, c));
                d.insert(k, t);
                d.insert(j, carried);
                Ok(d)
            }
            Process::Catch { chan, bound, cont } => {
                let id = self.fresh_id();
                let q = self.store.pvar();
                self.chans.push((bound.clone(), Binding::Caught(id, q)));
                let res = self.child(0, |s| s.gen(cont));
                self.chans.pop();
                let mut d = res?;
                let carried = self.take(&mut d, &(id, KPol::Var(q)));
                let k = self.resolve(chan)?;
                let c = self.take(&mut d, &k);
                let t = self.store.fresh(Node::InS(carried, q, c));
                d.insert(k, t);
                Ok(d)
            }
            Process::Select { chan, label, cont } => {
                let mut d = self.child(0, |s| s.gen(cont))?;
                let k = self.resolve(chan)?;
                let c = self.take(&mut d, &k);
                let t = self.store.fresh(Node::Select {
                    arms: vec![(label.clone(), c)],
                    open: true,
                });
                d.insert(k, t);
                Ok(d)
            }
            Process::Branch { chan, arms } | Process::Spec { chan, arms, .. } => {
                let k = self.resolve(chan)?;
                let mut deltas = Vec::new();
                let mut conts: Vec<(Label, TyId)> = Vec::new();
                for (i, (l, q)) in arms.iter().enumerate() {
                    let mut d = self.child(i, |s| s.gen(q))?;
                    let c = self.take(&mut d, &k);
                    conts.push((l.clone(), c));
                    deltas.push(d);
                }
                let mut d = self.agree(deltas)?;
                let node = if matches!(p, Process::Branch { .. }) {
                    Node::Branch {
                        arms: conts,
                        lower: BTreeSet::new(),
                    }
                } else {
                    Node::Spec { arms: conts, prio: None }
                };
                let t = self.store.fresh(node);
                d.insert(k, t);
                Ok(d)
            }
            Process::If { cond, then, els } => {
                let g = self.expr(cond)?;
                let b = self.store.ground(GroundType::bool());
                self.store.unify_ground(g, b).map_err(|_| {
                    self.err(TypeErrorKind::GroundTypeMismatch, format!("condition `{cond}` is not a Bool"))
                })?;
                let d1 = self.child(0, |s| s.gen(then))?;
                let d2 = self.child(1, |s| s.gen(els))?;
                self.agree(vec![d1, d2])
            }
            Process::Orch { chan, .. } => Err(self.err(
                TypeErrorKind::ArityOrShape,
                format!("orchestrator for `{chan}` outside its restriction"),
            )),
            Process::Restrict { chan, body } => self.child(0, |s| s.restrict(chan, body)),
        }
    }

    fn restrict(&mut self, chan: &str, body: &Process) -> Result<Delta, TypeError> {
        let mut comps = Vec::new();
        par_paths(body, &mut Vec::new(), &mut comps);
        let mut orch: Option<Orchestrator> = None;
        let mut rest = Vec::new();
        for (path, q) in comps {
            match q {
                Process::Orch { chan: c, orch: f } if c == chan => {
                    if orch.replace(f.clone()).is_some() {
                        return Err(self.err(TypeErrorKind::ArityOrShape, format!("two orchestrators for `{chan}`")));
                    }
                }
                _ => rest.push((path, q)),
            }
        }
        let id = self.fresh_id();
        self.chans.push((chan.to_string(), Binding::Restricted(id)));
        let res = (|| {
            let mut d = Delta::new();
            for (path, q) in rest {
                let base = self.path.len();
                self.path.extend(path);
                let dq = self.gen(q);
                let dq = match dq {
                    Ok(dq) => dq,
                    Err(e) => {
                        self.path.truncate(base);
                        return Err(e);
                    }
                };
                let r = self.disjoint(&mut d, dq);
                self.path.truncate(base);
                r?;
            }
            Ok(d)
        })();
        self.chans.pop();
        let mut d = res?;
        let client = self.take(&mut d, &(id, KPol::Minus));
        let server = self.take(&mut d, &(id, KPol::Plus));
        if d.keys().any(|k| k.0 == id) {
            return Err(self.err(TypeErrorKind::PolarityClash, format!("`{chan}` is received inside its own scope")));
        }
        match orch {
            Some(f) => {
                let origin = self.roots.len();
                self.roots.push((client, server));
                let mut loc = self.path.clone();
                loc.pop();
                self.origins.push(loc);
                self.constraints.push(Compliance {
                    orch: f,
                    client,
                    server,
                    origin,
                });
            }
            None => {
                let used = [client, server]
                    .iter()
                    .any(|t| !matches!(self.store.node(*t), Node::End | Node::Var));
                if used {
                    return Err(self.err(
                        TypeErrorKind::ArityOrShape,
                        format!("restricted channel `{chan}` is used but has no orchestrator"),
                    ));
                }
            }
        }
        Ok(d)
    }
}

fn par_paths<'a>(p: &'a Process, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Process)>) {
    match p {
        Process::Par(a, b) => {
            path.push(0);
            par_paths(a, path, out);
            path.pop();
            path.push(1);
            par_paths(b, path, out);
            path.pop();
        }
        _ => out.push((path.clone(), p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_process, parse_type};

    fn tc(src: &str) -> Result<Typing, TypeError> {
        typecheck(&Context::new(), &parse_process(src).unwrap(), SemanticsMode::Plain)
    }

    #[test]
    fn inaction_has_empty_typing() {
        assert_eq!(tc("0"), Ok(Typing::new()));
    }

    #[test]
    fn free_ends_are_reported() {
        let d = tc("k^+?(x).k^+!<x> | j^-<|a").unwrap();
        assert_eq!(d.get("k", Polarity::Plus), Some(&parse_type("?Nat.!Nat").unwrap()));
        assert_eq!(d.get("j", Polarity::Minus), Some(&parse_type("+{a: end}").unwrap()));
    }

    #[test]
    fn unpolarized_free_channel_is_unbound() {
        assert_eq!(tc("k!<1>").unwrap_err().kind, TypeErrorKind::UnboundChannel);
    }

    #[test]
    fn annotation_is_checked() {
        let e = tc("request a:(!Nat)(k).k?(x)").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::ArityOrShape);
        let e = tc("request a:(!Nat)(k).k!<true>").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::GroundTypeMismatch);
        assert!(tc("request a:(!Nat.?Bool)(k).k!<1>.k?(b).if b then 0 else 0").is_ok());
    }

    #[test]
    fn branch_may_offer_more_than_declared() {
        assert!(tc("accept a:(&{x: end})(k).k|>{x: 0, y: k!<1>}").is_ok());
        let e = tc("accept a:(&{x: end, z: end})(k).k|>{x: 0, y: 0}").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::LabelMismatch);
    }

    #[test]
    fn restriction_requires_compliance() {
        assert!(tc("(new k)(orch k {*} | k^-!<1> | k^+?(x))").is_ok());
        let e = tc("(new k)(orch k {*} | k^-!<1> | k^+!<2>)").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::ComplianceFailure);
        assert_eq!(e.detail, "both ends begin with an output");
        let e = tc("(new k)(orch k {l + m} | k^+!<1> | k^-?(x))").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::ComplianceFailure);
        assert!(e.detail.contains("does not enable the input/output"));
        let e = tc("(new k)(orch k {1} | k^-!<1> | 0)").unwrap_err();
        assert!(e.detail.contains("idle"));
    }

    #[test]
    fn same_end_in_two_threads_clashes() {
        let e = tc("(new k)(orch k {l + m} | k^+<|l | k^+|>{l: 0})").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::PolarityClash);
    }

    #[test]
    fn delegation_through_a_session() {
        let src = "(new k)(orch k {*} | (new j)(orch j {*} | k^+!<<j^->>.0 | j^+?(x)) \
                   | k^-?((c)).c!<5>)";
        assert_eq!(tc(src), Ok(Typing::new()));
        let bad = "(new k)(orch k {*} | (new j)(orch j {*} | k^+!<<j^->>.0 | j^+?(x)) \
                   | k^-?((c)).c?(y))";
        assert_eq!(tc(bad).unwrap_err().kind, TypeErrorKind::ComplianceFailure);
    }

    #[test]
    fn branch_arms_must_agree() {
        let e = tc("k^+|>{a: j^-!<1>, b: j^-!<true>}").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::BranchTypingDisagreement);
        assert!(tc("k^+|>{a: j^-!<1>, b: j^-!<2>}").is_ok());
    }

    #[test]
    fn compose_and_completion() {
        let a = Typing::singleton("k", Polarity::Plus, SessionType::End);
        let b = Typing::singleton("k", Polarity::Minus, parse_type("!Nat").unwrap());
        let ab = typing_compose(&a, &b).unwrap();
        assert_eq!(ab.len(), 2);
        assert!(!is_completed(&ab));
        assert!(is_completed(&a));
        assert_eq!(typing_compose(&a, &a).unwrap_err().kind, TypeErrorKind::PolarityClash);
    }

    #[test]
    fn check_against_claim() {
        let p = parse_process("k^+?(x)").unwrap();
        let good = Typing::singleton("k", Polarity::Plus, parse_type("?Nat").unwrap());
        assert!(admits(&Context::new(), &p, &good));
        let err = check(&Context::new(), &p, &Typing::new()).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::IncompleteTyping);
    }

    #[test]
    fn received_variable_types_follow_the_partner() {
        let p = parse_process("(new k)(orch k {*} | k^-!<true> | k^+?(x))").unwrap();
        let m = recv_var_types(&FunctionTable::default(), &Context::new(), &p).unwrap();
        assert_eq!(m.values().collect::<Vec<_>>(), vec![&GroundType::bool()]);
    }
}

//! Discharging compliance constraints against partially known types.
//!
//! Each constraint walks its orchestrator. A step that fits exactly one
//! compliance clause is committed at once; steps admitting several clauses
//! wait until nothing else makes progress, and are then explored depth first.

use std::collections::BTreeSet;

use super::store::{arm_of, labels_of, Node, Store, TyId};
use crate::syntax::{Label, Orchestrator, SessionType};

#[derive(Clone, Debug)]
pub struct Compliance {
    pub orch: Orchestrator,
    pub client: TyId,
    pub server: TyId,
    pub origin: usize,
}

#[derive(Clone, Debug)]
pub struct SolveFailure {
    pub origin: usize,
    pub reason: String,
    pub pair: Option<(SessionType, SessionType)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Var,
    End,
    InV,
    OutV,
    InS,
    OutS,
    Branch,
    Select,
    Spec,
}

#[derive(Clone, Copy, Debug)]
enum Alt {
    Io(Kind, Kind),
    Labelled(Kind, Kind),
}

enum Step {
    Done(Vec<Compliance>),
    Fail(String),
    Choice(usize),
}

#[derive(Clone)]
struct State {
    store: Store,
    work: Vec<Compliance>,
}

/// Solves `work` in `store`. `roots` gives, per origin, the client and server
/// types used when reporting a failure.
pub fn solve(store: &mut Store, work: Vec<Compliance>, roots: &[(TyId, TyId)]) -> Result<(), SolveFailure> {
    let mut st = State { store: std::mem::take(store), work };
    let res = run(&mut st, roots);
    *store = st.store;
    res
}

fn run(st: &mut State, roots: &[(TyId, TyId)]) -> Result<(), SolveFailure> {
    loop {
        let mut progress = false;
        let mut pending = Vec::new();
        let mut queue = std::mem::take(&mut st.work);
        while let Some(c) = pop_front(&mut queue) {
            match step(&mut st.store, &c, None) {
                Step::Done(more) => {
                    queue.extend(more);
                    progress = true;
                }
                Step::Fail(reason) => return Err(failure(&st.store, &c, reason, roots)),
                Step::Choice(_) => pending.push(c),
            }
        }
        if pending.is_empty() {
            return Ok(());
        }
        if progress {
            st.work = pending;
            continue;
        }
        let first = pending.remove(0);
        let n = match step(&mut st.store.clone(), &first, None) {
            Step::Choice(n) => n,
            _ => unreachable!("pending constraints are ambiguous"),
        };
        let mut first_err = None;
        for i in 0..n {
            let mut branch = st.clone();
            match step(&mut branch.store, &first, Some(i)) {
                Step::Done(more) => {
                    branch.work = pending.iter().cloned().chain(more).collect();
                    match run(&mut branch, roots) {
                        Ok(()) => {
                            *st = branch;
                            return Ok(());
                        }
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                Step::Fail(reason) => {
                    first_err.get_or_insert_with(|| failure(&branch.store, &first, reason, roots));
                }
                Step::Choice(_) => unreachable!(),
            }
        }
        return Err(first_err.expect("at least two alternatives"));
    }
}

fn pop_front(q: &mut Vec<Compliance>) -> Option<Compliance> {
    if q.is_empty() {
        None
    } else {
        Some(q.remove(0))
    }
}

fn failure(store: &Store, c: &Compliance, reason: String, roots: &[(TyId, TyId)]) -> SolveFailure {
    let pair = roots
        .get(c.origin)
        .and_then(|(a, b)| Some((store.to_session_type(*a)?, store.to_session_type(*b)?)));
    SolveFailure {
        origin: c.origin,
        reason,
        pair,
    }
}

fn kind(store: &Store, t: TyId) -> Kind {
    match store.node(t) {
        Node::Var => Kind::Var,
        Node::End => Kind::End,
        Node::InV(..) => Kind::InV,
        Node::OutV(..) => Kind::OutV,
        Node::InS(..) => Kind::InS,
        Node::OutS(..) => Kind::OutS,
        Node::Branch { .. } => Kind::Branch,
        Node::Select { .. } => Kind::Select,
        Node::Spec { .. } => Kind::Spec,
    }
}

fn describe(k: Kind) -> &'static str {
    match k {
        Kind::Var => "an unknown action",
        Kind::End => "nothing",
        Kind::InV => "a value input",
        Kind::OutV => "a value output",
        Kind::InS => "a channel input",
        Kind::OutS => "a channel output",
        Kind::Branch => "a branching",
        Kind::Select => "a selection",
        Kind::Spec => "a speculative selection",
    }
}

fn is_io(k: Kind) -> bool {
    matches!(k, Kind::InV | Kind::OutV | Kind::InS | Kind::OutS)
}

fn reason(orch: &Orchestrator, ck: Kind, sk: Kind) -> String {
    let pair = format!("client performs {}, server performs {}", describe(ck), describe(sk));
    match orch {
        Orchestrator::Idle => format!("the orchestrator is idle but the client has not finished ({pair})"),
        Orchestrator::Io(_) => match (ck, sk) {
            (Kind::OutV | Kind::OutS, Kind::OutV | Kind::OutS) => "both ends begin with an output".to_string(),
            (Kind::InV | Kind::InS, Kind::InV | Kind::InS) => "both ends begin with an input".to_string(),
            _ => format!("the orchestrator enables an input/output step but {pair}"),
        },
        _ if is_io(ck) || is_io(sk) => {
            format!("the orchestrator does not enable the input/output synchronisation ({pair})")
        }
        _ => format!("the orchestrator's labels are not supported by both ends ({pair})"),
    }
}

fn fits(want: Kind, have: Kind) -> bool {
    have == Kind::Var || have == want
}

/// Whether `t` can take part in a labelled step on `labels` as `want`.
fn labels_fit(store: &Store, t: TyId, want: Kind, labels: &BTreeSet<Label>) -> bool {
    match (want, store.node(t)) {
        (_, Node::Var) => true,
        (Kind::Select, Node::Select { arms, open }) => {
            let have = labels_of(arms);
            if *open {
                have.is_subset(labels)
            } else {
                have == *labels
            }
        }
        (Kind::Branch, Node::Branch { arms, .. }) | (Kind::Spec, Node::Spec { arms, .. }) => {
            labels.is_subset(&labels_of(arms))
        }
        _ => false,
    }
}

fn step(store: &mut Store, c: &Compliance, choice: Option<usize>) -> Step {
    let (ck, sk) = (kind(store, c.client), kind(store, c.server));
    let alts: Vec<Alt> = match &c.orch {
        Orchestrator::Idle => {
            return match store.node(c.client) {
                Node::Var | Node::End => {
                    let e = store.end();
                    store.unify(c.client, e).expect("var or end unifies with end");
                    Step::Done(Vec::new())
                }
                _ => Step::Fail(reason(&c.orch, ck, sk)),
            };
        }
        Orchestrator::Io(_) => [
            (Kind::InV, Kind::OutV),
            (Kind::OutV, Kind::InV),
            (Kind::InS, Kind::OutS),
            (Kind::OutS, Kind::InS),
        ]
        .into_iter()
        .filter(|(a, b)| fits(*a, ck) && fits(*b, sk))
        .map(|(a, b)| Alt::Io(a, b))
        .collect(),
        f => {
            let external = matches!(f, Orchestrator::External(_) | Orchestrator::Prefix(..));
            let internal = matches!(f, Orchestrator::Internal(_) | Orchestrator::Prefix(..));
            let labels: BTreeSet<Label> = match f {
                Orchestrator::External(a) | Orchestrator::Internal(a) => a.labels().cloned().collect(),
                Orchestrator::Prefix(l, _) => BTreeSet::from([l.clone()]),
                _ => unreachable!(),
            };
            let mut candidates = Vec::new();
            if external {
                candidates.push((Kind::Select, Kind::Branch));
                candidates.push((Kind::Branch, Kind::Select));
            }
            if internal {
                candidates.push((Kind::Spec, Kind::Branch));
                candidates.push((Kind::Branch, Kind::Spec));
            }
            candidates
                .into_iter()
                .filter(|(a, b)| labels_fit(store, c.client, *a, &labels) && labels_fit(store, c.server, *b, &labels))
                .map(|(a, b)| Alt::Labelled(a, b))
                .collect()
        }
    };
    let alt = match (alts.len(), choice) {
        (0, _) => return Step::Fail(reason(&c.orch, ck, sk)),
        (1, _) => alts[0],
        (n, None) => return Step::Choice(n),
        (_, Some(i)) => alts[i],
    };
    match alt {
        Alt::Io(a, b) => io_step(store, c, a, b),
        Alt::Labelled(a, b) => labelled_step(store, c, a, b),
    }
}

fn io_step(store: &mut Store, c: &Compliance, a: Kind, _b: Kind) -> Step {
    let Orchestrator::Io(next) = &c.orch else { unreachable!() };
    let value = matches!(a, Kind::InV | Kind::OutV);
    let (cc, sc) = if value {
        let g = store.gvar();
        let (x, y) = (store.var(), store.var());
        let (cn, sn) = if a == Kind::InV {
            (Node::InV(g, x), Node::OutV(g, y))
        } else {
            (Node::OutV(g, x), Node::InV(g, y))
        };
        (cn, sn)
    } else {
        let p = store.pvar();
        let car = store.var();
        let (x, y) = (store.var(), store.var());
        if a == Kind::InS {
            (Node::InS(car, p, x), Node::OutS(car, p, y))
        } else {
            (Node::OutS(car, p, x), Node::InS(car, p, y))
        }
    };
    let (cx, sy) = match (&cc, &sc) {
        (Node::InV(_, x) | Node::OutV(_, x) | Node::InS(_, _, x) | Node::OutS(_, _, x),
         Node::InV(_, y) | Node::OutV(_, y) | Node::InS(_, _, y) | Node::OutS(_, _, y)) => (*x, *y),
        _ => unreachable!(),
    };
    let pc = store.fresh(cc);
    let ps = store.fresh(sc);
    if let Err(e) = store.unify(c.client, pc) {
        return Step::Fail(format!("client cannot take the input/output step: {e:?}"));
    }
    if let Err(e) = store.unify(c.server, ps) {
        return Step::Fail(match e {
            super::store::UnifyError::Ground(x, y) => format!("exchanged ground types differ ({x} and {y})"),
            super::store::UnifyError::Polarity => "delegated channel ends have different polarities".to_string(),
            _ => "carried session types are not equivalent".to_string(),
        });
    }
    Step::Done(vec![Compliance {
        orch: (**next).clone(),
        client: cx,
        server: sy,
        origin: c.origin,
    }])
}

fn labelled_step(store: &mut Store, c: &Compliance, a: Kind, b: Kind) -> Step {
    let arms: Vec<(Label, Orchestrator)> = match &c.orch {
        Orchestrator::External(x) | Orchestrator::Internal(x) => x.iter().cloned().collect(),
        Orchestrator::Prefix(l, g) => vec![(l.clone(), (**g).clone())],
        _ => unreachable!(),
    };
    let labels: Vec<Label> = arms.iter().map(|(l, _)| l.clone()).collect();
    let ct = commit(store, c.client, a, &labels);
    let st = commit(store, c.server, b, &labels);
    Step::Done(
        arms.into_iter()
            .map(|(l, g)| Compliance {
                orch: g,
                client: arm_at(store, ct, &l),
                server: arm_at(store, st, &l),
                origin: c.origin,
            })
            .collect(),
    )
}

fn arm_at(store: &Store, t: TyId, l: &Label) -> TyId {
    match store.node(t) {
        Node::Branch { arms, .. } | Node::Select { arms, .. } | Node::Spec { arms, .. } => {
            arm_of(arms, l).expect("committed label present")
        }
        _ => unreachable!(),
    }
}

/// Fixes the shape of `t` as `want` over `labels`, already known to fit.
fn commit(store: &mut Store, t: TyId, want: Kind, labels: &[Label]) -> TyId {
    let node = store.node(t).clone();
    let new = match node {
        Node::Var => {
            let arms: Vec<(Label, TyId)> = labels.iter().map(|l| (l.clone(), store.var())).collect();
            match want {
                Kind::Select => Node::Select { arms, open: false },
                Kind::Branch => Node::Branch {
                    lower: labels.iter().cloned().collect(),
                    arms,
                },
                Kind::Spec => Node::Spec { arms, prio: None },
                _ => unreachable!(),
            }
        }
        Node::Select { mut arms, .. } => {
            for l in labels {
                if arm_of(&arms, l).is_none() {
                    arms.push((l.clone(), store.var()));
                }
            }
            Node::Select { arms, open: false }
        }
        Node::Branch { arms, mut lower } => {
            lower.extend(labels.iter().cloned());
            Node::Branch { arms, lower }
        }
        other => other,
    };
    store.set(t, new);
    t
}

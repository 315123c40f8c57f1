//! Seeded generators for types, compliant pairs and typed processes, a
//! greedy shrinker, and the property suites built on them.

mod runtime;
mod shrink;
mod suites;

pub use runtime::{gen_runtime, rewrite_neighbours, rewrite_walk};
pub use shrink::{shrink, Shrink};
pub use suites::{
    check_synth_case, explore, run_case, CaseFailure, Exploration, Suite, BRANCHING, STEP_LIMIT,
};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{
    Arms, ChannelRef, Expression, FunctionTable, GroundType, Label, Orchestrator, Polarity, Process,
    SessionType,
};

const LABELS: [&str; 5] = ["a", "b", "c", "d", "e"];
const WORDS: [&str; 3] = ["x", "movie", "url"];

#[derive(Clone, Copy, Debug)]
struct TypeOpts {
    allow_spec: bool,
    prioritized: bool,
    delegation: bool,
}

/// Random source plus name supply shared by the generators.
struct Gen {
    rng: ChaCha8Rng,
    grounds: Vec<GroundType>,
    next_var: usize,
    next_chan: usize,
    next_port: usize,
    next_tag: usize,
    /// Partner threads opened for delegated sessions.
    extra: Vec<Process>,
}

impl Gen {
    fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            grounds: FunctionTable::default().ground_types().to_vec(),
            next_var: 0,
            next_chan: 0,
            next_port: 0,
            next_tag: 0,
            extra: Vec::new(),
        }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn ground(&mut self) -> GroundType {
        self.grounds.choose(&mut self.rng).unwrap().clone()
    }

    fn pol(&mut self) -> Polarity {
        if self.chance(0.5) {
            Polarity::Minus
        } else {
            Polarity::Plus
        }
    }

    /// 1 to 3 distinct labels in random order.
    fn labels(&mut self) -> Vec<Label> {
        let n = self.rng.gen_range(1..=3);
        let mut pool = LABELS.to_vec();
        pool.shuffle(&mut self.rng);
        pool[..n].iter().map(|l| Label::from_static(l)).collect()
    }

    fn fresh_label(&mut self, taken: &[Label]) -> Option<Label> {
        let free: Vec<&str> = LABELS
            .iter()
            .copied()
            .filter(|l| !taken.iter().any(|t| t.as_str() == *l))
            .collect();
        free.choose(&mut self.rng).map(|l| Label::from_static(l))
    }

    fn subset(&mut self, labels: &[Label]) -> Vec<Label> {
        let mut out: Vec<Label> = labels.iter().filter(|_| self.rng.gen_bool(0.6)).cloned().collect();
        if out.is_empty() {
            out.push(labels.choose(&mut self.rng).unwrap().clone());
        }
        out
    }

    fn ty(&mut self, depth: usize, o: TypeOpts) -> SessionType {
        if depth == 0 || self.chance(0.12) {
            return SessionType::End;
        }
        let kinds = if o.allow_spec { 7 } else { 6 };
        let k = self.rng.gen_range(0..kinds);
        match k {
            0 => SessionType::input(self.ground(), self.ty(depth - 1, o)),
            1 => SessionType::output(self.ground(), self.ty(depth - 1, o)),
            2 | 3 if o.delegation && depth >= 2 => {
                let carried = self.ty((depth - 1).min(2), TypeOpts { delegation: false, ..o });
                let pol = self.pol();
                let cont = self.ty(depth - 1, o);
                if k == 2 {
                    SessionType::in_session(carried, pol, cont)
                } else {
                    SessionType::out_session(carried, pol, cont)
                }
            }
            2 | 4 => SessionType::Branch(self.arms(depth, o)),
            3 | 5 => SessionType::Select(self.arms(depth, o)),
            _ => SessionType::Spec {
                arms: self.arms(depth, o),
                prioritized: o.prioritized,
            },
        }
    }

    fn arms(&mut self, depth: usize, o: TypeOpts) -> Arms<SessionType> {
        let labels = self.labels();
        let arms = labels.into_iter().map(|l| (l, self.ty(depth - 1, o))).collect();
        Arms::new(arms).unwrap()
    }

    /// Server padding: never delegates, so clean-up can always discharge it.
    fn padding(&mut self, depth: usize) -> SessionType {
        let o = TypeOpts {
            allow_spec: true,
            prioritized: false,
            delegation: false,
        };
        self.ty(depth, o)
    }

    /// A derivation of `f : client ⊣ server` built from the root.
    fn pair(&mut self, depth: usize, delegation: bool) -> (SessionType, SessionType, Orchestrator) {
        use SessionType as S;
        if depth == 0 || self.chance(0.15) {
            return (S::End, self.padding(depth), Orchestrator::Idle);
        }
        match self.rng.gen_range(0..6) {
            0 | 1 => {
                let g = self.ground();
                let (c, s, f) = self.pair(depth - 1, delegation);
                let (c, s) = if self.chance(0.5) {
                    (S::output(g.clone(), c), S::input(g, s))
                } else {
                    (S::input(g.clone(), c), S::output(g, s))
                };
                (c, s, Orchestrator::io(f))
            }
            2 if delegation && depth >= 2 => {
                let o = TypeOpts {
                    allow_spec: true,
                    prioritized: self.chance(0.3),
                    delegation: false,
                };
                // an `end` requester would comply with every acceptor
                let carried = match self.ty((depth - 1).min(2), o) {
                    S::End => S::output(self.ground(), S::End),
                    t => t,
                };
                let pol = self.pol();
                let (c, s, f) = self.pair(depth - 1, delegation);
                let (c, s) = if self.chance(0.5) {
                    (S::out_session(carried.clone(), pol, c), S::in_session(carried, pol, s))
                } else {
                    (S::in_session(carried.clone(), pol, c), S::out_session(carried, pol, s))
                };
                (c, s, Orchestrator::io(f))
            }
            2 | 3 => {
                // external choice: the selecting side fixes the labels
                let labels = self.labels();
                let mut sel = Vec::new();
                let mut br = Vec::new();
                let mut orch = Vec::new();
                let client_selects = self.chance(0.5);
                for l in &labels {
                    let (c, s, f) = self.pair(depth - 1, delegation);
                    let (a, b) = if client_selects { (c, s) } else { (s, c) };
                    sel.push((l.clone(), a));
                    br.push((l.clone(), b));
                    orch.push((l.clone(), f));
                }
                if client_selects && self.chance(0.4) {
                    if let Some(l) = self.fresh_label(&labels) {
                        br.push((l, self.padding(depth - 1)));
                    }
                }
                let sel = S::Select(Arms::new(sel).unwrap());
                let br = S::Branch(Arms::new(br).unwrap());
                let (c, s) = if client_selects { (sel, br) } else { (br, sel) };
                (c, s, Orchestrator::external_arms(Arms::new(orch).unwrap()))
            }
            _ => {
                // internal choice over H, inside both the speculation and the branching
                let spec_labels = self.labels();
                let h = self.subset(&spec_labels);
                let mut sp = Vec::new();
                let mut br = Vec::new();
                let mut orch = Vec::new();
                let client_specs = self.chance(0.6);
                for l in &spec_labels {
                    if h.contains(l) {
                        let (c, s, f) = self.pair(depth - 1, delegation);
                        let (a, b) = if client_specs { (c, s) } else { (s, c) };
                        sp.push((l.clone(), a));
                        br.push((l.clone(), b));
                        orch.push((l.clone(), f));
                    } else if client_specs {
                        sp.push((l.clone(), self.padding(depth - 1)));
                        if self.chance(0.3) {
                            br.push((l.clone(), self.padding(depth - 1)));
                        }
                    } else {
                        sp.push((l.clone(), self.padding(depth - 1)));
                    }
                }
                if client_specs && self.chance(0.3) {
                    if let Some(l) = self.fresh_label(&spec_labels) {
                        br.push((l, self.padding(depth - 1)));
                    }
                }
                let sp = S::Spec {
                    arms: Arms::new(sp).unwrap(),
                    prioritized: self.chance(0.3),
                };
                let br = S::Branch(Arms::new(br).unwrap());
                let (c, s) = if client_specs { (sp, br) } else { (br, sp) };
                (c, s, Orchestrator::internal_arms(Arms::new(orch).unwrap()))
            }
        }
    }

    /// A server type the client `c` complies with.
    fn server_for(&mut self, c: &SessionType) -> SessionType {
        use SessionType as S;
        match c {
            S::End => self.padding(1),
            S::InValue(g, t) => S::output(g.clone(), self.server_for(t)),
            S::OutValue(g, t) => S::input(g.clone(), self.server_for(t)),
            S::InSession { carried, pol, cont } => {
                S::out_session((**carried).clone(), *pol, self.server_for(cont))
            }
            S::OutSession { carried, pol, cont } => {
                S::in_session((**carried).clone(), *pol, self.server_for(cont))
            }
            S::Select(arms) | S::Spec { arms, .. } => {
                S::Branch(arms.try_map(|t| Ok::<_, ()>(self.server_for(t))).unwrap())
            }
            S::Branch(arms) => {
                let labels: Vec<Label> = arms.labels().cloned().collect();
                let keep = self.subset(&labels);
                let sel = keep
                    .into_iter()
                    .map(|l| {
                        let t = arms.get(&l).unwrap().clone();
                        (l, self.server_for(&t))
                    })
                    .collect();
                S::Select(Arms::new(sel).unwrap())
            }
        }
    }

    /// A client type that complies with the server `s`; not `end` unless
    /// `s` is.
    fn client_for(&mut self, s: &SessionType) -> SessionType {
        self.client_for_at(s, true)
    }

    fn client_for_at(&mut self, s: &SessionType, root: bool) -> SessionType {
        use SessionType as S;
        if !root && !s.is_end() && s.is_delegation_free() && self.chance(0.1) {
            return S::End;
        }
        match s {
            S::End => S::End,
            S::InValue(g, t) => S::output(g.clone(), self.client_for_at(t, false)),
            S::OutValue(g, t) => S::input(g.clone(), self.client_for_at(t, false)),
            S::InSession { carried, pol, cont } => {
                S::out_session((**carried).clone(), *pol, self.client_for(cont))
            }
            S::OutSession { carried, pol, cont } => {
                S::in_session((**carried).clone(), *pol, self.client_for(cont))
            }
            S::Select(arms) | S::Spec { arms, .. } => {
                S::Branch(arms.try_map(|t| Ok::<_, ()>(self.client_for_at(t, false))).unwrap())
            }
            S::Branch(arms) => {
                let labels: Vec<Label> = arms.labels().cloned().collect();
                let keep = self.subset(&labels);
                let sel = keep
                    .into_iter()
                    .map(|l| {
                        let t = arms.get(&l).unwrap().clone();
                        (l, self.client_for_at(&t, false))
                    })
                    .collect();
                S::Select(Arms::new(sel).unwrap())
            }
        }
    }

    fn var(&mut self) -> String {
        self.next_var += 1;
        format!("x{}", self.next_var - 1)
    }

    fn chan(&mut self) -> String {
        self.next_chan += 1;
        format!("j{}", self.next_chan - 1)
    }

    fn port(&mut self) -> String {
        self.next_port += 1;
        format!("p{}", self.next_port - 1)
    }

    fn tag(&mut self) -> Label {
        self.next_tag += 1;
        Label::from_static(&format!("t{}", self.next_tag - 1))
    }

    fn word(&mut self) -> Expression {
        Expression::string(*WORDS.choose(&mut self.rng).unwrap())
    }

    /// An expression of ground type `g` over the variables in scope.
    fn expr(&mut self, g: &GroundType, scope: &[(String, GroundType)]) -> Expression {
        let vars: Vec<&String> = scope.iter().filter(|(_, h)| h == g).map(|(x, _)| x).collect();
        if !vars.is_empty() && self.chance(0.4) {
            return Expression::var(vars.choose(&mut self.rng).unwrap().as_str());
        }
        match g.name() {
            "Nat" => Expression::nat(self.rng.gen_range(0..10)),
            "Bool" if self.chance(0.3) => Expression::apply("available", vec![self.word()]),
            "Bool" => Expression::bool(self.chance(0.5)),
            "String" => self.word(),
            "Amount" if self.chance(0.5) => Expression::apply("amount", vec![self.word()]),
            "Url" if self.chance(0.5) => Expression::apply("url", vec![self.word()]),
            name => Expression::apply(name, vec![Expression::nat(self.rng.gen_range(0..10))]),
        }
    }

    fn cond(&mut self, scope: &[(String, GroundType)]) -> Expression {
        self.expr(&GroundType::bool(), scope)
    }

    /// A thread following `ty` on `k`, then each pending `(type, channel)`
    /// in turn.
    fn body(
        &mut self,
        ty: &SessionType,
        k: &str,
        rest: &[(SessionType, String)],
        scope: &mut Vec<(String, GroundType)>,
    ) -> Process {
        if ty.is_end() {
            return match rest.split_first() {
                None => Process::Inact,
                Some(((t, j), rest)) => self.body(t, j, rest, scope),
            };
        }
        if self.chance(0.08) {
            let c = self.cond(scope);
            let then = self.body_inner(ty, k, rest, scope);
            let els = self.body_inner(ty, k, rest, scope);
            return Process::if_then_else(c, then, els);
        }
        self.body_inner(ty, k, rest, scope)
    }

    fn body_inner(
        &mut self,
        ty: &SessionType,
        k: &str,
        rest: &[(SessionType, String)],
        scope: &mut Vec<(String, GroundType)>,
    ) -> Process {
        use SessionType as S;
        let ch = ChannelRef::plain(k);
        match ty {
            S::End => self.body(ty, k, rest, scope),
            S::OutValue(g, t) => {
                let e = self.expr(g, scope);
                Process::send(ch, e, self.body(t, k, rest, scope))
            }
            S::InValue(g, t) => {
                let x = self.var();
                scope.push((x.clone(), g.clone()));
                let p = self.body(t, k, rest, scope);
                scope.pop();
                Process::recv(ch, &x, p)
            }
            S::OutSession { carried, pol, cont } => {
                let j = self.chan();
                let port = self.port();
                let after = self.body(cont, k, rest, scope);
                let thrown = Process::throw(ch, ChannelRef::plain(&j), after);
                let mut partner_scope = Vec::new();
                match pol {
                    Polarity::Minus => {
                        let partner = self.server_for(carried);
                        let pb = self.body(&partner, &j, &[], &mut partner_scope);
                        self.extra.push(Process::accept(&port, partner, &j, pb));
                        Process::request(&port, (**carried).clone(), &j, thrown)
                    }
                    Polarity::Plus => {
                        let partner = self.client_for(carried);
                        let pb = self.body(&partner, &j, &[], &mut partner_scope);
                        self.extra.push(Process::request(&port, partner, &j, pb));
                        Process::accept(&port, (**carried).clone(), &j, thrown)
                    }
                }
            }
            S::InSession { carried, cont, .. } => {
                let j = self.chan();
                let mut pending = vec![((**cont).clone(), k.to_string())];
                pending.extend_from_slice(rest);
                let p = self.body(carried, &j, &pending, scope);
                Process::catch(ch, &j, p)
            }
            S::Select(arms) => {
                let (l, t) = arms.as_slice().choose(&mut self.rng).unwrap().clone();
                Process::select(ch, l, self.body(&t, k, rest, scope))
            }
            S::Branch(arms) => {
                let mut out: Vec<(Label, Process)> = arms
                    .iter()
                    .map(|(l, t)| (l.clone(), self.body(t, k, rest, scope)))
                    .collect();
                if rest.is_empty() && self.chance(0.2) {
                    let taken: Vec<Label> = arms.labels().cloned().collect();
                    if let Some(l) = self.fresh_label(&taken) {
                        out.push((l, Process::Inact));
                    }
                }
                out.shuffle(&mut self.rng);
                Process::Branch {
                    chan: ch,
                    arms: Arms::new(out).unwrap(),
                }
            }
            S::Spec { arms, prioritized } => {
                let mut out: Vec<(Label, Process)> = arms
                    .iter()
                    .map(|(l, t)| (l.clone(), self.body(t, k, rest, scope)))
                    .collect();
                if !prioritized {
                    out.shuffle(&mut self.rng);
                }
                Process::Spec {
                    chan: ch,
                    arms: Arms::new(out).unwrap(),
                    prioritized: *prioritized,
                }
            }
        }
    }
}

/// A random type of depth at most `max_depth` with arm widths 1 to 3.
pub fn gen_type(seed: u64, max_depth: usize, allow_spec: bool, prioritized: bool) -> SessionType {
    let o = TypeOpts {
        allow_spec,
        prioritized,
        delegation: true,
    };
    Gen::new(seed).ty(max_depth, o)
}

/// A random orchestrator of depth at most `max_depth`.
pub fn gen_orch(seed: u64, max_depth: usize) -> Orchestrator {
    fn go(g: &mut Gen, depth: usize) -> Orchestrator {
        if depth == 0 || g.chance(0.2) {
            return Orchestrator::Idle;
        }
        match g.rng.gen_range(0..3) {
            0 => Orchestrator::io(go(g, depth - 1)),
            k => {
                let arms = g.labels().into_iter().map(|l| (l, go(g, depth - 1))).collect();
                let arms = Arms::new(arms).unwrap();
                if k == 1 {
                    Orchestrator::external_arms(arms)
                } else {
                    Orchestrator::internal_arms(arms)
                }
            }
        }
    }
    go(&mut Gen::new(seed), max_depth)
}

/// `(client, server, f)` with `f : client ⊣ server`, both types of depth at
/// most `max_depth`.
pub fn gen_compliant_pair(seed: u64, max_depth: usize) -> (SessionType, SessionType, Orchestrator) {
    Gen::new(seed).pair(max_depth, true)
}

/// A closed process typed by the empty typing: `sessions` request/accept
/// pairs whose bodies follow compliant type pairs, plus a partner thread
/// for every delegated session.
///
/// When more than one session is opened, each pair is guarded by a fresh
/// label so that a request can only link with its intended acceptor.
pub fn gen_typed_process(seed: u64, sessions: usize, max_depth: usize) -> Process {
    let mut g = Gen::new(seed);
    let pairs: Vec<_> = (0..sessions).map(|_| g.pair(max_depth, true)).collect();
    let delegates = pairs.iter().any(|(c, s, _)| !c.is_delegation_free() || !s.is_delegation_free());
    let tagged = sessions > 1 || delegates;
    let mut threads = Vec::new();
    for (c, s, _) in pairs {
        let port = g.port();
        let cp = g.body(&c, "k", &[], &mut Vec::new());
        let sp = g.body(&s, "k", &[], &mut Vec::new());
        let (c, s, cp, sp) = if tagged {
            let t = g.tag();
            let k = ChannelRef::plain("k");
            (
                SessionType::Select(Arms::new(vec![(t.clone(), c)]).unwrap()),
                SessionType::Branch(Arms::new(vec![(t.clone(), s)]).unwrap()),
                Process::select(k.clone(), t.clone(), cp),
                Process::Branch {
                    chan: k,
                    arms: Arms::new(vec![(t, sp)]).unwrap(),
                },
            )
        } else {
            (c, s, cp, sp)
        };
        threads.push(Process::request(&port, c, "k", cp));
        threads.push(Process::accept(&port, s, "k", sp));
    }
    threads.append(&mut g.extra);
    threads.shuffle(&mut g.rng);
    Process::par_all(threads)
}

/// Applies one random edit to a type: flip a direction, change a ground
/// type or polarity, add or drop an arm, or cut a subtree to `end`.
pub fn mutate_type(seed: u64, t: &SessionType) -> SessionType {
    let mut g = Gen::new(seed);
    let n = t.size();
    let target = g.rng.gen_range(0..n);
    let mut counter = 0;
    mutate_at(&mut g, t, target, &mut counter)
}

fn mutate_at(g: &mut Gen, t: &SessionType, target: usize, counter: &mut usize) -> SessionType {
    use SessionType as S;
    let here = *counter == target;
    *counter += 1;
    if here {
        return match t {
            S::End => g.padding(2),
            S::InValue(h, c) if g.chance(0.5) => S::output(h.clone(), (**c).clone()),
            S::OutValue(h, c) if g.chance(0.5) => S::input(h.clone(), (**c).clone()),
            S::InValue(_, c) => S::input(g.ground(), (**c).clone()),
            S::OutValue(_, c) => S::output(g.ground(), (**c).clone()),
            S::InSession { carried, pol, cont } => {
                S::in_session((**carried).clone(), pol.dual(), (**cont).clone())
            }
            S::OutSession { carried, pol, cont } => {
                S::out_session((**carried).clone(), pol.dual(), (**cont).clone())
            }
            S::Branch(arms) | S::Select(arms) | S::Spec { arms, .. } => {
                let mut v = arms.clone().into_vec();
                if v.len() > 1 && g.chance(0.5) {
                    let i = g.rng.gen_range(0..v.len());
                    v.remove(i);
                } else {
                    let taken: Vec<Label> = v.iter().map(|(l, _)| l.clone()).collect();
                    match g.fresh_label(&taken) {
                        Some(l) => v.push((l, g.padding(1))),
                        None => return S::End,
                    }
                }
                let arms = Arms::new(v).unwrap();
                match t {
                    S::Branch(_) => S::Branch(arms),
                    S::Select(_) => S::Select(arms),
                    S::Spec { prioritized, .. } => S::Spec {
                        arms,
                        prioritized: *prioritized,
                    },
                    _ => unreachable!(),
                }
            }
        };
    }
    match t {
        S::End => S::End,
        S::InValue(h, c) => S::input(h.clone(), mutate_at(g, c, target, counter)),
        S::OutValue(h, c) => S::output(h.clone(), mutate_at(g, c, target, counter)),
        S::InSession { carried, pol, cont } => {
            let carried = mutate_at(g, carried, target, counter);
            S::in_session(carried, *pol, mutate_at(g, cont, target, counter))
        }
        S::OutSession { carried, pol, cont } => {
            let carried = mutate_at(g, carried, target, counter);
            S::out_session(carried, *pol, mutate_at(g, cont, target, counter))
        }
        S::Branch(arms) => S::Branch(mutate_arms(g, arms, target, counter)),
        S::Select(arms) => S::Select(mutate_arms(g, arms, target, counter)),
        S::Spec { arms, prioritized } => S::Spec {
            arms: mutate_arms(g, arms, target, counter),
            prioritized: *prioritized,
        },
    }
}

fn mutate_arms(g: &mut Gen, arms: &Arms<SessionType>, target: usize, counter: &mut usize) -> Arms<SessionType> {
    let v = arms
        .iter()
        .map(|(l, t)| (l.clone(), mutate_at(g, t, target, counter)))
        .collect();
    Arms::new(v).unwrap()
}

/// A client/server pair for the synthesis suite: a third compliant by
/// construction, a third one edit away from that, a third independent.
pub fn gen_synth_pair(seed: u64, max_depth: usize) -> (SessionType, SessionType) {
    let mut g = Gen::new(seed);
    let sub = g.rng.gen::<u64>();
    match g.rng.gen_range(0..3) {
        0 => {
            let (c, s, _) = gen_compliant_pair(sub, max_depth);
            (c, s)
        }
        1 => {
            let (c, s, _) = gen_compliant_pair(sub, max_depth);
            if g.chance(0.5) {
                (mutate_type(sub ^ 1, &c), s)
            } else {
                (c, mutate_type(sub ^ 1, &s))
            }
        }
        _ => (
            gen_type(sub, max_depth, true, g.chance(0.3)),
            gen_type(sub ^ 1, max_depth, true, false),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compliance::{check_compliance, oracle_compliant};
    use crate::semantics::SemanticsMode;
    use crate::syntax::Context;
    use crate::typecheck::typecheck;

    fn labels_distinct(t: &SessionType) -> bool {
        use SessionType as S;
        match t {
            S::End => true,
            S::InValue(_, c) | S::OutValue(_, c) => labels_distinct(c),
            S::InSession { carried, cont, .. } | S::OutSession { carried, cont, .. } => {
                labels_distinct(carried) && labels_distinct(cont)
            }
            S::Branch(a) | S::Select(a) | S::Spec { arms: a, .. } => {
                a.label_set().len() == a.len() && (1..=3).contains(&a.len()) && a.iter().all(|(_, t)| labels_distinct(t))
            }
        }
    }

    #[test]
    fn depth_zero_is_end() {
        assert_eq!(gen_type(7, 0, true, false), SessionType::End);
        let (c, s, f) = gen_compliant_pair(7, 0);
        assert_eq!((c, s, f), (SessionType::End, SessionType::End, Orchestrator::Idle));
    }

    #[test]
    fn generation_is_reproducible() {
        for seed in 0..20 {
            assert_eq!(gen_type(seed, 4, true, true), gen_type(seed, 4, true, true));
            assert_eq!(gen_typed_process(seed, 2, 3), gen_typed_process(seed, 2, 3));
        }
    }

    #[test]
    fn types_respect_depth_and_width() {
        for seed in 0..300 {
            let t = gen_type(seed, 4, seed % 2 == 0, false);
            assert!(t.depth() <= 4);
            assert!(labels_distinct(&t));
            if seed % 2 == 1 {
                assert!(t.is_spec_free());
            }
        }
    }

    #[test]
    fn pairs_are_compliant() {
        for seed in 0..300 {
            let (c, s, f) = gen_compliant_pair(seed, 5);
            assert!(c.depth() <= 5 && s.depth() <= 5);
            assert!(check_compliance(&f, &c, &s), "seed {seed}");
            assert_eq!(oracle_compliant(&c, &s, 64), Ok(true), "seed {seed}");
        }
    }

    #[test]
    fn smallest_process_is_one_session() {
        let p = gen_typed_process(3, 1, 1);
        let parts = p.par_components();
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().any(|t| matches!(t, Process::Request { .. })));
        assert!(parts.iter().any(|t| matches!(t, Process::Accept { .. })));
    }

    #[test]
    fn processes_are_closed_and_typed() {
        for seed in 0..200 {
            let p = gen_typed_process(seed, 1 + (seed as usize % 3), 4);
            let d = typecheck(&Context::new(), &p, SemanticsMode::Plain)
                .unwrap_or_else(|e| panic!("seed {seed}: {e}\n{p:?}"));
            assert!(d.without_ends().is_empty(), "seed {seed}");
        }
    }
}

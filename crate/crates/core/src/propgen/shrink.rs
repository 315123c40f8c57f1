use crate::syntax::{Arms, Process, SessionType};

/// Values with a notion of structurally smaller variants.
pub trait Shrink: Sized + Clone {
    fn weight(&self) -> usize;

    /// Candidates, not necessarily lighter; `shrink` filters them.
    fn candidates(&self) -> Vec<Self>;
}

/// Greedily replaces `x` by a strictly lighter candidate on which `fails`
/// still holds, until none is left.
pub fn shrink<T: Shrink>(mut x: T, mut fails: impl FnMut(&T) -> bool) -> T {
    loop {
        let w = x.weight();
        match x.candidates().into_iter().find(|c| c.weight() < w && fails(c)) {
            Some(c) => x = c,
            None => return x,
        }
    }
}

fn arms_variants<T: Clone>(arms: &Arms<T>, shrink_one: impl Fn(&T) -> Vec<T>) -> Vec<Arms<T>> {
    let v = arms.as_slice();
    let mut out = Vec::new();
    if v.len() > 1 {
        for i in 0..v.len() {
            let mut w = v.to_vec();
            w.remove(i);
            out.push(Arms::new(w).unwrap());
        }
    }
    for (i, (_, t)) in v.iter().enumerate() {
        for c in shrink_one(t) {
            let mut w = v.to_vec();
            w[i].1 = c;
            out.push(Arms::new(w).unwrap());
        }
    }
    out
}

/// The body of a prefix or of a request/accept.
pub(super) fn continuation(p: &Process) -> &Process {
    match p {
        Process::Request { body, .. } | Process::Accept { body, .. } => body,
        Process::Send { cont, .. }
        | Process::Recv { cont, .. }
        | Process::Throw { cont, .. }
        | Process::Catch { cont, .. }
        | Process::Select { cont, .. } => cont,
        _ => panic!("not a prefix"),
    }
}

pub(super) fn with_continuation(p: &Process, c: Process) -> Process {
    let mut q = p.clone();
    match &mut q {
        Process::Request { body, .. } | Process::Accept { body, .. } => **body = c,
        Process::Send { cont, .. }
        | Process::Recv { cont, .. }
        | Process::Throw { cont, .. }
        | Process::Catch { cont, .. }
        | Process::Select { cont, .. } => **cont = c,
        _ => panic!("not a prefix"),
    }
    q
}

impl Shrink for SessionType {
    fn weight(&self) -> usize {
        self.size()
    }

    fn candidates(&self) -> Vec<Self> {
        use SessionType as S;
        let mut out = Vec::new();
        if !self.is_end() {
            out.push(S::End);
        }
        match self {
            S::End => {}
            S::InValue(g, c) | S::OutValue(g, c) => {
                out.push((**c).clone());
                let rebuild = |c| match self {
                    S::InValue(..) => S::input(g.clone(), c),
                    _ => S::output(g.clone(), c),
                };
                out.extend(c.candidates().into_iter().map(rebuild));
            }
            S::InSession { carried, pol, cont } | S::OutSession { carried, pol, cont } => {
                out.push((**cont).clone());
                let input = matches!(self, S::InSession { .. });
                let rebuild = |a: SessionType, b: SessionType| {
                    if input {
                        S::in_session(a, *pol, b)
                    } else {
                        S::out_session(a, *pol, b)
                    }
                };
                for a in carried.candidates() {
                    out.push(rebuild(a, (**cont).clone()));
                }
                for b in cont.candidates() {
                    out.push(rebuild((**carried).clone(), b));
                }
            }
            S::Branch(arms) | S::Select(arms) | S::Spec { arms, .. } => {
                out.extend(arms.iter().map(|(_, t)| t.clone()));
                for a in arms_variants(arms, |t| t.candidates()) {
                    out.push(match self {
                        S::Branch(_) => S::Branch(a),
                        S::Select(_) => S::Select(a),
                        S::Spec { prioritized, .. } => S::Spec {
                            arms: a,
                            prioritized: *prioritized,
                        },
                        _ => unreachable!(),
                    });
                }
            }
        }
        out
    }
}

impl<A: Shrink, B: Shrink> Shrink for (A, B) {
    fn weight(&self) -> usize {
        self.0.weight() + self.1.weight()
    }

    fn candidates(&self) -> Vec<Self> {
        let mut out: Vec<Self> = self.0.candidates().into_iter().map(|a| (a, self.1.clone())).collect();
        out.extend(self.1.candidates().into_iter().map(|b| (self.0.clone(), b)));
        out
    }
}

impl Shrink for Process {
    fn weight(&self) -> usize {
        self.size()
    }

    fn candidates(&self) -> Vec<Self> {
        use Process as P;
        let mut out = Vec::new();
        if *self != P::Inact {
            out.push(P::Inact);
        }
        let boxed = |p: Process| Box::new(p);
        match self {
            P::Inact | P::Orch { .. } => {}
            P::Par(a, b) => {
                out.push((**a).clone());
                out.push((**b).clone());
                out.extend(a.candidates().into_iter().map(|x| P::par(x, (**b).clone())));
                out.extend(b.candidates().into_iter().map(|y| P::par((**a).clone(), y)));
            }
            P::If { cond, then, els } => {
                out.push((**then).clone());
                out.push((**els).clone());
                out.extend(then.candidates().into_iter().map(|t| P::If {
                    cond: cond.clone(),
                    then: boxed(t),
                    els: els.clone(),
                }));
                out.extend(els.candidates().into_iter().map(|e| P::If {
                    cond: cond.clone(),
                    then: then.clone(),
                    els: boxed(e),
                }));
            }
            P::Branch { chan, arms } => {
                for a in arms_variants(arms, |t| t.candidates()) {
                    out.push(P::Branch {
                        chan: chan.clone(),
                        arms: a,
                    });
                }
            }
            P::Spec { chan, arms, prioritized } => {
                for a in arms_variants(arms, |t| t.candidates()) {
                    out.push(P::Spec {
                        chan: chan.clone(),
                        arms: a,
                        prioritized: *prioritized,
                    });
                }
            }
            P::Restrict { chan, body } => {
                out.extend(body.candidates().into_iter().map(|b| P::restrict(chan, b)));
            }
            _ => {
                let inner = continuation(self);
                out.push(inner.clone());
                out.extend(inner.candidates().into_iter().map(|c| with_continuation(self, c)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_process, parse_type};

    #[test]
    fn shrinks_type_to_minimal_failing_part() {
        let t = parse_type("?Nat.&{a: !Bool.end, b: +{c: !String.end}}").unwrap();
        let has_string = |t: &SessionType| crate::surface::pretty_type(t).contains("String");
        let small = shrink(t, has_string);
        assert_eq!(small, parse_type("!String.end").unwrap());
    }

    #[test]
    fn shrinking_is_idempotent() {
        let t = parse_type("?Nat.!Nat.?Bool.end").unwrap();
        let pred = |t: &SessionType| t.depth() >= 2;
        let once = shrink(t, pred);
        assert_eq!(shrink(once.clone(), pred), once);
    }

    #[test]
    fn shrinking_terminates_when_everything_fails() {
        let p = parse_process("request a:(!Nat)(k).k!<1> | accept a:(?Nat)(k).k?(x)").unwrap();
        assert_eq!(shrink(p, |_| true), Process::Inact);
    }
}

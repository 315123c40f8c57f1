//! Run-time processes and the one-step rewrites generating `≡`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen_orch;
use super::shrink::{continuation, with_continuation};
use crate::syntax::{
    all_channel_names, free_channels, fresh_name, rename_channel, Arms, ChannelRef, Expression,
    Label, Polarity, Process, SessionType,
};

fn random_tree(rng: &mut ChaCha8Rng, mut parts: Vec<Process>) -> Process {
    parts.shuffle(rng);
    while parts.len() > 1 {
        let i = rng.gen_range(0..parts.len() - 1);
        let b = parts.remove(i + 1);
        let a = parts.remove(i);
        parts.insert(i, Process::par(a, b));
    }
    parts.pop().unwrap_or(Process::Inact)
}

fn thread(rng: &mut ChaCha8Rng, ends: &[ChannelRef], fuel: usize, next_var: &mut usize) -> Process {
    if fuel == 0 || ends.is_empty() || rng.gen_bool(0.15) {
        return Process::Inact;
    }
    let k = ends.choose(rng).unwrap().clone();
    match rng.gen_range(0..5) {
        0 => Process::send(k, Expression::nat(rng.gen_range(0..5)), thread(rng, ends, fuel - 1, next_var)),
        1 => {
            *next_var += 1;
            let x = format!("y{next_var}");
            let cont = thread(rng, ends, fuel - 1, next_var);
            let cont = if rng.gen_bool(0.5) {
                Process::send(k.clone(), Expression::var(&x), cont)
            } else {
                cont
            };
            Process::recv(k, &x, cont)
        }
        2 => {
            let l = Label::from_static(["a", "b", "c"].choose(rng).unwrap());
            Process::select(k, l, thread(rng, ends, fuel - 1, next_var))
        }
        3 => {
            let arms = vec![
                (Label::from_static("a"), thread(rng, ends, fuel - 1, next_var)),
                (Label::from_static("b"), thread(rng, ends, fuel - 1, next_var)),
            ];
            Process::Branch {
                chan: k,
                arms: Arms::new(arms).unwrap(),
            }
        }
        _ => {
            // a user-level binder, renamed by the canonical form
            let body = Process::send(ChannelRef::plain("z"), Expression::nat(1), Process::Inact);
            Process::request("a", SessionType::output(crate::syntax::GroundType::nat(), SessionType::End), "z", body)
        }
    }
}

/// A random run-time process: up to three orchestrated sessions, nested in
/// random order, with threads placed anywhere inside the scope of the
/// sessions they use.
pub fn gen_runtime(seed: u64) -> Process {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=3);
    let names: Vec<String> = (0..n).map(|i| format!("k{i}")).collect();
    let mut by_level: Vec<Vec<Process>> = vec![Vec::new(); n + 1];
    let mut next_var = 0;
    for _ in 0..rng.gen_range(1..=4) {
        let used: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let mut ends = Vec::new();
        for i in &used {
            let pol = if rng.gen_bool(0.5) { Polarity::Minus } else { Polarity::Plus };
            ends.push(ChannelRef::polarized(&names[*i], pol));
        }
        if rng.gen_bool(0.2) {
            ends.push(ChannelRef::plain("free"));
        }
        let lowest = used.iter().map(|i| i + 1).max().unwrap_or(0);
        let level = rng.gen_range(lowest..=n);
        by_level[level].push(thread(&mut rng, &ends, 3, &mut next_var));
    }
    let mut inner: Option<Process> = None;
    for level in (0..=n).rev() {
        let mut parts = std::mem::take(&mut by_level[level]);
        parts.extend(inner.take());
        let body = random_tree(&mut rng, parts);
        inner = Some(if level == 0 {
            body
        } else {
            let k = &names[level - 1];
            let orch = Process::orch(k, gen_orch(rng.gen(), 2));
            let body = if body == Process::Inact { orch } else { Process::par(orch, body) };
            Process::restrict(k, body)
        });
    }
    inner.unwrap()
}

fn is_orch(p: &Process) -> bool {
    matches!(p, Process::Orch { .. })
}

/// `(νk)(orch_k | Q | (νk')(orch_k' | Q' | R))` as its parts.
fn nested(p: &Process) -> Option<(&str, &Process, &Process, &str, &Process, &Process, &Process)> {
    let Process::Restrict { chan: k, body } = p else { return None };
    let Process::Par(o, rest) = &**body else { return None };
    let Process::Par(q, inner) = &**rest else { return None };
    let Process::Restrict { chan: k2, body: body2 } = &**inner else { return None };
    let Process::Par(o2, rest2) = &**body2 else { return None };
    let Process::Par(q2, r) = &**rest2 else { return None };
    let ok = matches!(&**o, Process::Orch { chan, .. } if chan == k)
        && matches!(&**o2, Process::Orch { chan, .. } if chan == k2);
    ok.then_some((k, o, q, k2, o2, q2, r))
}

/// `(νk')(orch_k' | (νk)(orch_k | Q | Q') | R)` as its parts.
fn extruded(p: &Process) -> Option<(&str, &Process, &Process, &str, &Process, &Process, &Process)> {
    let Process::Restrict { chan: k2, body } = p else { return None };
    let Process::Par(o2, rest) = &**body else { return None };
    let Process::Par(inner, r) = &**rest else { return None };
    let Process::Restrict { chan: k, body: body1 } = &**inner else { return None };
    let Process::Par(o, qs) = &**body1 else { return None };
    let Process::Par(q, q2) = &**qs else { return None };
    let ok = matches!(&**o, Process::Orch { chan, .. } if chan == k)
        && matches!(&**o2, Process::Orch { chan, .. } if chan == k2);
    ok.then_some((k, o, q, k2, o2, q2, r))
}

fn at_root(p: &Process) -> Vec<Process> {
    use Process as P;
    let mut out = Vec::new();
    if let P::Par(x, y) = p {
        if !is_orch(x) && !is_orch(y) {
            out.push(P::par((**y).clone(), (**x).clone()));
        }
        if let P::Par(y1, z) = &**y {
            if ![&**x, &**y1, &**z].into_iter().any(is_orch) {
                out.push(P::par(P::par((**x).clone(), (**y1).clone()), (**z).clone()));
            }
        }
        if let P::Par(x1, y1) = &**x {
            if ![&**x1, &**y1, &**y].into_iter().any(is_orch) {
                out.push(P::par((**x1).clone(), P::par((**y1).clone(), (**y).clone())));
            }
        }
    }
    if let P::Restrict { chan, body } | P::Request { chan, body, .. } | P::Accept { chan, body, .. } = p {
        let fresh = fresh_name("r", &all_channel_names(p));
        let body = Box::new(rename_channel(body, chan, &fresh));
        out.push(match p {
            P::Restrict { .. } => P::Restrict { chan: fresh, body },
            P::Request { port, ty, .. } => P::Request { port: port.clone(), ty: ty.clone(), chan: fresh, body },
            P::Accept { port, ty, .. } => P::Accept { port: port.clone(), ty: ty.clone(), chan: fresh, body },
            _ => unreachable!(),
        });
    }
    let side = |k: &str, k2: &str, q: &Process, r: &Process| {
        k != k2 && !free_channels(r).contains(k) && !free_channels(q).contains(k2)
    };
    if let Some((k, o, q, k2, o2, q2, r)) = nested(p) {
        if side(k, k2, q, r) {
            let inner = P::restrict(k, P::par(o.clone(), P::par(q.clone(), q2.clone())));
            out.push(P::restrict(k2, P::par(o2.clone(), P::par(inner, r.clone()))));
        }
    }
    if let Some((k, o, q, k2, o2, q2, r)) = extruded(p) {
        if side(k, k2, q, r) {
            let inner = P::restrict(k2, P::par(o2.clone(), P::par(q2.clone(), r.clone())));
            out.push(P::restrict(k, P::par(o.clone(), P::par(q.clone(), inner))));
        }
    }
    out
}

/// Every process one rewrite away from `p`, rewriting in any context.
pub fn rewrite_neighbours(p: &Process) -> Vec<Process> {
    use Process as P;
    let mut out = at_root(p);
    let wrap = |out: &mut Vec<Process>, child: &Process, f: &dyn Fn(Process) -> Process| {
        out.extend(rewrite_neighbours(child).into_iter().map(f));
    };
    match p {
        P::Inact | P::Orch { .. } => {}
        P::Par(a, b) => {
            wrap(&mut out, a, &|x| P::par(x, (**b).clone()));
            wrap(&mut out, b, &|y| P::par((**a).clone(), y));
        }
        P::Restrict { chan, body } => wrap(&mut out, body, &|b| P::restrict(chan, b)),
        P::If { cond, then, els } => {
            wrap(&mut out, then, &|t| P::if_then_else(cond.clone(), t, (**els).clone()));
            wrap(&mut out, els, &|e| P::if_then_else(cond.clone(), (**then).clone(), e));
        }
        P::Branch { chan, arms } | P::Spec { chan, arms, .. } => {
            for (i, (_, q)) in arms.iter().enumerate() {
                wrap(&mut out, q, &|q2| {
                    let mut v = arms.as_slice().to_vec();
                    v[i].1 = q2;
                    let arms = Arms::new(v).unwrap();
                    match p {
                        P::Spec { prioritized, .. } => P::Spec {
                            chan: chan.clone(),
                            arms,
                            prioritized: *prioritized,
                        },
                        _ => P::Branch { chan: chan.clone(), arms },
                    }
                });
            }
        }
        _ => wrap(&mut out, continuation(p), &|c| with_continuation(p, c)),
    }
    out
}

/// A random walk of `steps` congruence rewrites from `p`.
pub fn rewrite_walk(seed: u64, p: &Process, steps: usize) -> Process {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = p.clone();
    for _ in 0..steps {
        let next = rewrite_neighbours(&cur);
        match next.choose(&mut rng) {
            Some(q) => cur = q.clone(),
            None => break,
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_process;

    #[test]
    fn extrusion_respects_side_conditions() {
        let p = parse_process("(new k)(orch k {1} | (k^-!<1> | (new j)(orch j {1} | (j^+?(x) | k^+?(y)))))").unwrap();
        let n = rewrite_neighbours(&p);
        assert!(!n.iter().any(|q| matches!(q, Process::Restrict { chan, .. } if chan == "j")));
        let p = parse_process("(new k)(orch k {1} | (k^-!<1> | (new j)(orch j {1} | (j^+?(x) | 0))))").unwrap();
        let n = rewrite_neighbours(&p);
        assert!(n.iter().any(|q| matches!(q, Process::Restrict { chan, .. } if chan == "j")));
    }

    #[test]
    fn orchestrators_are_not_commuted() {
        let p = parse_process("(new k)(orch k {1} | 0)").unwrap();
        let n = rewrite_neighbours(&p);
        assert!(n.iter().all(|q| matches!(q, Process::Restrict { body, .. } if matches!(&**body, Process::Par(o, _) if is_orch(o)))));
    }

    #[test]
    fn runtime_generation_is_scoped() {
        for seed in 0..200 {
            let p = gen_runtime(seed);
            let free = free_channels(&p);
            assert!(free.iter().all(|n| n == "free"), "seed {seed}: {free:?}");
        }
    }
}

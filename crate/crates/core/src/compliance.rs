//! Orchestrated compliance `f : S ⊣ S'` and orchestrator synthesis.

use thiserror::Error;

use crate::syntax::{Arms, Label, Orchestrator, SessionType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthResult {
    Ok(Orchestrator),
    Fail,
}

impl SynthResult {
    pub fn ok(self) -> Option<Orchestrator> {
        match self {
            SynthResult::Ok(f) => Some(f),
            SynthResult::Fail => None,
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, SynthResult::Fail)
    }
}

impl From<Option<Orchestrator>> for SynthResult {
    fn from(f: Option<Orchestrator>) -> Self {
        f.map_or(SynthResult::Fail, SynthResult::Ok)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthMode {
    /// First safe speculative option in list order; deterministic result.
    Priority,
    /// Every safe speculative option, joined by internal choice.
    AllSafe,
}

/// Carried types of a delegation must agree up to arm order.
fn same_carried(c1: &SessionType, c2: &SessionType) -> bool {
    c1.equivalent(c2)
}

/// Decides `f : client ⊣ server`.
pub fn check_compliance(f: &Orchestrator, client: &SessionType, server: &SessionType) -> bool {
    use SessionType as S;
    match f {
        Orchestrator::Idle => client.is_end(),
        Orchestrator::Io(g) => match (client, server) {
            (S::InValue(a, c), S::OutValue(b, s)) | (S::OutValue(a, c), S::InValue(b, s)) => {
                a == b && check_compliance(g, c, s)
            }
            (
                S::InSession { carried: c1, pol: p1, cont: c },
                S::OutSession { carried: c2, pol: p2, cont: s },
            )
            | (
                S::OutSession { carried: c1, pol: p1, cont: c },
                S::InSession { carried: c2, pol: p2, cont: s },
            ) => p1 == p2 && same_carried(c1, c2) && check_compliance(g, c, s),
            _ => false,
        },
        Orchestrator::Prefix(..) | Orchestrator::External(_) | Orchestrator::Internal(_) => {
            let external = f.as_external().is_some_and(|arms| match (client, server) {
                (S::Select(sel), S::Branch(br)) => covers(&arms, sel, br, |g, a, b| check_compliance(g, a, b)),
                (S::Branch(br), S::Select(sel)) => covers(&arms, sel, br, |g, b, a| check_compliance(g, a, b)),
                _ => false,
            });
            let internal = || {
                f.as_internal().is_some_and(|arms| match (client, server) {
                    (S::Spec { arms: sp, .. }, S::Branch(br)) => arms.iter().all(|(l, g)| {
                        matches!((sp.get(l), br.get(l)), (Some(a), Some(b)) if check_compliance(g, a, b))
                    }),
                    (S::Branch(br), S::Spec { arms: sp, .. }) => arms.iter().all(|(l, g)| {
                        matches!((br.get(l), sp.get(l)), (Some(a), Some(b)) if check_compliance(g, a, b))
                    }),
                    _ => false,
                })
            };
            external || internal()
        }
    }
}

/// External-choice arms must be exactly the selection's labels, each offered
/// by the branching, with compliant continuations. `ok` receives the
/// selection side first.
fn covers(
    arms: &[(&Label, &Orchestrator)],
    sel: &Arms<SessionType>,
    br: &Arms<SessionType>,
    ok: impl Fn(&Orchestrator, &SessionType, &SessionType) -> bool,
) -> bool {
    arms.len() == sel.len()
        && arms.iter().all(|(l, g)| match (sel.get(l), br.get(l)) {
            (Some(a), Some(b)) => ok(g, a, b),
            _ => false,
        })
}

/// Deterministic synthesis: speculative choices resolve to the first safe
/// option in list order.
pub fn synth(client: &SessionType, server: &SessionType) -> SynthResult {
    synth_with(SynthMode::Priority, client, server).into()
}

/// Synthesis keeping every safe speculative option.
pub fn synth_ud(client: &SessionType, server: &SessionType) -> SynthResult {
    synth_with(SynthMode::AllSafe, client, server).into()
}

pub fn synthesize(mode: SynthMode, client: &SessionType, server: &SessionType) -> SynthResult {
    synth_with(mode, client, server).into()
}

fn synth_with(mode: SynthMode, client: &SessionType, server: &SessionType) -> Option<Orchestrator> {
    use SessionType as S;
    let rec = |a: &SessionType, b: &SessionType| synth_with(mode, a, b);
    match (client, server) {
        (S::End, _) => Some(Orchestrator::Idle),
        (S::InValue(a, c), S::OutValue(b, s)) | (S::OutValue(a, c), S::InValue(b, s)) if a == b => {
            rec(c, s).map(Orchestrator::io)
        }
        (
            S::InSession { carried: c1, pol: p1, cont: c },
            S::OutSession { carried: c2, pol: p2, cont: s },
        )
        | (
            S::OutSession { carried: c1, pol: p1, cont: c },
            S::InSession { carried: c2, pol: p2, cont: s },
        ) if p1 == p2 && same_carried(c1, c2) => rec(c, s).map(Orchestrator::io),
        (S::Branch(br), S::Spec { arms: sp, .. }) => {
            // Candidates follow the speculative list's order.
            let pairs = sp.iter().filter_map(|(l, b)| br.get(l).map(|a| (l, a, b)));
            spec_choice(mode, pairs)
        }
        (S::Spec { arms: sp, .. }, S::Branch(br)) => {
            let pairs = sp.iter().filter_map(|(l, a)| br.get(l).map(|b| (l, a, b)));
            spec_choice(mode, pairs)
        }
        (S::Select(sel), S::Branch(br)) => {
            let mut arms = Vec::with_capacity(sel.len());
            for (l, a) in sel {
                arms.push((l.clone(), rec(a, br.get(l)?)?));
            }
            Some(Orchestrator::external_arms(Arms::new(arms).ok()?))
        }
        (S::Branch(br), S::Select(sel)) => {
            let mut arms = Vec::with_capacity(sel.len());
            for (l, b) in sel {
                arms.push((l.clone(), rec(br.get(l)?, b)?));
            }
            Some(Orchestrator::external_arms(Arms::new(arms).ok()?))
        }
        _ => None,
    }
}

fn spec_choice<'a>(
    mode: SynthMode,
    pairs: impl Iterator<Item = (&'a Label, &'a SessionType, &'a SessionType)>,
) -> Option<Orchestrator> {
    match mode {
        SynthMode::Priority => {
            for (l, a, b) in pairs {
                if let Some(f) = synth_with(mode, a, b) {
                    return Some(Orchestrator::prefix(l.clone(), f));
                }
            }
            None
        }
        SynthMode::AllSafe => {
            let safe: Vec<(Label, Orchestrator)> = pairs
                .filter_map(|(l, a, b)| synth_with(mode, a, b).map(|f| (l.clone(), f)))
                .collect();
            if safe.is_empty() {
                return None;
            }
            Some(Orchestrator::internal_arms(Arms::new(safe).ok()?))
        }
    }
}

/// No internal choice occurs in `f`.
pub fn is_deterministic(f: &Orchestrator) -> bool {
    match f {
        Orchestrator::Idle => true,
        Orchestrator::Io(g) | Orchestrator::Prefix(_, g) => is_deterministic(g),
        Orchestrator::External(arms) => arms.iter().all(|(_, g)| is_deterministic(g)),
        Orchestrator::Internal(_) => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("derivation search exceeded depth {0}")]
pub struct DepthExceeded(pub usize);

/// Brute-force decision of `client ⊣ server` by searching for a derivation.
///
/// At every node all four clauses are tried; the speculative clause tries
/// every nonempty subset of the common labels. Kept deliberately separate
/// from [`synth`] so that the two can be checked against each other.
pub fn oracle_compliant(
    client: &SessionType,
    server: &SessionType,
    depth_limit: usize,
) -> Result<bool, DepthExceeded> {
    search(client, server, depth_limit, depth_limit)
}

fn search(c: &SessionType, s: &SessionType, budget: usize, limit: usize) -> Result<bool, DepthExceeded> {
    use SessionType as S;
    if matches!(c, S::End) {
        return Ok(true);
    }
    if budget == 0 {
        return Err(DepthExceeded(limit));
    }
    let next = budget - 1;
    let mut derivable = false;

    // I/O prefix.
    let io = match (c, s) {
        (S::InValue(g1, a), S::OutValue(g2, b)) | (S::OutValue(g1, a), S::InValue(g2, b)) => {
            (g1 == g2).then_some((a, b))
        }
        (S::InSession { carried: x, pol: p, cont: a }, S::OutSession { carried: y, pol: q, cont: b })
        | (S::OutSession { carried: x, pol: p, cont: a }, S::InSession { carried: y, pol: q, cont: b }) => {
            (p == q && x.equivalent(y)).then_some((a, b))
        }
        _ => None,
    };
    if let Some((a, b)) = io {
        derivable |= search(a, b, next, limit)?;
    }

    // External choice: every selected label must be answered.
    let ext = match (c, s) {
        (S::Select(sel), S::Branch(br)) => Some((sel, br, true)),
        (S::Branch(br), S::Select(sel)) => Some((sel, br, false)),
        _ => None,
    };
    if let Some((sel, br, client_selects)) = ext {
        let mut all = true;
        for (l, x) in sel.as_slice() {
            let Some(y) = br.as_slice().iter().find(|(m, _)| m == l).map(|(_, y)| y) else {
                all = false;
                continue;
            };
            let ok = if client_selects { search(x, y, next, limit)? } else { search(y, x, next, limit)? };
            all &= ok;
        }
        derivable |= all;
    }

    // Internal choice: some nonempty H within the common labels.
    let int = match (c, s) {
        (S::Spec { arms: sp, .. }, S::Branch(br)) => Some((sp, br, true)),
        (S::Branch(br), S::Spec { arms: sp, .. }) => Some((sp, br, false)),
        _ => None,
    };
    if let Some((sp, br, client_spec)) = int {
        let common: Vec<(&SessionType, &SessionType)> = sp
            .as_slice()
            .iter()
            .filter_map(|(l, x)| {
                br.as_slice().iter().find(|(m, _)| m == l).map(|(_, y)| if client_spec { (x, y) } else { (y, x) })
            })
            .collect();
        let n = common.len();
        for mask in 1u32..(1u32 << n) {
            let mut all = true;
            for (i, (a, b)) in common.iter().enumerate() {
                if mask & (1 << i) != 0 && !search(a, b, next, limit)? {
                    all = false;
                    break;
                }
            }
            if all {
                derivable = true;
                break;
            }
        }
    }
    Ok(derivable)
}

/// Mirrors a speculation-free type with I/O prefixes and full external
/// choices: the orchestrator relating a type to its mechanical dual.
pub fn full_dual_orch(s: &SessionType) -> Option<Orchestrator> {
    use SessionType as S;
    Some(match s {
        S::End => Orchestrator::Idle,
        S::InValue(_, c) | S::OutValue(_, c) => Orchestrator::io(full_dual_orch(c)?),
        S::InSession { cont, .. } | S::OutSession { cont, .. } => Orchestrator::io(full_dual_orch(cont)?),
        S::Branch(arms) | S::Select(arms) => {
            Orchestrator::external_arms(arms.try_map(|t| full_dual_orch(t).ok_or(())).ok()?)
        }
        S::Spec { .. } => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::GroundType;

    fn l(s: &str) -> Label {
        Label::from_static(s)
    }

    fn out_nat() -> SessionType {
        SessionType::output(GroundType::nat(), SessionType::End)
    }

    #[test]
    fn idle_accepts_finished_client() {
        assert!(check_compliance(&Orchestrator::Idle, &SessionType::End, &out_nat()));
        assert!(!check_compliance(&Orchestrator::Idle, &out_nat(), &SessionType::End));
    }

    #[test]
    fn two_outputs_never_comply() {
        let f = Orchestrator::io(Orchestrator::Idle);
        assert!(!check_compliance(&f, &out_nat(), &out_nat()));
        assert_eq!(synth(&out_nat(), &out_nat()), SynthResult::Fail);
        assert_eq!(synth_ud(&out_nat(), &out_nat()), SynthResult::Fail);
        assert_eq!(oracle_compliant(&out_nat(), &out_nat(), 8), Ok(false));
    }

    #[test]
    fn empty_intersection_is_not_compliant() {
        let c = SessionType::spec(vec![(l("a"), SessionType::End)], false).unwrap();
        let s = SessionType::branch(vec![(l("b"), SessionType::End)]).unwrap();
        assert_eq!(oracle_compliant(&c, &s, 8), Ok(false));
        assert!(synth(&c, &s).is_fail());
    }

    #[test]
    fn end_synthesizes_idle() {
        assert_eq!(synth(&SessionType::End, &out_nat()), SynthResult::Ok(Orchestrator::Idle));
        assert_eq!(synth_ud(&SessionType::End, &SessionType::End), SynthResult::Ok(Orchestrator::Idle));
    }

    #[test]
    fn branch_may_offer_more_than_selected() {
        let c = SessionType::select(vec![(l("a"), SessionType::End)]).unwrap();
        let s = SessionType::branch(vec![(l("a"), out_nat()), (l("b"), SessionType::End)]).unwrap();
        let f = Orchestrator::prefix(l("a"), Orchestrator::Idle);
        assert!(check_compliance(&f, &c, &s));
        assert_eq!(synth(&c, &s), SynthResult::Ok(f));
        // The selection must be covered by the external choice exactly.
        let too_many = Orchestrator::external(vec![(l("a"), Orchestrator::Idle), (l("b"), Orchestrator::Idle)]).unwrap();
        assert!(!check_compliance(&too_many, &c, &s));
    }

    #[test]
    fn priority_picks_first_safe_option() {
        let bad = out_nat();
        let c = SessionType::spec(
            vec![(l("x"), bad.clone()), (l("y"), SessionType::End), (l("z"), SessionType::End)],
            true,
        )
        .unwrap();
        let s = SessionType::branch(vec![
            (l("z"), SessionType::End),
            (l("y"), SessionType::End),
            (l("x"), bad),
        ])
        .unwrap();
        assert_eq!(synth(&c, &s), SynthResult::Ok(Orchestrator::prefix(l("y"), Orchestrator::Idle)));
        let ud = synth_ud(&c, &s).ok().unwrap();
        assert_eq!(
            ud,
            Orchestrator::internal(vec![(l("y"), Orchestrator::Idle), (l("z"), Orchestrator::Idle)]).unwrap()
        );
        assert!(!is_deterministic(&ud));
        assert!(check_compliance(&ud, &c, &s));
    }

    #[test]
    fn delegation_requires_same_carried_type_and_polarity() {
        let carried = out_nat();
        let c = SessionType::in_session(carried.clone(), crate::syntax::Polarity::Minus, SessionType::End);
        let s = SessionType::out_session(carried.clone(), crate::syntax::Polarity::Minus, SessionType::End);
        let s_bad = SessionType::out_session(carried, crate::syntax::Polarity::Plus, SessionType::End);
        let f = Orchestrator::io(Orchestrator::Idle);
        assert!(check_compliance(&f, &c, &s));
        assert!(!check_compliance(&f, &c, &s_bad));
    }

    #[test]
    fn compliance_is_client_biased() {
        assert!(check_compliance(&Orchestrator::Idle, &SessionType::End, &out_nat()));
        assert_eq!(oracle_compliant(&out_nat(), &SessionType::End, 4), Ok(false));
    }

    #[test]
    fn oracle_reports_depth_exhaustion() {
        let deep = SessionType::output(GroundType::nat(), out_nat());
        let dual = deep.mechanical_dual().unwrap();
        assert_eq!(oracle_compliant(&deep, &dual, 1), Err(DepthExceeded(1)));
        assert_eq!(oracle_compliant(&deep, &dual, 3), Ok(true));
    }
}

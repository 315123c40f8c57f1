//! Partially known session types with unification.

use std::collections::BTreeSet;

use crate::syntax::{Arms, GroundType, Label, Polarity, SessionType};

pub type TyId = usize;
pub type GId = usize;
pub type PId = usize;

#[derive(Clone, Debug)]
pub enum Node {
    Var,
    End,
    InV(GId, TyId),
    OutV(GId, TyId),
    InS(TyId, PId, TyId),
    OutS(TyId, PId, TyId),
    /// Branching whose label set `J` satisfies `lower ⊆ J ⊆ labels(arms)`.
    Branch { arms: Vec<(Label, TyId)>, lower: BTreeSet<Label> },
    /// Selection with at least (`open`) or exactly the listed labels.
    Select { arms: Vec<(Label, TyId)>, open: bool },
    Spec { arms: Vec<(Label, TyId)>, prio: Option<bool> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyError {
    Shape,
    Ground(GroundType, GroundType),
    Labels,
    Polarity,
}

#[derive(Clone, Debug, Default)]
pub struct Store {
    parent: Vec<TyId>,
    nodes: Vec<Node>,
    gparent: Vec<GId>,
    gval: Vec<Option<GroundType>>,
    pparent: Vec<PId>,
    pval: Vec<Option<Polarity>>,
}

pub fn labels_of(arms: &[(Label, TyId)]) -> BTreeSet<Label> {
    arms.iter().map(|(l, _)| l.clone()).collect()
}

pub fn arm_of(arms: &[(Label, TyId)], l: &Label) -> Option<TyId> {
    arms.iter().find(|(m, _)| m == l).map(|(_, t)| *t)
}

impl Store {
    pub fn fresh(&mut self, node: Node) -> TyId {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.parent.push(id);
        id
    }

    pub fn var(&mut self) -> TyId {
        self.fresh(Node::Var)
    }

    pub fn end(&mut self) -> TyId {
        self.fresh(Node::End)
    }

    pub fn find(&self, mut t: TyId) -> TyId {
        while self.parent[t] != t {
            t = self.parent[t];
        }
        t
    }

    pub fn node(&self, t: TyId) -> &Node {
        &self.nodes[self.find(t)]
    }

    pub fn set(&mut self, t: TyId, node: Node) {
        let r = self.find(t);
        self.nodes[r] = node;
    }

    pub fn gvar(&mut self) -> GId {
        let id = self.gval.len();
        self.gval.push(None);
        self.gparent.push(id);
        id
    }

    pub fn ground(&mut self, g: GroundType) -> GId {
        let id = self.gvar();
        self.gval[id] = Some(g);
        id
    }

    pub fn gfind(&self, mut g: GId) -> GId {
        while self.gparent[g] != g {
            g = self.gparent[g];
        }
        g
    }

    pub fn gvalue(&self, g: GId) -> Option<&GroundType> {
        self.gval[self.gfind(g)].as_ref()
    }

    pub fn unify_ground(&mut self, a: GId, b: GId) -> Result<(), UnifyError> {
        let (ra, rb) = (self.gfind(a), self.gfind(b));
        if ra == rb {
            return Ok(());
        }
        match (self.gval[ra].clone(), self.gval[rb].clone()) {
            (Some(x), Some(y)) if x != y => Err(UnifyError::Ground(x, y)),
            (Some(_), None) => {
                self.gparent[rb] = ra;
                Ok(())
            }
            _ => {
                self.gparent[ra] = rb;
                Ok(())
            }
        }
    }

    pub fn pvar(&mut self) -> PId {
        let id = self.pval.len();
        self.pval.push(None);
        self.pparent.push(id);
        id
    }

    pub fn pol(&mut self, p: Polarity) -> PId {
        let id = self.pvar();
        self.pval[id] = Some(p);
        id
    }

    pub fn pfind(&self, mut p: PId) -> PId {
        while self.pparent[p] != p {
            p = self.pparent[p];
        }
        p
    }

    pub fn pvalue(&self, p: PId) -> Option<Polarity> {
        self.pval[self.pfind(p)]
    }

    pub fn unify_pol(&mut self, a: PId, b: PId) -> Result<(), UnifyError> {
        let (ra, rb) = (self.pfind(a), self.pfind(b));
        if ra == rb {
            return Ok(());
        }
        match (self.pval[ra], self.pval[rb]) {
            (Some(x), Some(y)) if x != y => Err(UnifyError::Polarity),
            (Some(_), None) => {
                self.pparent[rb] = ra;
                Ok(())
            }
            _ => {
                self.pparent[ra] = rb;
                Ok(())
            }
        }
    }

    pub fn from_session_type(&mut self, t: &SessionType) -> TyId {
        let node = match t {
            SessionType::End => Node::End,
            SessionType::InValue(g, c) | SessionType::OutValue(g, c) => {
                let gid = self.ground(g.clone());
                let cid = self.from_session_type(c);
                if matches!(t, SessionType::InValue(..)) {
                    Node::InV(gid, cid)
                } else {
                    Node::OutV(gid, cid)
                }
            }
            SessionType::InSession { carried, pol, cont } | SessionType::OutSession { carried, pol, cont } => {
                let car = self.from_session_type(carried);
                let p = self.pol(*pol);
                let c = self.from_session_type(cont);
                if matches!(t, SessionType::InSession { .. }) {
                    Node::InS(car, p, c)
                } else {
                    Node::OutS(car, p, c)
                }
            }
            SessionType::Branch(arms) => {
                let arms = self.arms_from(arms);
                let lower = labels_of(&arms);
                Node::Branch { arms, lower }
            }
            SessionType::Select(arms) => Node::Select { arms: self.arms_from(arms), open: false },
            SessionType::Spec { arms, prioritized } => Node::Spec { arms: self.arms_from(arms), prio: Some(*prioritized) },
        };
        self.fresh(node)
    }

    fn arms_from(&mut self, arms: &Arms<SessionType>) -> Vec<(Label, TyId)> {
        arms.iter().map(|(l, t)| (l.clone(), self.from_session_type(t))).collect()
    }

    pub fn unify(&mut self, a: TyId, b: TyId) -> Result<(), UnifyError> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Ok(());
        }
        let (na, nb) = (self.nodes[ra].clone(), self.nodes[rb].clone());
        let mut pairs: Vec<(TyId, TyId)> = Vec::new();
        let merged = match (na, nb) {
            (Node::Var, _) => {
                self.parent[ra] = rb;
                return Ok(());
            }
            (_, Node::Var) => {
                self.parent[rb] = ra;
                return Ok(());
            }
            (Node::End, Node::End) => Node::End,
            (Node::InV(g1, c1), Node::InV(g2, c2)) | (Node::OutV(g1, c1), Node::OutV(g2, c2)) => {
                self.unify_ground(g1, g2)?;
                pairs.push((c1, c2));
                self.nodes[ra].clone()
            }
            (Node::InS(x1, p1, c1), Node::InS(x2, p2, c2)) | (Node::OutS(x1, p1, c1), Node::OutS(x2, p2, c2)) => {
                self.unify_pol(p1, p2)?;
                pairs.push((x1, x2));
                pairs.push((c1, c2));
                self.nodes[ra].clone()
            }
            (Node::Branch { arms: a1, lower: l1 }, Node::Branch { arms: a2, lower: l2 }) => {
                let common: Vec<(Label, TyId)> = a1.iter().filter(|(l, _)| arm_of(&a2, l).is_some()).cloned().collect();
                let lower: BTreeSet<Label> = l1.union(&l2).cloned().collect();
                let labels = labels_of(&common);
                if common.is_empty() || !lower.is_subset(&labels) {
                    return Err(UnifyError::Labels);
                }
                for (l, t) in &common {
                    pairs.push((*t, arm_of(&a2, l).unwrap()));
                }
                Node::Branch { arms: common, lower }
            }
            (Node::Select { arms: a1, open: o1 }, Node::Select { arms: a2, open: o2 }) => {
                let (s1, s2) = (labels_of(&a1), labels_of(&a2));
                let ok = match (o1, o2) {
                    (true, true) => true,
                    (false, true) => s2.is_subset(&s1),
                    (true, false) => s1.is_subset(&s2),
                    (false, false) => s1 == s2,
                };
                if !ok {
                    return Err(UnifyError::Labels);
                }
                let (base, other) = if !o2 && o1 { (a2.clone(), a1.clone()) } else { (a1.clone(), a2.clone()) };
                let mut arms = base.clone();
                for (l, t) in &other {
                    match arm_of(&base, l) {
                        Some(u) => pairs.push((u, *t)),
                        None => arms.push((l.clone(), *t)),
                    }
                }
                Node::Select { arms, open: o1 && o2 }
            }
            (Node::Spec { arms: a1, prio: p1 }, Node::Spec { arms: a2, prio: p2 }) => {
                if labels_of(&a1) != labels_of(&a2) {
                    return Err(UnifyError::Labels);
                }
                let prio = match (p1, p2) {
                    (Some(x), Some(y)) if x != y => return Err(UnifyError::Shape),
                    (Some(x), _) | (None, Some(x)) => Some(x),
                    (None, None) => None,
                };
                for (l, t) in &a1 {
                    pairs.push((*t, arm_of(&a2, l).unwrap()));
                }
                let arms = if p1.is_none() && p2.is_some() { a2 } else { a1 };
                Node::Spec { arms, prio }
            }
            _ => return Err(UnifyError::Shape),
        };
        self.nodes[rb] = merged;
        self.parent[ra] = rb;
        for (x, y) in pairs {
            self.unify(x, y)?;
        }
        Ok(())
    }

    /// Reads back a session type, choosing defaults for what is still
    /// unknown: `end` for type variables, `Nat` for ground variables, `-`
    /// for polarity variables, every offered label for branchings and only
    /// the used labels for selections. `None` on a cyclic type.
    pub fn to_session_type(&self, t: TyId) -> Option<SessionType> {
        let mut stack = Vec::new();
        self.read(t, &mut stack)
    }

    pub fn ground_or_default(&self, g: GId) -> GroundType {
        self.gvalue(g).cloned().unwrap_or_else(GroundType::nat)
    }

    pub fn pol_or_default(&self, p: PId) -> Polarity {
        self.pvalue(p).unwrap_or(Polarity::Minus)
    }

    fn read(&self, t: TyId, stack: &mut Vec<TyId>) -> Option<SessionType> {
        let r = self.find(t);
        if stack.contains(&r) {
            return None;
        }
        stack.push(r);
        let arms = |s: &Self, arms: &[(Label, TyId)], stack: &mut Vec<TyId>| -> Option<Arms<SessionType>> {
            let mut out = Vec::with_capacity(arms.len());
            for (l, a) in arms {
                out.push((l.clone(), s.read(*a, stack)?));
            }
            Arms::new(out).ok()
        };
        let out = match &self.nodes[r] {
            Node::Var | Node::End => SessionType::End,
            Node::InV(g, c) => SessionType::input(self.ground_or_default(*g), self.read(*c, stack)?),
            Node::OutV(g, c) => SessionType::output(self.ground_or_default(*g), self.read(*c, stack)?),
            Node::InS(x, p, c) => {
                SessionType::in_session(self.read(*x, stack)?, self.pol_or_default(*p), self.read(*c, stack)?)
            }
            Node::OutS(x, p, c) => {
                SessionType::out_session(self.read(*x, stack)?, self.pol_or_default(*p), self.read(*c, stack)?)
            }
            Node::Branch { arms: a, .. } => SessionType::Branch(arms(self, a, stack)?),
            Node::Select { arms: a, .. } => SessionType::Select(arms(self, a, stack)?),
            Node::Spec { arms: a, prio } => SessionType::Spec { arms: arms(self, a, stack)?, prioritized: prio.unwrap_or(false) },
        };
        stack.pop();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_type;

    #[test]
    fn round_trip_through_store() {
        let t = parse_type("!Nat.&{a: ?(spec<<x: end, y: !Bool>>+).end, b: +{c: end}}").unwrap();
        let mut s = Store::default();
        let id = s.from_session_type(&t);
        assert_eq!(s.to_session_type(id), Some(t));
    }

    #[test]
    fn branch_unification_intersects_offers() {
        let mut s = Store::default();
        let e1 = s.end();
        let e2 = s.end();
        let e3 = s.end();
        let a = Label::from_static("a");
        let b = Label::from_static("b");
        let x = s.fresh(Node::Branch { arms: vec![(a.clone(), e1), (b.clone(), e2)], lower: BTreeSet::new() });
        let y = s.fresh(Node::Branch { arms: vec![(a.clone(), e3)], lower: BTreeSet::from([a.clone()]) });
        s.unify(x, y).unwrap();
        assert_eq!(s.to_session_type(x), Some(SessionType::branch(vec![(a, SessionType::End)]).unwrap()));
    }

    #[test]
    fn open_selection_grows_and_closed_one_does_not() {
        let mut s = Store::default();
        let (e1, e2) = (s.end(), s.end());
        let a = Label::from_static("a");
        let b = Label::from_static("b");
        let x = s.fresh(Node::Select { arms: vec![(a.clone(), e1)], open: true });
        let y = s.fresh(Node::Select { arms: vec![(b.clone(), e2)], open: true });
        s.unify(x, y).unwrap();
        let e3 = s.end();
        let z = s.fresh(Node::Select { arms: vec![(a, e3)], open: false });
        assert_eq!(s.unify(x, z), Err(UnifyError::Labels));
    }

    #[test]
    fn ground_mismatch_reported() {
        let mut s = Store::default();
        let a = s.from_session_type(&parse_type("!Nat").unwrap());
        let b = s.from_session_type(&parse_type("!Bool").unwrap());
        assert!(matches!(s.unify(a, b), Err(UnifyError::Ground(..))));
    }
}

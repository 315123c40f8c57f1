use std::collections::BTreeSet;
use std::fmt;

use super::SyntaxError;

/// Name of a ground (value) type.
///
/// Equality is by name. The built-in registry is [`GroundType::BUILTIN`]; any
/// other identifier is accepted as a user-registered ground type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundType(String);

impl GroundType {
    pub const BUILTIN: [&'static str; 7] =
        ["Nat", "Bool", "String", "Url", "Amount", "CcNumber", "TransIDnum"];

    pub fn new(name: impl Into<String>) -> Self {
        GroundType(name.into())
    }

    pub fn nat() -> Self {
        GroundType::new("Nat")
    }

    pub fn bool() -> Self {
        GroundType::new("Bool")
    }

    pub fn string() -> Self {
        GroundType::new("String")
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_builtin(&self) -> bool {
        GroundType::BUILTIN.contains(&self.0.as_str())
    }

    pub fn builtins() -> Vec<GroundType> {
        GroundType::BUILTIN.iter().map(|n| GroundType::new(*n)).collect()
    }
}

impl fmt::Display for GroundType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Self, SyntaxError> {
        let text = text.into();
        if text.is_empty() {
            return Err(SyntaxError::EmptyLabel);
        }
        Ok(Label(text))
    }

    /// Panics on an empty string. Meant for literals in code and tests.
    pub fn from_static(text: &str) -> Self {
        Label::new(text).expect("label must be nonempty")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Channel-end polarity: `Minus` is the requester (client) end, `Plus` the
/// acceptor (server) end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn dual(self) -> Polarity {
        match self {
            Polarity::Plus => Polarity::Minus,
            Polarity::Minus => Polarity::Plus,
        }
    }

    pub fn sign(self) -> char {
        match self {
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        }
    }
}

pub fn dual_polarity(p: Polarity) -> Polarity {
    p.dual()
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

/// A nonempty list of labelled arms with pairwise distinct labels.
///
/// Order is kept: it is the declaration order, and for priority lists it is
/// the priority order (first = highest).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arms<T>(Vec<(Label, T)>);

impl<T> Arms<T> {
    pub fn new(arms: Vec<(Label, T)>) -> Result<Self, SyntaxError> {
        if arms.is_empty() {
            return Err(SyntaxError::EmptyArms);
        }
        let mut seen = BTreeSet::new();
        for (l, _) in &arms {
            if !seen.insert(l) {
                return Err(SyntaxError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Arms(arms))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Label, T)> {
        self.0.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.0.iter().map(|(l, _)| l)
    }

    pub fn get(&self, label: &Label) -> Option<&T> {
        self.0.iter().find(|(l, _)| l == label).map(|(_, t)| t)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.get(label).is_some()
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.0.iter().position(|(l, _)| l == label)
    }

    pub fn as_slice(&self) -> &[(Label, T)] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<(Label, T)> {
        self.0
    }

    /// Maps every arm body; labels are unchanged so distinctness is preserved.
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Arms<U> {
        Arms(self.0.iter().map(|(l, t)| (l.clone(), f(t))).collect())
    }

    pub fn try_map<U, E>(&self, mut f: impl FnMut(&T) -> Result<U, E>) -> Result<Arms<U>, E> {
        let mut out = Vec::with_capacity(self.0.len());
        for (l, t) in &self.0 {
            out.push((l.clone(), f(t)?));
        }
        Ok(Arms(out))
    }

    pub fn label_set(&self) -> BTreeSet<&Label> {
        self.labels().collect()
    }
}

impl<'a, T> IntoIterator for &'a Arms<T> {
    type Item = &'a (Label, T);
    type IntoIter = std::slice::Iter<'a, (Label, T)>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Binary session types without recursion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SessionType {
    End,
    InValue(GroundType, Box<SessionType>),
    OutValue(GroundType, Box<SessionType>),
    /// `?(carried^pol).cont`
    InSession {
        carried: Box<SessionType>,
        pol: Polarity,
        cont: Box<SessionType>,
    },
    /// `!(carried^pol).cont`
    OutSession {
        carried: Box<SessionType>,
        pol: Polarity,
        cont: Box<SessionType>,
    },
    Branch(Arms<SessionType>),
    Select(Arms<SessionType>),
    /// Speculative selection. With `prioritized` the arm order is a priority
    /// list; otherwise the order carries no meaning for typing.
    Spec {
        arms: Arms<SessionType>,
        prioritized: bool,
    },
}

impl SessionType {
    pub fn input(g: GroundType, cont: SessionType) -> Self {
        SessionType::InValue(g, Box::new(cont))
    }

    pub fn output(g: GroundType, cont: SessionType) -> Self {
        SessionType::OutValue(g, Box::new(cont))
    }

    pub fn in_session(carried: SessionType, pol: Polarity, cont: SessionType) -> Self {
        SessionType::InSession {
            carried: Box::new(carried),
            pol,
            cont: Box::new(cont),
        }
    }

    pub fn out_session(carried: SessionType, pol: Polarity, cont: SessionType) -> Self {
        SessionType::OutSession {
            carried: Box::new(carried),
            pol,
            cont: Box::new(cont),
        }
    }

    pub fn branch(arms: Vec<(Label, SessionType)>) -> Result<Self, SyntaxError> {
        Ok(SessionType::Branch(Arms::new(arms)?))
    }

    pub fn select(arms: Vec<(Label, SessionType)>) -> Result<Self, SyntaxError> {
        Ok(SessionType::Select(Arms::new(arms)?))
    }

    pub fn spec(arms: Vec<(Label, SessionType)>, prioritized: bool) -> Result<Self, SyntaxError> {
        Ok(SessionType::Spec {
            arms: Arms::new(arms)?,
            prioritized,
        })
    }

    pub fn is_end(&self) -> bool {
        matches!(self, SessionType::End)
    }

    pub fn depth(&self) -> usize {
        match self {
            SessionType::End => 0,
            SessionType::InValue(_, c) | SessionType::OutValue(_, c) => 1 + c.depth(),
            SessionType::InSession { carried, cont, .. }
            | SessionType::OutSession { carried, cont, .. } => {
                1 + carried.depth().max(cont.depth())
            }
            SessionType::Branch(arms)
            | SessionType::Select(arms)
            | SessionType::Spec { arms, .. } => {
                1 + arms.iter().map(|(_, t)| t.depth()).max().unwrap_or(0)
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            SessionType::End => 1,
            SessionType::InValue(_, c) | SessionType::OutValue(_, c) => 1 + c.size(),
            SessionType::InSession { carried, cont, .. }
            | SessionType::OutSession { carried, cont, .. } => 1 + carried.size() + cont.size(),
            SessionType::Branch(arms)
            | SessionType::Select(arms)
            | SessionType::Spec { arms, .. } => {
                1 + arms.iter().map(|(_, t)| t.size()).sum::<usize>()
            }
        }
    }

    /// True when no speculative selection occurs anywhere in the type,
    /// including carried types.
    pub fn is_spec_free(&self) -> bool {
        match self {
            SessionType::End => true,
            SessionType::InValue(_, c) | SessionType::OutValue(_, c) => c.is_spec_free(),
            SessionType::InSession { carried, cont, .. }
            | SessionType::OutSession { carried, cont, .. } => {
                carried.is_spec_free() && cont.is_spec_free()
            }
            SessionType::Branch(arms) | SessionType::Select(arms) => {
                arms.iter().all(|(_, t)| t.is_spec_free())
            }
            SessionType::Spec { .. } => false,
        }
    }

    /// True when no session delegation occurs anywhere in the type.
    pub fn is_delegation_free(&self) -> bool {
        match self {
            SessionType::End => true,
            SessionType::InValue(_, c) | SessionType::OutValue(_, c) => c.is_delegation_free(),
            SessionType::InSession { .. } | SessionType::OutSession { .. } => false,
            SessionType::Branch(arms)
            | SessionType::Select(arms)
            | SessionType::Spec { arms, .. } => arms.iter().all(|(_, t)| t.is_delegation_free()),
        }
    }

    /// Structural equality up to the order of branch/select arms and of
    /// non-prioritized speculative arms. Priority lists compare in order.
    pub fn equivalent(&self, other: &SessionType) -> bool {
        use SessionType::*;
        fn same_arms(a: &Arms<SessionType>, b: &Arms<SessionType>, ordered: bool) -> bool {
            if a.len() != b.len() {
                return false;
            }
            if ordered {
                a.iter()
                    .zip(b.iter())
                    .all(|((la, ta), (lb, tb))| la == lb && ta.equivalent(tb))
            } else {
                a.iter()
                    .all(|(l, t)| b.get(l).is_some_and(|u| t.equivalent(u)))
            }
        }
        match (self, other) {
            (End, End) => true,
            (InValue(g, a), InValue(h, b)) | (OutValue(g, a), OutValue(h, b)) => {
                g == h && a.equivalent(b)
            }
            (
                InSession { carried: c1, pol: p1, cont: k1 },
                InSession { carried: c2, pol: p2, cont: k2 },
            )
            | (
                OutSession { carried: c1, pol: p1, cont: k1 },
                OutSession { carried: c2, pol: p2, cont: k2 },
            ) => p1 == p2 && c1.equivalent(c2) && k1.equivalent(k2),
            (Branch(a), Branch(b)) | (Select(a), Select(b)) => same_arms(a, b, false),
            (
                Spec { arms: a, prioritized: pa },
                Spec { arms: b, prioritized: pb },
            ) => pa == pb && same_arms(a, b, *pa),
            _ => false,
        }
    }

    /// Swaps inputs with outputs and selections with branchings. Undefined on
    /// speculative selection, which has no dual; returns `None` there.
    pub fn mechanical_dual(&self) -> Option<SessionType> {
        use SessionType::*;
        Some(match self {
            End => End,
            InValue(g, c) => OutValue(g.clone(), Box::new(c.mechanical_dual()?)),
            OutValue(g, c) => InValue(g.clone(), Box::new(c.mechanical_dual()?)),
            InSession { carried, pol, cont } => OutSession {
                carried: carried.clone(),
                pol: *pol,
                cont: Box::new(cont.mechanical_dual()?),
            },
            OutSession { carried, pol, cont } => InSession {
                carried: carried.clone(),
                pol: *pol,
                cont: Box::new(cont.mechanical_dual()?),
            },
            Branch(arms) => Select(arms.try_map(|t| t.mechanical_dual().ok_or(()))
                .ok()?),
            Select(arms) => Branch(arms.try_map(|t| t.mechanical_dual().ok_or(()))
                .ok()?),
            Spec { .. } => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarity_duality_is_an_involution() {
        assert_eq!(dual_polarity(Polarity::Plus), Polarity::Minus);
        assert_eq!(dual_polarity(Polarity::Minus), Polarity::Plus);
        assert_eq!(dual_polarity(dual_polarity(Polarity::Plus)), Polarity::Plus);
    }

    #[test]
    fn arms_reject_duplicates_and_empty() {
        let l = Label::from_static("a");
        assert!(matches!(
            Arms::new(vec![(l.clone(), 1), (l.clone(), 2)]),
            Err(SyntaxError::DuplicateLabel(_))
        ));
        assert!(matches!(Arms::<u8>::new(vec![]), Err(SyntaxError::EmptyArms)));
        assert!(Label::new("").is_err());
    }

    #[test]
    fn equivalence_ignores_branch_order_but_not_priority_order() {
        let a = Label::from_static("a");
        let b = Label::from_static("b");
        let t1 = SessionType::branch(vec![(a.clone(), SessionType::End), (b.clone(), SessionType::End)]).unwrap();
        let t2 = SessionType::branch(vec![(b.clone(), SessionType::End), (a.clone(), SessionType::End)]).unwrap();
        assert!(t1.equivalent(&t2));
        assert_ne!(t1, t2);
        let p1 = SessionType::spec(vec![(a.clone(), SessionType::End), (b.clone(), SessionType::End)], true).unwrap();
        let p2 = SessionType::spec(vec![(b, SessionType::End), (a, SessionType::End)], true).unwrap();
        assert!(!p1.equivalent(&p2));
    }
}

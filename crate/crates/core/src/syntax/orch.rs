use super::types::{Arms, Label};
use super::SyntaxError;

/// Orchestrators mediating one session channel.
///
/// A one-armed choice (external or internal) is always stored as
/// `Prefix`; the smart constructors enforce this so that structural
/// equality coincides with the identification made by the grammar.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orchestrator {
    Idle,
    Io(Box<Orchestrator>),
    Prefix(Label, Box<Orchestrator>),
    /// External choice with at least two arms.
    External(Arms<Orchestrator>),
    /// Internal choice with at least two arms.
    Internal(Arms<Orchestrator>),
}

impl Orchestrator {
    pub fn io(cont: Orchestrator) -> Self {
        Orchestrator::Io(Box::new(cont))
    }

    pub fn prefix(l: Label, cont: Orchestrator) -> Self {
        Orchestrator::Prefix(l, Box::new(cont))
    }

    pub fn external(arms: Vec<(Label, Orchestrator)>) -> Result<Self, SyntaxError> {
        Ok(Self::external_arms(Arms::new(arms)?))
    }

    pub fn internal(arms: Vec<(Label, Orchestrator)>) -> Result<Self, SyntaxError> {
        Ok(Self::internal_arms(Arms::new(arms)?))
    }

    pub fn external_arms(arms: Arms<Orchestrator>) -> Self {
        if arms.len() == 1 {
            let (l, f) = arms.into_vec().pop().unwrap();
            Orchestrator::prefix(l, f)
        } else {
            Orchestrator::External(arms)
        }
    }

    pub fn internal_arms(arms: Arms<Orchestrator>) -> Self {
        if arms.len() == 1 {
            let (l, f) = arms.into_vec().pop().unwrap();
            Orchestrator::prefix(l, f)
        } else {
            Orchestrator::Internal(arms)
        }
    }

    /// Arms of a label-driven node viewed as an external choice.
    pub fn as_external(&self) -> Option<Vec<(&Label, &Orchestrator)>> {
        match self {
            Orchestrator::Prefix(l, f) => Some(vec![(l, &**f)]),
            Orchestrator::External(arms) => Some(arms.iter().map(|(l, f)| (l, f)).collect()),
            _ => None,
        }
    }

    /// Arms of a label-driven node viewed as an internal choice.
    pub fn as_internal(&self) -> Option<Vec<(&Label, &Orchestrator)>> {
        match self {
            Orchestrator::Prefix(l, f) => Some(vec![(l, &**f)]),
            Orchestrator::Internal(arms) => Some(arms.iter().map(|(l, f)| (l, f)).collect()),
            _ => None,
        }
    }

    pub fn is_idle(&self) -> bool {
        matches!(self, Orchestrator::Idle)
    }

    pub fn size(&self) -> usize {
        match self {
            Orchestrator::Idle => 1,
            Orchestrator::Io(f) | Orchestrator::Prefix(_, f) => 1 + f.size(),
            Orchestrator::External(arms) | Orchestrator::Internal(arms) => {
                1 + arms.iter().map(|(_, f)| f.size()).sum::<usize>()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_choices_collapse_to_prefix() {
        let a = Label::from_static("a");
        let e = Orchestrator::external(vec![(a.clone(), Orchestrator::Idle)]).unwrap();
        let i = Orchestrator::internal(vec![(a.clone(), Orchestrator::Idle)]).unwrap();
        assert_eq!(e, Orchestrator::prefix(a.clone(), Orchestrator::Idle));
        assert_eq!(e, i);
    }

    #[test]
    fn duplicate_choice_labels_rejected() {
        let a = Label::from_static("a");
        assert!(Orchestrator::external(vec![
            (a.clone(), Orchestrator::Idle),
            (a, Orchestrator::io(Orchestrator::Idle))
        ])
        .is_err());
    }
}

use std::collections::BTreeMap;
use std::fmt;

use super::types::{Polarity, SessionType};

/// Assignment of session types to polarized channel ends.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Typing(BTreeMap<(String, Polarity), SessionType>);

impl Typing {
    pub fn new() -> Self {
        Typing::default()
    }

    pub fn singleton(name: &str, pol: Polarity, ty: SessionType) -> Self {
        let mut t = Typing::new();
        t.0.insert((name.to_string(), pol), ty);
        t
    }

    pub fn get(&self, name: &str, pol: Polarity) -> Option<&SessionType> {
        self.0.get(&(name.to_string(), pol))
    }

    /// Inserts an entry; returns the previous type for that end, if any.
    pub fn insert(&mut self, name: &str, pol: Polarity, ty: SessionType) -> Option<SessionType> {
        self.0.insert((name.to_string(), pol), ty)
    }

    pub fn remove(&mut self, name: &str, pol: Polarity) -> Option<SessionType> {
        self.0.remove(&(name.to_string(), pol))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, Polarity), &SessionType)> {
        self.0.iter()
    }

    /// Union of two typings with disjoint domains. On overlap returns the
    /// clashing ends.
    pub fn compose(&self, other: &Typing) -> Result<Typing, Vec<(String, Polarity)>> {
        let clashes: Vec<_> = other.0.keys().filter(|k| self.0.contains_key(*k)).cloned().collect();
        if !clashes.is_empty() {
            return Err(clashes);
        }
        let mut out = self.clone();
        out.0.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(out)
    }

    /// Every end is typed `end`.
    pub fn is_completed(&self) -> bool {
        self.0.values().all(SessionType::is_end)
    }

    /// Same ends with equivalent types, ignoring `end` entries.
    pub fn equivalent(&self, other: &Typing) -> bool {
        let (a, b) = (self.without_ends(), other.without_ends());
        a.0.len() == b.0.len() && a.0.iter().all(|(k, t)| b.0.get(k).is_some_and(|u| t.equivalent(u)))
    }

    /// Drops `end` entries, giving the representative used for comparison.
    pub fn without_ends(&self) -> Typing {
        Typing(self.0.iter().filter(|(_, t)| !t.is_end()).map(|(k, v)| (k.clone(), v.clone())).collect())
    }
}

impl FromIterator<((String, Polarity), SessionType)> for Typing {
    fn from_iter<I: IntoIterator<Item = ((String, Polarity), SessionType)>>(iter: I) -> Self {
        Typing(iter.into_iter().collect())
    }
}

impl fmt::Display for Typing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        f.write_str("{")?;
        for (i, ((k, p), t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}^{p}: {}", crate::surface::pretty_type(t))?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_requires_disjoint_domains() {
        let a = Typing::singleton("k", Polarity::Plus, SessionType::End);
        let b = Typing::singleton("k", Polarity::Minus, SessionType::End);
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.len(), 2);
        assert_eq!(a.compose(&a), Err(vec![("k".to_string(), Polarity::Plus)]));
        assert_eq!(Typing::new().compose(&Typing::new()), Ok(Typing::new()));
    }

    #[test]
    fn completed_typings() {
        assert!(Typing::new().is_completed());
        assert!(Typing::singleton("k", Polarity::Plus, SessionType::End).is_completed());
        let t = SessionType::output(crate::syntax::GroundType::nat(), SessionType::End);
        assert!(!Typing::singleton("k", Polarity::Plus, t).is_completed());
    }
}

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Redex;

/// Picks one of the enabled redexes, or `None` to stop.
pub trait Scheduler {
    fn choose(&mut self, redexes: &[Redex]) -> Option<usize>;

    fn seed(&self) -> Option<u64> {
        None
    }
}

/// Always the redex with the least structural key.
#[derive(Clone, Copy, Debug, Default)]
pub struct Deterministic;

impl Scheduler for Deterministic {
    fn choose(&mut self, redexes: &[Redex]) -> Option<usize> {
        (0..redexes.len()).min_by_key(|i| redexes[*i].order_key())
    }
}

#[derive(Clone, Debug)]
pub struct SeededRandom {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        SeededRandom {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Scheduler for SeededRandom {
    fn choose(&mut self, redexes: &[Redex]) -> Option<usize> {
        (!redexes.is_empty()).then(|| self.rng.gen_range(0..redexes.len()))
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }
}

/// One scripted step: a rule name and, optionally, the label it must pick.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayStep {
    pub rule: String,
    pub label: Option<String>,
}

impl ReplayStep {
    pub fn new(rule: &str, label: Option<&str>) -> Self {
        ReplayStep {
            rule: rule.to_string(),
            label: label.map(str::to_string),
        }
    }
}

/// Follows a script, taking the first matching redex at each step and
/// stopping when the script ends or nothing matches.
#[derive(Clone, Debug)]
pub struct Replay {
    script: VecDeque<ReplayStep>,
}

impl Replay {
    pub fn new(script: impl IntoIterator<Item = ReplayStep>) -> Self {
        Replay {
            script: script.into_iter().collect(),
        }
    }
}

impl Scheduler for Replay {
    fn choose(&mut self, redexes: &[Redex]) -> Option<usize> {
        let want = self.script.pop_front()?;
        redexes.iter().position(|r| {
            r.rule.name() == want.rule
                && want
                    .label
                    .as_ref()
                    .is_none_or(|l| r.label.as_ref().is_some_and(|m| m.as_str() == l))
        })
    }
}

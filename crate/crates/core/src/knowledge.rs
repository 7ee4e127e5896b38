//! The user's knowledge predicate and classical current-state opacity.
//!
//! The user "knows" after an observation when no pair of its possible
//! current states belongs to the disambiguation task. Both predicates are
//! evaluated over `q × q`, which is symmetric, so a task and its
//! symmetrization always give the same answers.

use std::collections::BTreeSet;

use crate::automaton::{Automaton, EventId, StateId};
use crate::error::{Error, Result};
use crate::observer::{intruder_observer, ObserverAutomaton, StateSet};
use crate::verdict::{Method, Verdict};

pub type Pair = (StateId, StateId);

/// Ordered state pairs the user must be able to tell apart. Stored as given,
/// not symmetrized; diagonal pairs are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DisambiguationTask {
    pairs: BTreeSet<Pair>,
}

impl DisambiguationTask {
    pub fn new(pairs: impl IntoIterator<Item = Pair>) -> Self {
        DisambiguationTask {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Every ordered pair of distinct states: "know the current state".
    pub fn all_distinct(a: &Automaton) -> Self {
        Self::new(
            a.states()
                .flat_map(|x| a.states().map(move |y| (x, y)))
                .filter(|(x, y)| x != y),
        )
    }

    /// Every ordered pair, diagonal included. Never satisfiable.
    pub fn everything(a: &Automaton) -> Self {
        Self::new(a.states().flat_map(|x| a.states().map(move |y| (x, y))))
    }

    /// `(x, x)` for each listed state.
    pub fn diagonal(states: impl IntoIterator<Item = StateId>) -> Self {
        Self::new(states.into_iter().map(|x| (x, x)))
    }

    /// Task whose knowledge means "the plant is in a secret state", given a
    /// user that sees every event.
    pub fn from_secrets(a: &Automaton, secrets: &SecretStates) -> Self {
        Self::diagonal(a.states().filter(|&x| !secrets.contains(x)))
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.pairs.contains(&pair)
    }

    pub fn pairs(&self) -> &BTreeSet<Pair> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn symmetrized(&self) -> Self {
        Self::new(self.pairs.iter().flat_map(|&(x, y)| [(x, y), (y, x)]))
    }

    pub fn validate(&self, a: &Automaton) -> Result<()> {
        for &(x, y) in &self.pairs {
            a.check_state(x)?;
            a.check_state(y)?;
        }
        Ok(())
    }
}

/// Secret states `X_S`; the non-secret complement is derived.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SecretStates(BTreeSet<StateId>);

impl SecretStates {
    pub fn new(states: impl IntoIterator<Item = StateId>) -> Self {
        SecretStates(states.into_iter().collect())
    }

    pub fn contains(&self, x: StateId) -> bool {
        self.0.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn non_secret(&self, a: &Automaton) -> Vec<StateId> {
        a.states().filter(|&x| !self.contains(x)).collect()
    }
}

/// `(q × q) ∩ T = ∅`.
pub fn knows(estimate: &[StateId], task: &DisambiguationTask) -> bool {
    estimate
        .iter()
        .all(|&x| estimate.iter().all(|&y| !task.contains((x, y))))
}

/// Knowledge predicate after user observation `observation`.
pub fn know(
    user_obs: &ObserverAutomaton,
    task: &DisambiguationTask,
    observation: &[EventId],
) -> Result<bool> {
    let q = user_obs
        .reached(observation)?
        .ok_or(Error::UndefinedObservation)?;
    Ok(knows(user_obs.members(q), task))
}

/// Indices of observer states where the knowledge predicate holds.
pub fn knowing_state_indices(
    user_obs: &ObserverAutomaton,
    task: &DisambiguationTask,
) -> Vec<usize> {
    (0..user_obs.len())
        .filter(|&q| knows(user_obs.members(q), task))
        .collect()
}

/// The knowing estimates themselves.
pub fn knowing_states(user_obs: &ObserverAutomaton, task: &DisambiguationTask) -> Vec<StateSet> {
    knowing_state_indices(user_obs, task)
        .into_iter()
        .map(|q| user_obs.state_set(q))
        .collect()
}

/// Current-state opacity against the intruder alphabet. A violation is the
/// shortest intruder observation whose estimate lies inside `X_S`.
pub fn verify_cso(a: &Automaton, secrets: &SecretStates) -> Verdict {
    let obs = intruder_observer(a);
    let inside = |q: usize| obs.members(q).iter().all(|&x| secrets.contains(x));
    match obs.shortest_observation(inside) {
        None => Verdict::opaque(Method::Cso),
        Some((q, witness)) => {
            Verdict::violated(Method::Cso, witness, a.format_states(obs.members(q)))
        }
    }
}

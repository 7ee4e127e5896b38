//! Observer (powerset) construction.
//!
//! The construction works on anything implementing [`Plant`]: the automaton
//! itself, an observer used as a plant, or a synchronous product. Observer
//! states are sorted, de-duplicated sets of plant states, interned so that
//! equal sets get the same index. States are numbered in breadth-first order
//! from the initial estimate, trying events in table order, so numbering is
//! reproducible.
//!
//! Following the usual convention for layered observers, the observer keeps
//! the full event table: an event outside the observed alphabet is a
//! self-loop at every estimate where some member can fire it. This makes the
//! observer accept every string of the plant.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use crate::automaton::{Automaton, EventId, EventSet, StateId};
use crate::error::{Error, Result};

/// A deterministic transition structure over the automaton's event table.
pub trait Plant {
    type State: Copy + Ord + Hash + Debug;

    fn initial(&self) -> Self::State;
    fn num_events(&self) -> usize;
    fn successor(&self, state: Self::State, event: EventId) -> Option<Self::State>;
}

impl Plant for Automaton {
    type State = StateId;

    fn initial(&self) -> StateId {
        Automaton::initial(self)
    }

    fn num_events(&self) -> usize {
        Automaton::num_events(self)
    }

    fn successor(&self, state: StateId, event: EventId) -> Option<StateId> {
        self.delta(state, event)
    }
}

/// Observer states are plant-state sets; an observer is itself a plant whose
/// states are indices into its state table.
impl<T: Copy + Ord + Hash + Debug> Plant for Observer<T> {
    type State = usize;

    fn initial(&self) -> usize {
        self.initial
    }

    fn num_events(&self) -> usize {
        self.observed.universe()
    }

    fn successor(&self, state: usize, event: EventId) -> Option<usize> {
        self.transitions[state][event.0]
    }
}

/// Estimate of the current plant state: a non-empty sorted set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    /// Sorts and de-duplicates. Returns `None` for an empty input.
    pub fn new(states: impl IntoIterator<Item = StateId>) -> Option<Self> {
        let mut v: Vec<StateId> = states.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        (!v.is_empty()).then_some(StateSet(v))
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn contains(&self, x: StateId) -> bool {
        self.0.binary_search(&x).is_ok()
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

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }
}

/// Deterministic powerset automaton over estimates of type `T`.
#[derive(Clone, Debug)]
pub struct Observer<T> {
    states: Vec<Vec<T>>,
    initial: usize,
    observed: EventSet,
    // transitions[state][event]
    transitions: Vec<Vec<Option<usize>>>,
}

/// Observer of the plant automaton itself.
pub type ObserverAutomaton = Observer<StateId>;

impl<T: Copy + Ord + Hash + Debug> Observer<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial_index(&self) -> usize {
        self.initial
    }

    /// Members of observer state `index`, sorted.
    pub fn members(&self, index: usize) -> &[T] {
        &self.states[index]
    }

    pub fn observed(&self) -> &EventSet {
        &self.observed
    }

    pub fn next(&self, index: usize, event: EventId) -> Option<usize> {
        self.transitions[index][event.0]
    }

    /// Defined transitions leaving `index`, in event order.
    pub fn outgoing(&self, index: usize) -> impl Iterator<Item = (EventId, usize)> + '_ {
        self.transitions[index]
            .iter()
            .enumerate()
            .filter_map(|(e, t)| t.map(|j| (EventId(e), j)))
    }

    pub fn index_of(&self, members: &[T]) -> Option<usize> {
        self.states.iter().position(|s| s.as_slice() == members)
    }

    /// Runs an observation over the observed alphabet from the initial state.
    /// `Ok(None)` when the observation cannot be produced by the plant.
    pub fn reached(&self, observation: &[EventId]) -> Result<Option<usize>> {
        for &e in observation {
            if !self.observed.contains(e) {
                return Err(Error::NotObserved(format!("{e}")));
            }
        }
        Ok(observation
            .iter()
            .try_fold(self.initial, |q, &e| self.next(q, e)))
    }

    /// Runs an arbitrary string (any event, self-loops included).
    pub fn run_string(&self, s: &[EventId]) -> Option<usize> {
        s.iter().try_fold(self.initial, |q, &e| {
            self.transitions[q].get(e.0).copied().flatten()
        })
    }

    /// Shortest observation reaching a state satisfying `target`, ties broken
    /// by event order. Only observed events extend the path; self-loops on
    /// unobserved events never do.
    pub fn shortest_observation(
        &self,
        mut target: impl FnMut(usize) -> bool,
    ) -> Option<(usize, Vec<EventId>)> {
        let mut parent: Vec<Option<(usize, EventId)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            if target(q) {
                let mut path = Vec::new();
                let mut cur = q;
                while let Some((p, e)) = parent[cur] {
                    path.push(e);
                    cur = p;
                }
                path.reverse();
                return Some((q, path));
            }
            for e in self.observed.iter() {
                if let Some(r) = self.next(q, e) {
                    if !seen[r] {
                        seen[r] = true;
                        parent[r] = Some((q, e));
                        queue.push_back(r);
                    }
                }
            }
        }
        None
    }

    /// True when every plant move from a member of every state is matched by
    /// an observer move whose target contains the plant's successor. This is
    /// the per-state condition that makes the observer accept every plant
    /// string from any member.
    pub fn covers<P: Plant<State = T>>(&self, plant: &P) -> bool {
        (0..self.len()).all(|q| {
            self.states[q].iter().all(|&x| {
                (0..plant.num_events()).all(|e| {
                    let e = EventId(e);
                    match plant.successor(x, e) {
                        None => true,
                        Some(y) => self
                            .next(q, e)
                            .is_some_and(|r| self.states[r].binary_search(&y).is_ok()),
                    }
                })
            })
        })
    }
}

impl ObserverAutomaton {
    /// Estimate as a [`StateSet`].
    pub fn state_set(&self, index: usize) -> StateSet {
        StateSet(self.states[index].clone())
    }

    pub fn state_sets(&self) -> Vec<StateSet> {
        (0..self.len()).map(|i| self.state_set(i)).collect()
    }

    /// Current-state estimate after `observation`; `Ok(None)` when the
    /// observation is not produced by the plant.
    pub fn estimate(&self, observation: &[EventId]) -> Result<Option<StateSet>> {
        Ok(self.reached(observation)?.map(|q| self.state_set(q)))
    }
}

/// Everything reachable from `from` by strings avoiding `alphabet`.
pub fn closure<P: Plant>(plant: &P, from: &[P::State], alphabet: &EventSet) -> Vec<P::State> {
    let mut out: Vec<P::State> = from.to_vec();
    out.sort_unstable();
    out.dedup();
    let mut stack = out.clone();
    let hidden: Vec<EventId> = alphabet.complement().iter().collect();
    while let Some(x) = stack.pop() {
        for &e in &hidden {
            if let Some(y) = plant.successor(x, e) {
                if let Err(pos) = out.binary_search(&y) {
                    out.insert(pos, y);
                    stack.push(y);
                }
            }
        }
    }
    out
}

/// Closure of a state set under events outside `alphabet`.
pub fn unobservable_reach(a: &Automaton, from: &StateSet, alphabet: &EventSet) -> StateSet {
    StateSet(closure(a, from.as_slice(), alphabet))
}

/// Subset construction against `observed`, with self-loops on feasible
/// unobserved events.
pub fn subset_construction<P: Plant>(plant: &P, observed: &EventSet) -> Observer<P::State> {
    assert_eq!(observed.universe(), plant.num_events());
    let num_events = plant.num_events();
    let initial = closure(plant, &[plant.initial()], observed);

    let mut index: HashMap<Vec<P::State>, usize> = HashMap::new();
    let mut states = vec![initial.clone()];
    let mut transitions: Vec<Vec<Option<usize>>> = Vec::new();
    index.insert(initial, 0);

    let mut cursor = 0;
    while cursor < states.len() {
        let current = states[cursor].clone();
        let mut row = vec![None; num_events];
        for (e, slot) in row.iter_mut().enumerate() {
            let e = EventId(e);
            let successors: Vec<P::State> = current
                .iter()
                .filter_map(|&x| plant.successor(x, e))
                .collect();
            if successors.is_empty() {
                continue;
            }
            if !observed.contains(e) {
                *slot = Some(cursor);
                continue;
            }
            let target = closure(plant, &successors, observed);
            let next = match index.get(&target) {
                Some(&j) => j,
                None => {
                    states.push(target.clone());
                    index.insert(target, states.len() - 1);
                    states.len() - 1
                }
            };
            *slot = Some(next);
        }
        transitions.push(row);
        cursor += 1;
    }

    Observer {
        states,
        initial: 0,
        observed: observed.clone(),
        transitions,
    }
}

/// Observer of `a` against `alphabet`.
pub fn build_observer(a: &Automaton, alphabet: &EventSet) -> ObserverAutomaton {
    subset_construction(a, alphabet)
}

/// The user's observer (alphabet `Σ_o`).
pub fn user_observer(a: &Automaton) -> ObserverAutomaton {
    build_observer(a, a.user_observable())
}

/// The intruder's observer (alphabet `Σ_a`).
pub fn intruder_observer(a: &Automaton) -> ObserverAutomaton {
    build_observer(a, a.intruder_observable())
}

//! The plant model: a deterministic finite automaton whose events carry two
//! observability flags, one for the user and one for the intruder.
//!
//! States and events are dense integer handles into name tables, so sets of
//! states (and sets of state pairs) can be stored as sorted vectors.
//!
//! Non-determinism is not supported directly. A non-deterministic choice
//! `x -e-> y1 | y2` can be encoded with fresh intermediate states reached by
//! events that neither observer sees, followed by the `e`-labelled moves.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Handle of a plant state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Handle of an event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EventId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A finite sequence of events.
pub type EventString = Vec<EventId>;

/// A subset of the event table, stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventSet {
    mask: Vec<bool>,
}

impl EventSet {
    pub fn empty(num_events: usize) -> Self {
        EventSet {
            mask: vec![false; num_events],
        }
    }

    pub fn full(num_events: usize) -> Self {
        EventSet {
            mask: vec![true; num_events],
        }
    }

    pub fn from_events(num_events: usize, events: impl IntoIterator<Item = EventId>) -> Self {
        let mut set = Self::empty(num_events);
        for e in events {
            set.insert(e);
        }
        set
    }

    pub fn insert(&mut self, e: EventId) {
        self.mask[e.0] = true;
    }

    pub fn contains(&self, e: EventId) -> bool {
        self.mask.get(e.0).copied().unwrap_or(false)
    }

    /// Size of the event table this set lives in.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = EventId> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| EventId(i))
    }

    pub fn complement(&self) -> Self {
        EventSet {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn intersection(&self, other: &EventSet) -> Self {
        EventSet {
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| *a && *b)
                .collect(),
        }
    }
}

/// Whether construction rejects models with deadlocked reachable states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Liveness {
    #[default]
    Enforce,
    Allow,
}

/// Deterministic finite automaton with user and intruder observation masks.
///
/// Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    state_names: Vec<String>,
    event_names: Vec<String>,
    initial: StateId,
    // delta[state][event]
    delta: Vec<Vec<Option<StateId>>>,
    user_observable: EventSet,
    intruder_observable: EventSet,
}

impl Automaton {
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_events(&self) -> usize {
        self.event_names.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states()).map(StateId)
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.num_events()).map(EventId)
    }

    pub fn state_name(&self, x: StateId) -> &str {
        &self.state_names[x.0]
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.event_names[e.0]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name).map(StateId)
    }

    pub fn event_by_name(&self, name: &str) -> Option<EventId> {
        self.event_names.iter().position(|n| n == name).map(EventId)
    }

    /// Events the user observes.
    pub fn user_observable(&self) -> &EventSet {
        &self.user_observable
    }

    /// Events the intruder observes.
    pub fn intruder_observable(&self) -> &EventSet {
        &self.intruder_observable
    }

    pub fn user_unobservable(&self) -> EventSet {
        self.user_observable.complement()
    }

    pub fn intruder_unobservable(&self) -> EventSet {
        self.intruder_observable.complement()
    }

    pub fn check_state(&self, x: StateId) -> Result<()> {
        if x.0 < self.num_states() {
            Ok(())
        } else {
            Err(Error::InvalidState(x.0))
        }
    }

    pub fn check_event(&self, e: EventId) -> Result<()> {
        if e.0 < self.num_events() {
            Ok(())
        } else {
            Err(Error::InvalidEvent(e.0))
        }
    }

    /// Unchecked transition lookup for handles known to belong to this automaton.
    #[inline]
    pub(crate) fn delta(&self, x: StateId, e: EventId) -> Option<StateId> {
        self.delta[x.0][e.0]
    }

    /// One transition, `None` when undefined.
    pub fn step(&self, x: StateId, e: EventId) -> Result<Option<StateId>> {
        self.check_state(x)?;
        self.check_event(e)?;
        Ok(self.delta(x, e))
    }

    /// Runs a string from `x`; `None` as soon as a step is undefined.
    pub fn run(&self, x: StateId, s: &[EventId]) -> Result<Option<StateId>> {
        self.check_state(x)?;
        for &e in s {
            self.check_event(e)?;
        }
        Ok(s.iter().try_fold(x, |cur, &e| self.delta(cur, e)))
    }

    /// Defined transitions leaving `x`, in event order.
    pub fn outgoing(&self, x: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
        self.delta[x.0]
            .iter()
            .enumerate()
            .filter_map(|(e, t)| t.map(|y| (EventId(e), y)))
    }

    /// All defined transitions as `(source, event, target)` triples.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.states()
            .flat_map(move |x| self.outgoing(x).map(move |(e, y)| (x, e, y)))
    }

    pub fn reachable_states(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial.0] = true;
        let mut order = Vec::new();
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for (_, y) in self.outgoing(x) {
                if !seen[y.0] {
                    seen[y.0] = true;
                    queue.push_back(y);
                }
            }
        }
        order.sort();
        order
    }

    /// Reachable states without any outgoing transition. Empty iff the
    /// reachable part is live.
    pub fn check_liveness(&self) -> Vec<StateId> {
        self.reachable_states()
            .into_iter()
            .filter(|&x| self.outgoing(x).next().is_none())
            .collect()
    }

    /// Natural projection onto `alphabet`.
    pub fn project(&self, s: &[EventId], alphabet: &EventSet) -> EventString {
        project(s, alphabet)
    }

    /// Every string of length at most `max_len` generated from the initial
    /// state, in shortlex order.
    pub fn generated_strings(&self, max_len: usize) -> Vec<EventString> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![(Vec::new(), self.initial)];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (s, x) in &frontier {
                for (e, y) in self.outgoing(*x) {
                    let mut t = s.clone();
                    t.push(e);
                    next.push((t, y));
                }
            }
            out.extend(next.iter().map(|(s, _)| s.clone()));
            frontier = next;
        }
        out
    }

    /// Same automaton with different observation masks.
    pub fn with_observability(&self, user: EventSet, intruder: EventSet) -> Automaton {
        assert_eq!(user.universe(), self.num_events());
        assert_eq!(intruder.universe(), self.num_events());
        Automaton {
            user_observable: user,
            intruder_observable: intruder,
            ..self.clone()
        }
    }

    pub fn format_string(&self, s: &[EventId]) -> String {
        if s.is_empty() {
            return "ε".to_string();
        }
        s.iter()
            .map(|&e| self.event_name(e))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format_states(&self, xs: &[StateId]) -> String {
        let names: Vec<&str> = xs.iter().map(|&x| self.state_name(x)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Natural projection: keep the events of `s` that lie in `alphabet`.
pub fn project(s: &[EventId], alphabet: &EventSet) -> EventString {
    s.iter()
        .copied()
        .filter(|&e| alphabet.contains(e))
        .collect()
}

/// Incremental construction with name checking.
#[derive(Clone, Debug, Default)]
pub struct AutomatonBuilder {
    state_names: Vec<String>,
    event_names: Vec<String>,
    user_flags: Vec<bool>,
    intruder_flags: Vec<bool>,
    initial: Option<StateId>,
    transitions: Vec<(StateId, EventId, StateId)>,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> Result<StateId> {
        let name = name.into();
        if self.state_names.contains(&name) {
            return Err(Error::DuplicateName {
                kind: "state",
                name,
            });
        }
        self.state_names.push(name);
        Ok(StateId(self.state_names.len() - 1))
    }

    pub fn add_event(
        &mut self,
        name: impl Into<String>,
        user_observable: bool,
        intruder_observable: bool,
    ) -> Result<EventId> {
        let name = name.into();
        if self.event_names.contains(&name) {
            return Err(Error::DuplicateName {
                kind: "event",
                name,
            });
        }
        self.event_names.push(name);
        self.user_flags.push(user_observable);
        self.intruder_flags.push(intruder_observable);
        Ok(EventId(self.event_names.len() - 1))
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.state_names
            .iter()
            .position(|n| n == name)
            .map(StateId)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn event(&self, name: &str) -> Result<EventId> {
        self.event_names
            .iter()
            .position(|n| n == name)
            .map(EventId)
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    }

    pub fn set_initial(&mut self, x: StateId) -> Result<()> {
        if x.0 >= self.state_names.len() {
            return Err(Error::InvalidState(x.0));
        }
        self.initial = Some(x);
        Ok(())
    }

    pub fn add_transition(&mut self, from: StateId, event: EventId, to: StateId) -> Result<()> {
        for x in [from, to] {
            if x.0 >= self.state_names.len() {
                return Err(Error::InvalidState(x.0));
            }
        }
        if event.0 >= self.event_names.len() {
            return Err(Error::InvalidEvent(event.0));
        }
        if self
            .transitions
            .iter()
            .any(|&(x, e, _)| x == from && e == event)
        {
            return Err(Error::DuplicateTransition {
                state: self.state_names[from.0].clone(),
                event: self.event_names[event.0].clone(),
            });
        }
        self.transitions.push((from, event, to));
        Ok(())
    }

    /// Convenience wrapper resolving names.
    pub fn add_transition_by_name(&mut self, from: &str, event: &str, to: &str) -> Result<()> {
        let (x, e, y) = (self.state(from)?, self.event(event)?, self.state(to)?);
        self.add_transition(x, e, y)
    }

    pub fn build(self, liveness: Liveness) -> Result<Automaton> {
        let initial = self.initial.ok_or(Error::MissingInitial)?;
        let n = self.event_names.len();
        let mut delta = vec![vec![None; n]; self.state_names.len()];
        for (x, e, y) in self.transitions {
            delta[x.0][e.0] = Some(y);
        }
        let flags = |mask: &[bool]| {
            EventSet::from_events(
                n,
                mask.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| EventId(i)),
            )
        };
        let automaton = Automaton {
            user_observable: flags(&self.user_flags),
            intruder_observable: flags(&self.intruder_flags),
            state_names: self.state_names,
            event_names: self.event_names,
            initial,
            delta,
        };
        if liveness == Liveness::Enforce {
            let dead = automaton.check_liveness();
            if !dead.is_empty() {
                return Err(Error::NotLive(
                    dead.iter()
                        .map(|&x| automaton.state_name(x).to_string())
                        .collect(),
                ));
            }
        }
        Ok(automaton)
    }
}

/// Set of strings, used by tests that compare languages.
pub fn string_set(strings: impl IntoIterator<Item = EventString>) -> BTreeSet<EventString> {
    strings.into_iter().collect()
}

//! State-pair observer.
//!
//! Instead of estimating the user's estimate, the intruder estimates the set
//! of state pairs the user cannot tell apart. A state of this observer is a
//! set of ordered pairs `(x1, x2)`: for some run consistent with what the
//! intruder saw, the user's observation of that run is also produced by two
//! runs ending in `x1` and `x2`. The plant is high-order opaque iff no
//! reachable pair set is disjoint from the disambiguation task.
//!
//! Transitions quantify over unbounded strings, so they are computed as
//! reachability in a synchronized product of three copies of the plant:
//!
//! * the *leader* replays the actual continuation, an intruder-observable
//!   event followed by intruder-unobservable events;
//! * two *followers* replay arbitrary runs whose user projections equal the
//!   leader's.
//!
//! Followers move freely on user-unobservable events. When the leader emits a
//! user-observable event, both followers owe that event; the leader may emit
//! the next one only after both obligations are discharged. One outstanding
//! letter per follower is enough because projections are matched in order.
//!
//! With [`Anchoring::Plant`] every pair is kept together with the leader
//! state of the run that produced it (a set of triples), and only that
//! leader continues it. With [`Anchoring::Estimate`] any diagonal pair
//! `(x, x)` may act as the leader for any pair of the set, which is the
//! transition [`pair_transition`] computes. Diagonal pairs also arise from
//! runs the intruder has already ruled out, so that variant can mix a pair
//! with a continuation it could not actually follow.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::automaton::{Automaton, EventId, EventSet, StateId};
use crate::error::{Error, Result};
use crate::knowledge::{DisambiguationTask, Pair};
use crate::verdict::{Method, Verdict};
use crate::Anchoring;

/// `(leader, first follower, second follower)`.
pub type Triple = (StateId, StateId, StateId);

/// Non-empty, sorted set of ordered state pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairSet(Vec<Pair>);

impl PairSet {
    pub fn new(pairs: impl IntoIterator<Item = Pair>) -> Option<Self> {
        let mut v: Vec<Pair> = pairs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        (!v.is_empty()).then_some(PairSet(v))
    }

    /// `xs × xs`.
    pub fn square(xs: &[StateId]) -> Option<Self> {
        Self::new(xs.iter().flat_map(|&x| xs.iter().map(move |&y| (x, y))))
    }

    pub fn as_slice(&self) -> &[Pair] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Pair> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.0.binary_search(&pair).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(x, y)| self.contains((y, x)))
    }

    pub fn has_diagonal(&self) -> bool {
        self.iter().any(|(x, y)| x == y)
    }

    pub fn diagonal(&self) -> impl Iterator<Item = StateId> + '_ {
        self.iter().filter(|(x, y)| x == y).map(|(x, _)| x)
    }

    pub fn meets(&self, task: &DisambiguationTask) -> bool {
        self.iter().any(|p| task.contains(p))
    }

    pub fn render(&self, a: &Automaton) -> String {
        let parts: Vec<String> = self
            .iter()
            .map(|(x, y)| format!("({},{})", a.state_name(x), a.state_name(y)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Display for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(x, y)| format!("({x},{y})")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Owed {
    Nothing,
    Both(EventId),
    First(EventId),
    Second(EventId),
}

type Config = (StateId, StateId, StateId, Owed);

struct SyncSearch<'a> {
    plant: &'a Automaton,
    user: &'a EventSet,
    leader_events: Vec<EventId>,
    follower_events: Vec<EventId>,
}

impl<'a> SyncSearch<'a> {
    fn new(plant: &'a Automaton) -> Self {
        SyncSearch {
            plant,
            user: plant.user_observable(),
            leader_events: plant.intruder_unobservable().iter().collect(),
            follower_events: plant.user_unobservable().iter().collect(),
        }
    }

    /// Seed for a leader that has just fired `event`.
    fn after(&self, leader: StateId, event: EventId, f1: StateId, f2: StateId) -> Option<Config> {
        let next = self.plant.delta(leader, event)?;
        let owed = if self.user.contains(event) {
            Owed::Both(event)
        } else {
            Owed::Nothing
        };
        Some((next, f1, f2, owed))
    }

    /// Every settled triple reachable from the seeds, sorted.
    fn run(&self, seeds: impl IntoIterator<Item = Config>) -> Vec<Triple> {
        let d = |x, e| self.plant.delta(x, e);
        let mut seen: HashSet<Config> = HashSet::new();
        let mut stack: Vec<Config> = Vec::new();
        for s in seeds {
            if seen.insert(s) {
                stack.push(s);
            }
        }
        let mut settled = Vec::new();
        while let Some((x, y1, y2, owed)) = stack.pop() {
            let mut push = |c: Config| {
                if seen.insert(c) {
                    stack.push(c);
                }
            };
            if owed == Owed::Nothing {
                settled.push((x, y1, y2));
            }
            for &e in &self.leader_events {
                if let Some(x2) = d(x, e) {
                    if !self.user.contains(e) {
                        push((x2, y1, y2, owed));
                    } else if owed == Owed::Nothing {
                        push((x2, y1, y2, Owed::Both(e)));
                    }
                }
            }
            for &e in &self.follower_events {
                if let Some(z) = d(y1, e) {
                    push((x, z, y2, owed));
                }
                if let Some(z) = d(y2, e) {
                    push((x, y1, z, owed));
                }
            }
            match owed {
                Owed::Nothing => {}
                Owed::Both(l) => {
                    if let Some(z) = d(y1, l) {
                        push((x, z, y2, Owed::Second(l)));
                    }
                    if let Some(z) = d(y2, l) {
                        push((x, y1, z, Owed::First(l)));
                    }
                }
                Owed::First(l) => {
                    if let Some(z) = d(y1, l) {
                        push((x, z, y2, Owed::Nothing));
                    }
                }
                Owed::Second(l) => {
                    if let Some(z) = d(y2, l) {
                        push((x, y1, z, Owed::Nothing));
                    }
                }
            }
        }
        settled.sort_unstable();
        settled.dedup();
        settled
    }
}

fn project_pairs(triples: &[Triple]) -> Option<PairSet> {
    PairSet::new(triples.iter().map(|&(_, y1, y2)| (y1, y2)))
}

fn initial_triples(a: &Automaton) -> Vec<Triple> {
    let x0 = a.initial();
    SyncSearch::new(a).run([(x0, x0, x0, Owed::Nothing)])
}

/// Pairs the user cannot tell apart before the intruder observes anything.
pub fn initial_pair_state(a: &Automaton) -> PairSet {
    project_pairs(&initial_triples(a)).expect("(x0, x0) is always present")
}

/// One step of the pair observer where every diagonal pair of `q` may act as
/// the actual plant state. `Ok(None)` when no diagonal state can fire
/// `event`.
pub fn pair_transition(a: &Automaton, q: &PairSet, event: EventId) -> Result<Option<PairSet>> {
    a.check_event(event)?;
    if !a.intruder_observable().contains(event) {
        return Err(Error::NotObserved(a.event_name(event).to_string()));
    }
    for (x, y) in q.iter() {
        a.check_state(x)?;
        a.check_state(y)?;
    }
    let search = SyncSearch::new(a);
    let s = &search;
    let seeds: Vec<Config> = q
        .diagonal()
        .flat_map(|x| {
            q.iter()
                .filter_map(move |(y1, y2)| s.after(x, event, y1, y2))
        })
        .collect();
    Ok(project_pairs(&search.run(seeds)))
}

fn anchored_transition(a: &Automaton, triples: &[Triple], event: EventId) -> Vec<Triple> {
    let search = SyncSearch::new(a);
    let seeds: Vec<Config> = triples
        .iter()
        .filter_map(|&(x, y1, y2)| search.after(x, event, y1, y2))
        .collect();
    if seeds.is_empty() {
        return Vec::new();
    }
    search.run(seeds)
}

/// A state of the pair observer. `anchors` holds the `(leader, x1, x2)`
/// triples under plant anchoring and is empty otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairNode {
    pub pairs: PairSet,
    pub anchors: Vec<Triple>,
}

/// Deterministic automaton over pair sets, driven by intruder-observable
/// events only.
#[derive(Clone, Debug)]
pub struct StatePairObserver {
    anchoring: Anchoring,
    alphabet: EventSet,
    nodes: Vec<PairNode>,
    // transitions[node][event]; always `None` for intruder-unobservable events
    transitions: Vec<Vec<Option<usize>>>,
}

impl StatePairObserver {
    pub fn anchoring(&self) -> Anchoring {
        self.anchoring
    }

    /// The intruder alphabet.
    pub fn alphabet(&self) -> &EventSet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn initial_index(&self) -> usize {
        0
    }

    pub fn node(&self, index: usize) -> &PairNode {
        &self.nodes[index]
    }

    pub fn pair_set(&self, index: usize) -> &PairSet {
        &self.nodes[index].pairs
    }

    pub fn next(&self, index: usize, event: EventId) -> Result<Option<usize>> {
        if !self.alphabet.contains(event) {
            return Err(Error::NotObserved(format!("{event}")));
        }
        Ok(self.transitions[index][event.0])
    }

    pub fn outgoing(&self, index: usize) -> impl Iterator<Item = (EventId, usize)> + '_ {
        self.transitions[index]
            .iter()
            .enumerate()
            .filter_map(|(e, t)| t.map(|j| (EventId(e), j)))
    }

    /// State reached by an intruder observation.
    pub fn reached(&self, observation: &[EventId]) -> Result<Option<usize>> {
        let mut q = 0;
        for &e in observation {
            match self.next(q, e)? {
                Some(r) => q = r,
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    /// Shortest observation to a node satisfying `target`, ties broken by
    /// event order.
    pub fn shortest_observation(
        &self,
        mut target: impl FnMut(usize) -> bool,
    ) -> Option<(usize, Vec<EventId>)> {
        // BFS numbering already visits nodes layer by layer in event order;
        // rebuild parents over that order.
        let mut parent: Vec<Option<(usize, EventId)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
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
            for (e, r) in self.outgoing(q) {
                if !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((q, e));
                    queue.push_back(r);
                }
            }
        }
        None
    }
}

/// Builds the plant-anchored pair observer.
pub fn build_state_pair_observer(a: &Automaton) -> StatePairObserver {
    build_state_pair_observer_with(a, Anchoring::Plant)
}

pub fn build_state_pair_observer_with(a: &Automaton, anchoring: Anchoring) -> StatePairObserver {
    let alphabet = a.intruder_observable().clone();
    let intruder_events: Vec<EventId> = alphabet.iter().collect();

    let initial = match anchoring {
        Anchoring::Plant => {
            let anchors = initial_triples(a);
            PairNode {
                pairs: project_pairs(&anchors).expect("non-empty"),
                anchors,
            }
        }
        Anchoring::Estimate => PairNode {
            pairs: initial_pair_state(a),
            anchors: Vec::new(),
        },
    };

    let mut index: HashMap<PairNode, usize> = HashMap::new();
    let mut nodes = vec![initial.clone()];
    index.insert(initial, 0);
    let mut transitions = Vec::new();

    let mut cursor = 0;
    while cursor < nodes.len() {
        let mut row = vec![None; a.num_events()];
        for &e in &intruder_events {
            let successor = match anchoring {
                Anchoring::Plant => {
                    let anchors = anchored_transition(a, &nodes[cursor].anchors, e);
                    project_pairs(&anchors).map(|pairs| PairNode { pairs, anchors })
                }
                Anchoring::Estimate => pair_transition(a, &nodes[cursor].pairs, e)
                    .expect("event is intruder-observable")
                    .map(|pairs| PairNode {
                        pairs,
                        anchors: Vec::new(),
                    }),
            };
            let Some(node) = successor else { continue };
            let j = match index.get(&node) {
                Some(&j) => j,
                None => {
                    nodes.push(node.clone());
                    index.insert(node, nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            row[e.0] = Some(j);
        }
        transitions.push(row);
        cursor += 1;
    }

    StatePairObserver {
        anchoring,
        alphabet,
        nodes,
        transitions,
    }
}

/// High-order opacity through the state-pair observer.
pub fn verify_hoo_pair(a: &Automaton, task: &DisambiguationTask) -> Verdict {
    verify_hoo_pair_with(a, task, Anchoring::Plant)
}

pub fn verify_hoo_pair_with(
    a: &Automaton,
    task: &DisambiguationTask,
    anchoring: Anchoring,
) -> Verdict {
    let obs = build_state_pair_observer_with(a, anchoring);
    match obs.shortest_observation(|q| !obs.pair_set(q).meets(task)) {
        None => Verdict::opaque(Method::Pair),
        Some((q, witness)) => Verdict::violated(Method::Pair, witness, obs.pair_set(q).render(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn events(a: &Automaton, names: &str) -> Vec<EventId> {
        names
            .chars()
            .map(|c| a.event_by_name(&c.to_string()).unwrap())
            .collect()
    }

    fn pairs(list: &[(usize, usize)]) -> PairSet {
        PairSet::new(list.iter().map(|&(x, y)| (StateId(x), StateId(y)))).unwrap()
    }

    fn square(xs: &[usize]) -> PairSet {
        PairSet::square(&xs.iter().map(|&x| StateId(x)).collect::<Vec<_>>()).unwrap()
    }

    fn middle() -> PairSet {
        pairs(&[(3, 3), (3, 4), (4, 3), (4, 4), (6, 6)])
    }

    #[test]
    fn initial_state_examples() {
        let g1 = fixtures::g1();
        assert_eq!(initial_pair_state(&g1), square(&[0, 1, 2]));

        let n = g1.num_events();
        let full = g1.with_observability(EventSet::full(n), EventSet::full(n));
        assert_eq!(initial_pair_state(&full), pairs(&[(0, 0)]));
    }

    #[test]
    fn transition_examples() {
        let g1 = fixtures::g1();
        let [a, b] = [events(&g1, "a")[0], events(&g1, "b")[0]];
        assert_eq!(
            pair_transition(&g1, &square(&[0, 1, 2]), b).unwrap(),
            Some(middle())
        );
        assert_eq!(pair_transition(&g1, &middle(), a).unwrap(), None);
        assert_eq!(
            pair_transition(&g1, &square(&[5, 7]), a).unwrap(),
            Some(square(&[5, 7]))
        );
        let c = events(&g1, "c")[0];
        assert!(matches!(
            pair_transition(&g1, &middle(), c),
            Err(Error::NotObserved(_))
        ));
    }

    #[test]
    fn estimate_anchored_observer_of_g1() {
        let g1 = fixtures::g1();
        let obs = build_state_pair_observer_with(&g1, Anchoring::Estimate);
        assert_eq!(obs.len(), 3);
        let [a, b] = [events(&g1, "a")[0], events(&g1, "b")[0]];
        assert_eq!(obs.pair_set(0), &square(&[0, 1, 2]));
        assert_eq!(obs.next(0, a).unwrap(), Some(0));
        let q1 = obs.next(0, b).unwrap().unwrap();
        assert_eq!(obs.pair_set(q1), &middle());
        assert_eq!(obs.next(q1, a).unwrap(), None);
        let q2 = obs.next(q1, b).unwrap().unwrap();
        assert_eq!(obs.pair_set(q2), &square(&[5, 7]));
        assert_eq!(obs.next(q2, a).unwrap(), Some(q2));
        assert_eq!(obs.next(q2, b).unwrap(), None);
    }

    #[test]
    fn plant_anchored_observer_of_g1() {
        let g1 = fixtures::g1();
        let obs = build_state_pair_observer(&g1);
        let at = |o: &str| {
            obs.reached(&events(&g1, o))
                .unwrap()
                .map(|q| obs.pair_set(q).clone())
        };
        assert_eq!(at(""), Some(square(&[0, 1, 2])));
        assert_eq!(at("a"), Some(square(&[0, 1, 2])));
        assert_eq!(at("b"), Some(middle()));
        assert_eq!(at("ab"), Some(square(&[3, 4])));
        assert_eq!(at("abb"), Some(square(&[5, 7])));
        assert_eq!(at("abba"), Some(square(&[5, 7])));
        assert_eq!(at("bb"), None);
        assert_eq!(at("ba"), None);
    }

    #[test]
    fn g2_bridge_reveals_knowledge() {
        let m = fixtures::g2_model();
        let g2 = &m.automaton;
        let obs = build_state_pair_observer(g2);
        let q = obs.reached(&events(g2, "g")).unwrap().unwrap();
        assert_eq!(obs.pair_set(q), &pairs(&[(7, 7)]));

        let v = verify_hoo_pair(g2, m.task.as_ref().unwrap());
        assert!(!v.opaque);
        assert_eq!(v.witness, Some(events(g2, "g")));
        assert_eq!(v.violating_state.as_deref(), Some("{(7,7)}"));
    }

    #[test]
    fn verdict_examples() {
        let g1 = fixtures::g1();
        for anchoring in [Anchoring::Plant, Anchoring::Estimate] {
            let distinct = DisambiguationTask::all_distinct(&g1);
            assert!(verify_hoo_pair_with(&g1, &distinct, anchoring).opaque);
            let everything = DisambiguationTask::everything(&g1);
            assert!(verify_hoo_pair_with(&g1, &everything, anchoring).opaque);
        }
    }

    #[test]
    fn full_observation_gives_diagonal_singletons() {
        let g2 = fixtures::g2();
        let n = g2.num_events();
        let full = g2.with_observability(EventSet::full(n), EventSet::full(n));
        for anchoring in [Anchoring::Plant, Anchoring::Estimate] {
            let obs = build_state_pair_observer_with(&full, anchoring);
            assert_eq!(obs.len(), full.reachable_states().len());
            for q in 0..obs.len() {
                let p = obs.pair_set(q);
                assert_eq!(p.len(), 1);
                assert!(p.has_diagonal());
            }
        }
    }

    #[test]
    fn rejects_unobservable_event_queries() {
        let g1 = fixtures::g1();
        let obs = build_state_pair_observer(&g1);
        assert!(obs.next(0, events(&g1, "d")[0]).is_err());
        assert!(obs.reached(&events(&g1, "c")).is_err());
    }
}

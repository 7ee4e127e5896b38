//! Double observer: the intruder's observer of the user's observer.
//!
//! Each state of the double observer is the set of user estimates the
//! intruder considers possible. The plant is high-order opaque iff no
//! reachable state consists only of knowing user estimates.
//!
//! With [`Anchoring::Estimate`] the outer subset construction runs directly
//! on the user observer, as in the textbook layering. The user observer's
//! self-loops are what let it stand in for the plant there, so the build
//! checks that it covers the plant first. That layering can combine moves of
//! different members of one user estimate into strings the plant never
//! generates. [`Anchoring::Plant`] runs the outer construction on the
//! synchronous product of plant and user observer instead, which generates
//! exactly the plant language, so each belief is tied to a real run.

use crate::automaton::{Automaton, EventId, StateId};
use crate::knowledge::{knowing_state_indices, DisambiguationTask};
use crate::observer::{subset_construction, user_observer, Observer, ObserverAutomaton, Plant};
use crate::verdict::{Method, Verdict};
use crate::Anchoring;

/// One element of a double-observer state: a user-observer state, optionally
/// paired with the plant state the intruder believes the run is in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserBelief {
    pub user_state: usize,
    pub plant_state: Option<StateId>,
}

struct LayeredPlant<'a> {
    plant: &'a Automaton,
    user: &'a ObserverAutomaton,
    anchoring: Anchoring,
}

impl Plant for LayeredPlant<'_> {
    type State = UserBelief;

    fn initial(&self) -> UserBelief {
        UserBelief {
            user_state: self.user.initial_index(),
            plant_state: match self.anchoring {
                Anchoring::Plant => Some(self.plant.initial()),
                Anchoring::Estimate => None,
            },
        }
    }

    fn num_events(&self) -> usize {
        self.plant.num_events()
    }

    fn successor(&self, b: UserBelief, e: EventId) -> Option<UserBelief> {
        let user_state = self.user.next(b.user_state, e)?;
        let plant_state = match b.plant_state {
            Some(x) => Some(self.plant.delta(x, e)?),
            None => None,
        };
        Some(UserBelief {
            user_state,
            plant_state,
        })
    }
}

/// The user observer together with the intruder's observer built over it.
#[derive(Clone, Debug)]
pub struct DoubleObserver {
    anchoring: Anchoring,
    user: ObserverAutomaton,
    outer: Observer<UserBelief>,
}

impl DoubleObserver {
    pub fn anchoring(&self) -> Anchoring {
        self.anchoring
    }

    pub fn user(&self) -> &ObserverAutomaton {
        &self.user
    }

    pub fn outer(&self) -> &Observer<UserBelief> {
        &self.outer
    }

    pub fn len(&self) -> usize {
        self.outer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outer.is_empty()
    }

    /// User-observer indices believed possible in state `index`, sorted and
    /// without duplicates.
    pub fn beliefs(&self, index: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .outer
            .members(index)
            .iter()
            .map(|b| b.user_state)
            .collect();
        v.dedup();
        v
    }

    /// Renders a state as a set of user estimates, e.g. `{{3,4},{4},{6}}`.
    pub fn render_state(&self, a: &Automaton, index: usize) -> String {
        let mut inner: Vec<_> = self
            .beliefs(index)
            .into_iter()
            .map(|q| self.user.members(q).to_vec())
            .collect();
        inner.sort();
        let parts: Vec<String> = inner.iter().map(|s| a.format_states(s)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Builds the double observer with the exact, plant-anchored layering.
pub fn build_double_observer(a: &Automaton) -> DoubleObserver {
    build_double_observer_with(a, Anchoring::Plant)
}

pub fn build_double_observer_with(a: &Automaton, anchoring: Anchoring) -> DoubleObserver {
    let user = user_observer(a);
    assert!(
        user.covers(a),
        "user observer must accept every plant string before it is layered"
    );
    let outer = subset_construction(
        &LayeredPlant {
            plant: a,
            user: &user,
            anchoring,
        },
        a.intruder_observable(),
    );
    DoubleObserver {
        anchoring,
        user,
        outer,
    }
}

/// High-order opacity through the double observer.
pub fn verify_hoo_double(a: &Automaton, task: &DisambiguationTask) -> Verdict {
    verify_hoo_double_with(a, task, Anchoring::Plant)
}

pub fn verify_hoo_double_with(
    a: &Automaton,
    task: &DisambiguationTask,
    anchoring: Anchoring,
) -> Verdict {
    let double = build_double_observer_with(a, anchoring);
    let mut knowing = vec![false; double.user.len()];
    for q in knowing_state_indices(&double.user, task) {
        knowing[q] = true;
    }
    let revealing = |q: usize| {
        double
            .outer
            .members(q)
            .iter()
            .all(|b| knowing[b.user_state])
    };
    match double.outer.shortest_observation(revealing) {
        None => Verdict::opaque(Method::Double),
        Some((q, witness)) => Verdict::violated(Method::Double, witness, double.render_state(a, q)),
    }
}

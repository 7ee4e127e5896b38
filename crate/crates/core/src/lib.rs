//! High-order opacity for partially observed discrete-event systems.
//!
//! A plant is watched by two observers with their own alphabets: a *user*
//! who tries to resolve a disambiguation task, and an *intruder* who must
//! never become certain that the user has resolved it. Two verifiers decide
//! the property, one through the intruder's observer of the user's observer
//! ([`double`]) and one through sets of user-indistinguishable state pairs
//! ([`pair`]). [`oracle`] evaluates the same definitions by bounded string
//! enumeration and is only meant for cross-checking.

pub mod automaton;
pub mod dot;
pub mod double;
pub mod error;
pub mod fixtures;
pub mod knowledge;
pub mod model;
pub mod observer;
pub mod oracle;
pub mod pair;
pub mod random;
pub mod verdict;

pub use automaton::{
    Automaton, AutomatonBuilder, EventId, EventSet, EventString, Liveness, StateId,
};
pub use double::{
    build_double_observer, build_double_observer_with, verify_hoo_double, verify_hoo_double_with,
    DoubleObserver,
};
pub use error::{Error, Result};
pub use knowledge::{
    know, knowing_states, knows, verify_cso, DisambiguationTask, Pair, SecretStates,
};
pub use model::{parse_model, render_model, Model};
pub use observer::{build_observer, intruder_observer, user_observer, ObserverAutomaton, StateSet};
pub use pair::{
    build_state_pair_observer, build_state_pair_observer_with, initial_pair_state, pair_transition,
    verify_hoo_pair, verify_hoo_pair_with, PairSet, StatePairObserver,
};
pub use verdict::{Method, Verdict};

/// How the intruder-level constructions tie beliefs to the actual run.
///
/// `Plant` keeps the plant state of the run alongside every belief, so the
/// observers only follow strings the plant generates. This is exact and is
/// what the verifiers use by default.
///
/// `Estimate` drives the construction from the user-level estimate alone:
/// the double observer runs on the user observer, and any diagonal pair of a
/// pair set may stand for the actual state. The resulting observers are
/// smaller, but they can combine moves of different runs, so on some plants
/// they report beliefs that no real run supports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Anchoring {
    #[default]
    Plant,
    Estimate,
}

//! Random plants and tasks for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automaton::{Automaton, AutomatonBuilder, Liveness, StateId};
use crate::knowledge::{DisambiguationTask, SecretStates};

#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub num_states: usize,
    pub num_events: usize,
    /// Chance that a given `(state, event)` has a transition, on top of the
    /// one transition per state that keeps the plant live.
    pub density: f64,
}

impl RandomSpec {
    pub fn new(num_states: usize, num_events: usize) -> Self {
        RandomSpec {
            num_states,
            num_events,
            density: 0.35,
        }
    }
}

/// Random live deterministic plant with random observability flags. States
/// are named `0..n`, events `a, b, ...` (then `e<i>` past `z`).
pub fn random_automaton<R: Rng + ?Sized>(rng: &mut R, spec: RandomSpec) -> Automaton {
    assert!(spec.num_states > 0 && spec.num_events > 0);
    let mut b = AutomatonBuilder::new();
    let states: Vec<StateId> = (0..spec.num_states)
        .map(|i| b.add_state(i.to_string()).expect("fresh name"))
        .collect();
    let events: Vec<_> = (0..spec.num_events)
        .map(|i| {
            let name = if i < 26 {
                char::from(b'a' + i as u8).to_string()
            } else {
                format!("e{i}")
            };
            b.add_event(name, rng.gen_bool(0.5), rng.gen_bool(0.5))
                .expect("fresh name")
        })
        .collect();
    b.set_initial(states[0]).expect("declared");
    for &x in &states {
        let forced = *events.choose(rng).expect("non-empty");
        for &e in &events {
            if e == forced || rng.gen_bool(spec.density) {
                let y = *states.choose(rng).expect("non-empty");
                b.add_transition(x, e, y).expect("one transition per pair");
            }
        }
    }
    b.build(Liveness::Enforce)
        .expect("every state has a transition")
}

/// Each ordered pair is included independently with probability `p`.
pub fn random_task<R: Rng + ?Sized>(rng: &mut R, a: &Automaton, p: f64) -> DisambiguationTask {
    DisambiguationTask::new(
        a.states()
            .flat_map(|x| a.states().map(move |y| (x, y)))
            .filter(|_| rng.gen_bool(p))
            .collect::<Vec<_>>(),
    )
}

/// Each state is secret independently with probability `p`.
pub fn random_secrets<R: Rng + ?Sized>(rng: &mut R, a: &Automaton, p: f64) -> SecretStates {
    SecretStates::new(a.states().filter(|_| rng.gen_bool(p)).collect::<Vec<_>>())
}

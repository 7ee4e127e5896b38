//! Bundled example models.

use crate::automaton::Automaton;
use crate::model::{parse_model, Model};

/// Eight-state plant with `Σo = {b, d}` and `Σa = {a, b}`, with the task of
/// knowing the exact current state.
pub const G1_MODEL: &str = include_str!("../fixtures/g1.model");

/// Robot workspace with `Σo = {r, g}` and `Σa = {b, g}`; the task asks the
/// user to tell the no-service regions `{0, 2, 3, 6}` apart from themselves,
/// i.e. to be sure the robot is in a service region.
pub const G2_MODEL: &str = include_str!("../fixtures/g2.model");

pub fn g1_model() -> Model {
    parse_model(G1_MODEL).expect("bundled model parses")
}

pub fn g2_model() -> Model {
    parse_model(G2_MODEL).expect("bundled model parses")
}

pub fn g1() -> Automaton {
    g1_model().automaton
}

pub fn g2() -> Automaton {
    g2_model().automaton
}

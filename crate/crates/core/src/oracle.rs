//! Reference semantics by direct evaluation of the string-quantified
//! definitions. Exponential by design; use it to cross-check the observers on
//! small plants, never as a decision procedure.
//!
//! Quantifiers over plant strings are evaluated in one of two ways:
//!
//! * saturating (the default): the unbounded unobservable tails are explored
//!   as a reachability problem over `(observation prefix, plant state, ...)`,
//!   which yields the exact sets for every observation;
//! * literal: every generated string up to `max_len + slack` is enumerated.
//!   Results are lower bounds that converge as the slack grows.
//!
//! Nothing here reuses the observer or pair-observer code.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::automaton::{project, Automaton, EventId, EventSet, EventString, StateId};
use crate::knowledge::{knows, DisambiguationTask};
use crate::pair::PairSet;
use crate::verdict::{Method, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Length bound on the strings whose observations are checked.
    pub max_len: usize,
    /// `None` saturates unobservable tails; `Some(k)` enumerates strings up
    /// to `max_len + k` literally.
    pub tail_slack: Option<usize>,
}

impl OracleConfig {
    pub fn saturating(max_len: usize) -> Self {
        OracleConfig {
            max_len,
            tail_slack: None,
        }
    }

    pub fn literal(max_len: usize, tail_slack: usize) -> Self {
        OracleConfig {
            max_len,
            tail_slack: Some(tail_slack),
        }
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self::saturating(6)
    }
}

/// Bounded outcome of [`hoo_oracle`]. Absence of a violation is only
/// evidence up to the bound, not a proof of opacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Violation {
        string: EventString,
        observation: EventString,
    },
    NoViolationUpTo(usize),
}

impl OracleOutcome {
    pub fn is_violation(&self) -> bool {
        matches!(self, OracleOutcome::Violation { .. })
    }

    pub fn to_verdict(&self) -> Verdict {
        match self {
            OracleOutcome::Violation { observation, .. } => Verdict {
                opaque: false,
                witness: Some(observation.clone()),
                violating_state: None,
                method: Method::Oracle,
            },
            OracleOutcome::NoViolationUpTo(_) => Verdict::opaque(Method::Oracle),
        }
    }
}

fn delta(a: &Automaton, x: StateId, e: EventId) -> Option<StateId> {
    a.step(x, e).ok().flatten()
}

/// States reachable from `from` through events outside `alphabet`.
fn silent_closure(
    a: &Automaton,
    from: impl IntoIterator<Item = StateId>,
    alphabet: &EventSet,
) -> Vec<StateId> {
    let mut seen: BTreeSet<StateId> = BTreeSet::new();
    let mut stack: Vec<StateId> = from.into_iter().collect();
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        for e in a.events().filter(|&e| !alphabet.contains(e)) {
            if let Some(y) = delta(a, x, e) {
                stack.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// User estimate after the plant fires `event` from estimate `estimate`.
fn extend_estimate(a: &Automaton, estimate: &[StateId], event: EventId) -> Vec<StateId> {
    let user = a.user_observable();
    if !user.contains(event) {
        return estimate.to_vec();
    }
    let moved: Vec<StateId> = estimate
        .iter()
        .filter_map(|&x| delta(a, x, event))
        .collect();
    silent_closure(a, moved, user)
}

/// Strings of length ≤ `len` whose projection onto `alphabet` is `alpha`.
fn literal_strings<'s>(
    strings: &'s [EventString],
    alphabet: &'s EventSet,
    alpha: &'s [EventId],
) -> impl Iterator<Item = &'s EventString> + 's {
    strings
        .iter()
        .filter(move |s| project(s, alphabet) == alpha)
}

/// `{δ(x0, s) : P(s) = α}` for the projection onto `alphabet`.
pub fn estimate_oracle(
    a: &Automaton,
    alphabet: &EventSet,
    alpha: &[EventId],
    cfg: &OracleConfig,
) -> Vec<StateId> {
    if let Some(slack) = cfg.tail_slack {
        let strings = a.generated_strings(cfg.max_len + slack);
        let ends: BTreeSet<StateId> = literal_strings(&strings, alphabet, alpha)
            .filter_map(|s| a.run(a.initial(), s).ok().flatten())
            .collect();
        return ends.into_iter().collect();
    }
    // (matched prefix length, state)
    let mut seen: HashSet<(usize, StateId)> = HashSet::new();
    let mut stack = vec![(0, a.initial())];
    while let Some((k, x)) = stack.pop() {
        if !seen.insert((k, x)) {
            continue;
        }
        for e in a.events() {
            let Some(y) = delta(a, x, e) else { continue };
            if !alphabet.contains(e) {
                stack.push((k, y));
            } else if k < alpha.len() && alpha[k] == e {
                stack.push((k + 1, y));
            }
        }
    }
    let ends: BTreeSet<StateId> = seen
        .into_iter()
        .filter(|&(k, _)| k == alpha.len())
        .map(|(_, x)| x)
        .collect();
    ends.into_iter().collect()
}

/// For all strings `s, t` with `P_o(s) = P_o(t) = α`, `(δ(s), δ(t)) ∉ T`.
/// Vacuously true when no string projects to `α`.
pub fn know_oracle(
    a: &Automaton,
    task: &DisambiguationTask,
    alpha: &[EventId],
    cfg: &OracleConfig,
) -> bool {
    let ends = estimate_oracle(a, a.user_observable(), alpha, cfg);
    ends.iter()
        .all(|&x| ends.iter().all(|&y| !task.contains((x, y))))
}

/// User estimates `X̂_o(P_o(t))` over all `t` with `P_a(t) = α`.
fn user_estimates_behind(
    a: &Automaton,
    alpha: &[EventId],
    cfg: &OracleConfig,
) -> BTreeSet<Vec<StateId>> {
    let intruder = a.intruder_observable();
    if let Some(slack) = cfg.tail_slack {
        let strings = a.generated_strings(cfg.max_len + slack);
        let mut by_user_obs: HashMap<EventString, Vec<StateId>> = HashMap::new();
        let mut out = BTreeSet::new();
        for t in literal_strings(&strings, intruder, alpha) {
            let obs = project(t, a.user_observable());
            let est = by_user_obs
                .entry(obs)
                .or_insert_with_key(|obs| estimate_oracle(a, a.user_observable(), obs, cfg));
            out.insert(est.clone());
        }
        return out;
    }
    // (matched intruder prefix, actual state, user estimate of the run so far)
    type Node = (usize, StateId, Vec<StateId>);
    let x0 = a.initial();
    let start: Node = (0, x0, silent_closure(a, [x0], a.user_observable()));
    let mut seen: HashSet<Node> = HashSet::new();
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        if seen.contains(&node) {
            continue;
        }
        let (k, x, est) = node.clone();
        seen.insert(node);
        for e in a.events() {
            let Some(y) = delta(a, x, e) else { continue };
            let next_k = if !intruder.contains(e) {
                k
            } else if k < alpha.len() && alpha[k] == e {
                k + 1
            } else {
                continue;
            };
            stack.push((next_k, y, extend_estimate(a, &est, e)));
        }
    }
    seen.into_iter()
        .filter(|(k, _, _)| *k == alpha.len())
        .map(|(_, _, est)| est)
        .collect()
}

/// `{(δ(w1), δ(w2)) : ∃t, P_a(t) = α, P_o(w1) = P_o(w2) = P_o(t)}`, or
/// `None` when no string is consistent with `α`.
pub fn pair_set_oracle(a: &Automaton, alpha: &[EventId], cfg: &OracleConfig) -> Option<PairSet> {
    let estimates = user_estimates_behind(a, alpha, cfg);
    PairSet::new(
        estimates
            .iter()
            .flat_map(|e| e.iter().flat_map(move |&x| e.iter().map(move |&y| (x, y)))),
    )
}

/// Looks for a string `s` after which the user knows while every string the
/// intruder confuses with `s` also leaves the user knowing.
pub fn hoo_oracle(a: &Automaton, task: &DisambiguationTask, cfg: &OracleConfig) -> OracleOutcome {
    let mut checked: HashMap<EventString, bool> = HashMap::new();
    for s in a.generated_strings(cfg.max_len) {
        let alpha = project(&s, a.intruder_observable());
        let revealing = *checked.entry(alpha.clone()).or_insert_with(|| {
            let estimates = user_estimates_behind(a, &alpha, cfg);
            !estimates.is_empty() && estimates.iter().all(|e| knows(e, task))
        });
        if revealing {
            return OracleOutcome::Violation {
                string: s,
                observation: alpha,
            };
        }
    }
    OracleOutcome::NoViolationUpTo(cfg.max_len)
}

//! Graphviz export. Output is deterministic: nodes in index order, edges
//! sorted by endpoints, parallel edges merged into one `a,c` label.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::automaton::{Automaton, EventId};
use crate::double::DoubleObserver;
use crate::observer::ObserverAutomaton;
use crate::pair::StatePairObserver;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render(
    a: &Automaton,
    name: &str,
    labels: &[String],
    initial: usize,
    edges: impl IntoIterator<Item = (usize, EventId, usize)>,
) -> String {
    let mut merged: BTreeMap<(usize, usize), Vec<EventId>> = BTreeMap::new();
    for (from, e, to) in edges {
        merged.entry((from, to)).or_default().push(e);
    }
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=ellipse];").unwrap();
    writeln!(out, "  init [shape=point];").unwrap();
    for (i, label) in labels.iter().enumerate() {
        writeln!(out, "  n{i} [label=\"{}\"];", escape(label)).unwrap();
    }
    writeln!(out, "  init -> n{initial};").unwrap();
    for ((from, to), mut events) in merged {
        events.sort();
        events.dedup();
        let label: Vec<&str> = events.iter().map(|&e| a.event_name(e)).collect();
        writeln!(
            out,
            "  n{from} -> n{to} [label=\"{}\"];",
            escape(&label.join(","))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn automaton_dot(a: &Automaton) -> String {
    let labels: Vec<String> = a.states().map(|x| a.state_name(x).to_string()).collect();
    render(
        a,
        "plant",
        &labels,
        a.initial().0,
        a.transitions().map(|(x, e, y)| (x.0, e, y.0)),
    )
}

pub fn observer_dot(a: &Automaton, obs: &ObserverAutomaton) -> String {
    let labels: Vec<String> = (0..obs.len())
        .map(|q| a.format_states(obs.members(q)))
        .collect();
    let edges = (0..obs.len()).flat_map(|q| obs.outgoing(q).map(move |(e, r)| (q, e, r)));
    render(a, "observer", &labels, obs.initial_index(), edges)
}

pub fn double_observer_dot(a: &Automaton, d: &DoubleObserver) -> String {
    let labels: Vec<String> = (0..d.len()).map(|q| d.render_state(a, q)).collect();
    let outer = d.outer();
    let edges = (0..d.len()).flat_map(|q| outer.outgoing(q).map(move |(e, r)| (q, e, r)));
    render(a, "double observer", &labels, outer.initial_index(), edges)
}

pub fn pair_observer_dot(a: &Automaton, p: &StatePairObserver) -> String {
    let labels: Vec<String> = (0..p.len()).map(|q| p.pair_set(q).render(a)).collect();
    let edges = (0..p.len()).flat_map(|q| p.outgoing(q).map(move |(e, r)| (q, e, r)));
    render(a, "pair observer", &labels, p.initial_index(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{AutomatonBuilder, Liveness};
    use crate::observer::user_observer;
    use crate::pair::build_state_pair_observer_with;
    use crate::{fixtures, Anchoring};

    fn count(dot: &str, needle: &str) -> usize {
        dot.lines().filter(|l| l.contains(needle)).count()
    }

    #[test]
    fn user_observer_of_g1() {
        let g1 = fixtures::g1();
        let dot = observer_dot(&g1, &user_observer(&g1));
        assert_eq!(count(&dot, "[label=\"{"), 6);
        assert!(dot.contains("n0 [label=\"{0,1,2}\"];"));
        assert!(dot.contains("n0 -> n0 [label=\"a,c\"];"));
        assert_eq!(dot, observer_dot(&g1, &user_observer(&g1)));
    }

    #[test]
    fn pair_observer_of_g1() {
        let g1 = fixtures::g1();
        let p = build_state_pair_observer_with(&g1, Anchoring::Estimate);
        let dot = pair_observer_dot(&g1, &p);
        assert_eq!(count(&dot, "[label=\"{("), 3);
        assert!(dot.contains("{(3,3),(3,4),(4,3),(4,4),(6,6)}"));
        assert_eq!(count(&dot, " -> n"), 5);
    }

    #[test]
    fn single_loop_plant() {
        let mut b = AutomatonBuilder::new();
        let x = b.add_state("x").unwrap();
        let e = b.add_event("e", true, true).unwrap();
        b.set_initial(x).unwrap();
        b.add_transition(x, e, x).unwrap();
        let a = b.build(Liveness::Enforce).unwrap();
        let p = build_state_pair_observer_with(&a, Anchoring::Plant);
        let dot = pair_observer_dot(&a, &p);
        assert_eq!(count(&dot, "[label=\"{("), 1);
        assert!(dot.contains("n0 -> n0 [label=\"e\"];"));
        assert!(automaton_dot(&a).contains("n0 [label=\"x\"];"));
    }
}

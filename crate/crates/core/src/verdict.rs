use std::fmt;

use crate::automaton::{Automaton, EventString};

/// Which procedure produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Double,
    Pair,
    Cso,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Double => "double",
            Method::Pair => "pair",
            Method::Cso => "cso",
            Method::Oracle => "oracle",
        })
    }
}

/// Outcome of an opacity check. A violation carries the intruder
/// observation that reaches the offending observer state and a rendering of
/// that state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub opaque: bool,
    pub witness: Option<EventString>,
    pub violating_state: Option<String>,
    pub method: Method,
}

impl Verdict {
    pub fn opaque(method: Method) -> Self {
        Verdict {
            opaque: true,
            witness: None,
            violating_state: None,
            method,
        }
    }

    pub fn violated(method: Method, witness: EventString, state: String) -> Self {
        Verdict {
            opaque: false,
            witness: Some(witness),
            violating_state: Some(state),
            method,
        }
    }

    /// Multi-line human-readable report.
    pub fn describe(&self, a: &Automaton, property: &str) -> String {
        if self.opaque {
            return format!("{property}\n");
        }
        let mut out = format!("not {property}\n");
        if let Some(w) = &self.witness {
            out.push_str(&format!("witness: {}\n", a.format_string(w)));
        }
        if let Some(s) = &self.violating_state {
            out.push_str(&format!("state: {s}\n"));
        }
        out
    }
}

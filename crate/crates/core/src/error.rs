use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown state handle {0}")]
    InvalidState(usize),

    #[error("unknown event handle {0}")]
    InvalidEvent(usize),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },

    #[error("transition from `{state}` on `{event}` is already defined")]
    DuplicateTransition { state: String, event: String },

    #[error("no initial state declared")]
    MissingInitial,

    #[error("model is not live: no outgoing transition from {}", .0.join(", "))]
    NotLive(Vec<String>),

    #[error("event `{0}` is not in the observed alphabet")]
    NotObserved(String),

    #[error("observation is not generated by the plant")]
    UndefinedObservation,

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

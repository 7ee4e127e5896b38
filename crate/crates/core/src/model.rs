//! Text model format.
//!
//! One file carries the plant, an optional disambiguation task and an
//! optional secret-state set. Line oriented; `#` starts a comment.
//!
//! ```text
//! states 0 1 2 3
//! initial 0
//! # event <name> <user-observable> <intruder-observable>
//! event a 0 1
//! event b 1 1
//! trans 0 a 1
//! trans 1 b 2
//! task 1 2                # ordered pair (x, x') of the disambiguation task
//! task-distinct           # every (x, x') with x != x'
//! task-diagonal 0 3       # (x, x) for each listed x
//! secret 2 3
//! allow-nonlive
//! ```
//!
//! `states`, `task`, `task-diagonal` and `secret` may repeat; their contents
//! accumulate. Booleans accept `0/1`, `true/false` and `yes/no`.

use std::collections::BTreeSet;

use crate::automaton::{Automaton, AutomatonBuilder, Liveness, StateId};
use crate::error::{Error, Result};
use crate::knowledge::{DisambiguationTask, SecretStates};

/// A parsed model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub automaton: Automaton,
    pub task: Option<DisambiguationTask>,
    pub secrets: Option<SecretStates>,
    pub allow_nonlive: bool,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &content[s..i],
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &content[s..],
            column: content[..s].chars().count() + 1,
        });
    }
    out
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_bool(tok: &Token<'_>, line: usize) -> Result<bool> {
    match tok.text {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        other => Err(parse_error(
            line,
            tok.column,
            format!("expected a boolean, found `{other}`"),
        )),
    }
}

enum TaskEntry {
    Pair(usize, usize, String, String),
    Distinct,
    Diagonal(usize, usize, String),
}

/// Parses and validates a model. Liveness is enforced unless the file
/// carries `allow-nonlive`.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut builder = AutomatonBuilder::new();
    let mut initial: Option<(usize, usize, String)> = None;
    let mut transitions = Vec::new();
    let mut task_entries: Vec<TaskEntry> = Vec::new();
    let mut has_task = false;
    let mut secrets: Option<Vec<(usize, usize, String)>> = None;
    let mut allow_nonlive = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        let args = &toks[1..];
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(parse_error(
                    line,
                    head.column,
                    format!(
                        "`{}` takes {n} argument(s), found {}",
                        head.text,
                        args.len()
                    ),
                ))
            }
        };
        match head.text {
            "states" => {
                for t in args {
                    builder
                        .add_state(t.text)
                        .map_err(|e| parse_error(line, t.column, e.to_string()))?;
                }
            }
            "initial" => {
                arity(1)?;
                if initial.is_some() {
                    return Err(parse_error(
                        line,
                        head.column,
                        "initial state declared twice",
                    ));
                }
                initial = Some((line, args[0].column, args[0].text.to_string()));
            }
            "event" => {
                arity(3)?;
                let user = parse_bool(&args[1], line)?;
                let intruder = parse_bool(&args[2], line)?;
                builder
                    .add_event(args[0].text, user, intruder)
                    .map_err(|e| parse_error(line, args[0].column, e.to_string()))?;
            }
            "trans" => {
                arity(3)?;
                transitions.push((
                    line,
                    [
                        (args[0].column, args[0].text.to_string()),
                        (args[1].column, args[1].text.to_string()),
                        (args[2].column, args[2].text.to_string()),
                    ],
                ));
            }
            "task" => {
                arity(2)?;
                has_task = true;
                task_entries.push(TaskEntry::Pair(
                    line,
                    args[0].column,
                    args[0].text.to_string(),
                    args[1].text.to_string(),
                ));
            }
            "task-distinct" => {
                arity(0)?;
                has_task = true;
                task_entries.push(TaskEntry::Distinct);
            }
            "task-diagonal" => {
                has_task = true;
                for t in args {
                    task_entries.push(TaskEntry::Diagonal(line, t.column, t.text.to_string()));
                }
            }
            "secret" => {
                let list = secrets.get_or_insert_with(Vec::new);
                for t in args {
                    list.push((line, t.column, t.text.to_string()));
                }
            }
            "allow-nonlive" => {
                arity(0)?;
                allow_nonlive = true;
            }
            other => {
                return Err(parse_error(
                    line,
                    head.column,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    let resolve = |b: &AutomatonBuilder, line: usize, column: usize, name: &str| {
        b.state(name)
            .map_err(|e| parse_error(line, column, e.to_string()))
    };

    let (line, column, name) = initial.ok_or(Error::MissingInitial)?;
    let x0 = resolve(&builder, line, column, &name)?;
    builder.set_initial(x0)?;

    for (line, [(c0, src), (c1, ev), (c2, dst)]) in transitions {
        let x = resolve(&builder, line, c0, &src)?;
        let e = builder
            .event(&ev)
            .map_err(|e| parse_error(line, c1, e.to_string()))?;
        let y = resolve(&builder, line, c2, &dst)?;
        builder
            .add_transition(x, e, y)
            .map_err(|e| parse_error(line, c0, e.to_string()))?;
    }

    let mut pairs = BTreeSet::new();
    let mut wants_distinct = false;
    for entry in &task_entries {
        match entry {
            TaskEntry::Pair(line, column, x, y) => {
                let x = resolve(&builder, *line, *column, x)?;
                let y = resolve(&builder, *line, *column, y)?;
                pairs.insert((x, y));
            }
            TaskEntry::Diagonal(line, column, x) => {
                let x = resolve(&builder, *line, *column, x)?;
                pairs.insert((x, x));
            }
            TaskEntry::Distinct => wants_distinct = true,
        }
    }

    let secret_ids = match &secrets {
        Some(list) => Some(
            list.iter()
                .map(|(line, column, name)| resolve(&builder, *line, *column, name))
                .collect::<Result<BTreeSet<StateId>>>()?,
        ),
        None => None,
    };

    let liveness = if allow_nonlive {
        Liveness::Allow
    } else {
        Liveness::Enforce
    };
    let automaton = builder.build(liveness)?;

    if wants_distinct {
        pairs.extend(
            DisambiguationTask::all_distinct(&automaton)
                .pairs()
                .iter()
                .copied(),
        );
    }

    Ok(Model {
        task: has_task.then(|| DisambiguationTask::new(pairs)),
        secrets: secret_ids.map(SecretStates::new),
        automaton,
        allow_nonlive,
    })
}

/// Canonical text form: explicit task pairs, sorted sets, transitions in
/// (state, event) order.
pub fn render_model(model: &Model) -> String {
    let a = &model.automaton;
    let mut out = String::new();
    let names: Vec<&str> = a.states().map(|x| a.state_name(x)).collect();
    out.push_str(&format!("states {}\n", names.join(" ")));
    out.push_str(&format!("initial {}\n", a.state_name(a.initial())));
    for e in a.events() {
        out.push_str(&format!(
            "event {} {} {}\n",
            a.event_name(e),
            u8::from(a.user_observable().contains(e)),
            u8::from(a.intruder_observable().contains(e)),
        ));
    }
    for (x, e, y) in a.transitions() {
        out.push_str(&format!(
            "trans {} {} {}\n",
            a.state_name(x),
            a.event_name(e),
            a.state_name(y)
        ));
    }
    if let Some(task) = &model.task {
        if task.pairs().is_empty() {
            // keeps an empty task distinguishable from no task
            out.push_str("task-diagonal\n");
        }
        for &(x, y) in task.pairs() {
            out.push_str(&format!("task {} {}\n", a.state_name(x), a.state_name(y)));
        }
    }
    if let Some(secrets) = &model.secrets {
        let names: Vec<&str> = secrets.iter().map(|x| a.state_name(x)).collect();
        if names.is_empty() {
            out.push_str("secret\n");
        } else {
            out.push_str(&format!("secret {}\n", names.join(" ")));
        }
    }
    if model.allow_nonlive {
        out.push_str("allow-nonlive\n");
    }
    out
}

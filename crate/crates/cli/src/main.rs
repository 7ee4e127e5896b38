use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::{fs, thread};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hoopac::dot::{double_observer_dot, observer_dot, pair_observer_dot};
use hoopac::oracle::{hoo_oracle, OracleConfig, OracleOutcome};
use hoopac::{
    build_double_observer_with, build_state_pair_observer_with, intruder_observer, parse_model,
    user_observer, verify_cso, verify_hoo_double_with, verify_hoo_pair_with, Anchoring, Automaton,
    DisambiguationTask, Model, Verdict,
};

const HOLDS: u8 = 0;
const VIOLATED: u8 = 1;
const FAILURE: u8 = 2;
const DISAGREEMENT: u8 = 3;

/// Verify high-order opacity of partially observed discrete-event systems.
#[derive(Parser)]
#[command(name = "hoopac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an opacity property; exit 0 if it holds, 1 if violated.
    Verify {
        #[command(subcommand)]
        property: Property,
    },
    /// Print the user's or the intruder's observer.
    Observer {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Viewer::User)]
        viewer: Viewer,
    },
    /// Print the state-pair observer.
    PairObserver {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = AnchoringArg::Plant)]
        anchoring: AnchoringArg,
    },
    /// Bounded brute-force search for a high-order opacity violation.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        task: TaskArgs,
        /// Length bound on the plant strings checked.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Enumerate unobservable tails up to this many extra events instead
        /// of saturating them.
        #[arg(long)]
        tail_slack: Option<usize>,
    },
}

#[derive(Subcommand)]
enum Property {
    /// High-order opacity against the model's disambiguation task.
    Hoo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Pair)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = AnchoringArg::Plant)]
        anchoring: AnchoringArg,
    },
    /// Current-state opacity against the model's secret states.
    Cso {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Write the relevant automaton as Graphviz DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct TaskArgs {
    /// Ignore the task in the model and require knowing the exact state.
    #[arg(long)]
    all_distinct: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Double,
    Pair,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Viewer {
    User,
    Intruder,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnchoringArg {
    /// Exact: beliefs stay tied to real plant runs.
    Plant,
    /// Beliefs driven by the user estimate alone.
    Estimate,
}

impl From<AnchoringArg> for Anchoring {
    fn from(a: AnchoringArg) -> Self {
        match a {
            AnchoringArg::Plant => Anchoring::Plant,
            AnchoringArg::Estimate => Anchoring::Estimate,
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Model> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_model(&text).with_context(|| format!("{}", path.display()))
}

fn task_of(model: &Model, args: &TaskArgs) -> anyhow::Result<DisambiguationTask> {
    if args.all_distinct {
        return Ok(DisambiguationTask::all_distinct(&model.automaton));
    }
    match &model.task {
        Some(t) => Ok(t.clone()),
        None => bail!("model declares no disambiguation task (use --all-distinct)"),
    }
}

fn write_dot(path: Option<&PathBuf>, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    if let Some(p) = path {
        fs::write(p, text()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

fn report(a: &Automaton, verdict: &Verdict, property: &str) -> u8 {
    print!("{}", verdict.describe(a, property));
    if verdict.opaque {
        HOLDS
    } else {
        VIOLATED
    }
}

fn print_observer(labels: &[String], edges: &[(usize, String, usize)]) {
    for (i, l) in labels.iter().enumerate() {
        println!("q{i} {l}");
    }
    for (q, e, r) in edges {
        println!("q{q} --{e}--> q{r}");
    }
}

fn verify_hoo(
    model: &Model,
    task: &DisambiguationTask,
    method: MethodArg,
    anchoring: Anchoring,
    dot: Option<&PathBuf>,
) -> anyhow::Result<u8> {
    let a = &model.automaton;
    let verdict = match method {
        MethodArg::Double => {
            write_dot(dot, || {
                double_observer_dot(a, &build_double_observer_with(a, anchoring))
            })?;
            verify_hoo_double_with(a, task, anchoring)
        }
        MethodArg::Pair => {
            write_dot(dot, || {
                pair_observer_dot(a, &build_state_pair_observer_with(a, anchoring))
            })?;
            verify_hoo_pair_with(a, task, anchoring)
        }
        MethodArg::Both => {
            write_dot(dot, || {
                pair_observer_dot(a, &build_state_pair_observer_with(a, anchoring))
            })?;
            let (double, pair) = thread::scope(|s| {
                let d = s.spawn(|| verify_hoo_double_with(a, task, anchoring));
                let p = s.spawn(|| verify_hoo_pair_with(a, task, anchoring));
                (d.join(), p.join())
            });
            let double = double.map_err(|_| anyhow::anyhow!("double-observer check panicked"))?;
            let pair = pair.map_err(|_| anyhow::anyhow!("pair-observer check panicked"))?;
            if double.opaque != pair.opaque {
                eprintln!(
                    "verifiers disagree: double says {}, pair says {}",
                    double.opaque, pair.opaque
                );
                return Ok(DISAGREEMENT);
            }
            pair
        }
    };
    Ok(report(a, &verdict, "high-order opaque"))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Verify {
            property:
                Property::Hoo {
                    common,
                    task,
                    method,
                    anchoring,
                },
        } => {
            let model = load(&common.model)?;
            let t = task_of(&model, &task)?;
            verify_hoo(&model, &t, method, anchoring.into(), common.dot.as_ref())
        }
        Command::Verify {
            property: Property::Cso { common },
        } => {
            let model = load(&common.model)?;
            let Some(secrets) = &model.secrets else {
                bail!("model declares no secret states");
            };
            let a = &model.automaton;
            write_dot(common.dot.as_ref(), || {
                observer_dot(a, &intruder_observer(a))
            })?;
            Ok(report(a, &verify_cso(a, secrets), "current-state opaque"))
        }
        Command::Observer { common, viewer } => {
            let model = load(&common.model)?;
            let a = &model.automaton;
            let obs = match viewer {
                Viewer::User => user_observer(a),
                Viewer::Intruder => intruder_observer(a),
            };
            write_dot(common.dot.as_ref(), || observer_dot(a, &obs))?;
            let labels: Vec<String> = (0..obs.len())
                .map(|q| a.format_states(obs.members(q)))
                .collect();
            let edges: Vec<_> = (0..obs.len())
                .flat_map(|q| obs.outgoing(q).map(move |(e, r)| (q, e, r)))
                .map(|(q, e, r)| (q, a.event_name(e).to_string(), r))
                .collect();
            print_observer(&labels, &edges);
            Ok(HOLDS)
        }
        Command::PairObserver { common, anchoring } => {
            let model = load(&common.model)?;
            let a = &model.automaton;
            let obs = build_state_pair_observer_with(a, anchoring.into());
            write_dot(common.dot.as_ref(), || pair_observer_dot(a, &obs))?;
            let labels: Vec<String> = (0..obs.len()).map(|q| obs.pair_set(q).render(a)).collect();
            let edges: Vec<_> = (0..obs.len())
                .flat_map(|q| obs.outgoing(q).map(move |(e, r)| (q, e, r)))
                .map(|(q, e, r)| (q, a.event_name(e).to_string(), r))
                .collect();
            print_observer(&labels, &edges);
            Ok(HOLDS)
        }
        Command::Oracle {
            common,
            task,
            max_len,
            tail_slack,
        } => {
            let model = load(&common.model)?;
            let t = task_of(&model, &task)?;
            let a = &model.automaton;
            write_dot(common.dot.as_ref(), || hoopac::dot::automaton_dot(a))?;
            let cfg = OracleConfig {
                max_len,
                tail_slack,
            };
            match hoo_oracle(a, &t, &cfg) {
                OracleOutcome::Violation {
                    string,
                    observation,
                } => {
                    println!("not high-order opaque");
                    println!("witness: {}", a.format_string(&observation));
                    println!("string: {}", a.format_string(&string));
                    Ok(VIOLATED)
                }
                OracleOutcome::NoViolationUpTo(n) => {
                    println!("no violation up to length {n} (bounded check, not a proof)");
                    Ok(HOLDS)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(FAILURE)
        }
    }
}

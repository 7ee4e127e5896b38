//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report shows up in `cargo test` output.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use hoopac::observer::{Observer, ObserverAutomaton};
use hoopac::oracle::{estimate_oracle, know_oracle, pair_set_oracle, OracleConfig};
use hoopac::random::{random_automaton, random_secrets, random_task, RandomSpec};
use hoopac::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failures: Vec<usize>,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, detail: String) {
        println!(
            "criterion {n}: {} ({detail})",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(n);
        }
    }
}

fn events(a: &Automaton, names: &str) -> Vec<EventId> {
    names
        .chars()
        .map(|c| a.event_by_name(&c.to_string()).unwrap())
        .collect()
}

/// `(from label, event, to label)` for every observer edge.
fn edges<T: Copy + Ord + std::hash::Hash + std::fmt::Debug>(
    a: &Automaton,
    obs: &Observer<T>,
    label: impl Fn(usize) -> String,
) -> BTreeSet<(String, String, String)> {
    (0..obs.len())
        .flat_map(|q| {
            obs.outgoing(q)
                .map(|(e, r)| (label(q), a.event_name(e).to_string(), label(r)))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn edge_set(list: &[(&str, &str, &str)]) -> BTreeSet<(String, String, String)> {
    list.iter()
        .map(|&(f, e, t)| (f.to_string(), e.to_string(), t.to_string()))
        .collect()
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let g1 = fixtures::g1();
    let mut problems = Vec::new();

    let user = user_observer(&g1);
    let user_edges = edges(&g1, &user, |q| g1.format_states(user.members(q)));
    let want_user = edge_set(&[
        ("{0,1,2}", "a", "{0,1,2}"),
        ("{0,1,2}", "c", "{0,1,2}"),
        ("{0,1,2}", "b", "{3,4}"),
        ("{3,4}", "d", "{6}"),
        ("{3,4}", "b", "{5,7}"),
        ("{6}", "d", "{4}"),
        ("{4}", "d", "{6}"),
        ("{5,7}", "a", "{5,7}"),
        ("{5,7}", "d", "{7}"),
        ("{7}", "d", "{7}"),
    ]);
    if user.len() != 6 || user_edges != want_user {
        problems.push("user observer");
    }

    let double = build_double_observer_with(&g1, Anchoring::Estimate);
    let double_edges = edges(&g1, double.outer(), |q| double.render_state(&g1, q));
    let want_double = edge_set(&[
        ("{{0,1,2}}", "a", "{{0,1,2}}"),
        ("{{0,1,2}}", "c", "{{0,1,2}}"),
        ("{{0,1,2}}", "b", "{{3,4},{4},{6}}"),
        ("{{3,4},{4},{6}}", "d", "{{3,4},{4},{6}}"),
        ("{{3,4},{4},{6}}", "b", "{{5,7},{7}}"),
        ("{{5,7},{7}}", "a", "{{5,7},{7}}"),
        ("{{5,7},{7}}", "d", "{{5,7},{7}}"),
    ]);
    if double.len() != 3 || double_edges != want_double {
        problems.push("double observer");
    }

    let pair = build_state_pair_observer_with(&g1, Anchoring::Estimate);
    let pair_edges: BTreeSet<_> = (0..pair.len())
        .flat_map(|q| {
            pair.outgoing(q)
                .map(|(e, r)| {
                    (
                        pair.pair_set(q).render(&g1),
                        g1.event_name(e).to_string(),
                        pair.pair_set(r).render(&g1),
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let p0 = "{(0,0),(0,1),(0,2),(1,0),(1,1),(1,2),(2,0),(2,1),(2,2)}";
    let p1 = "{(3,3),(3,4),(4,3),(4,4),(6,6)}";
    let p2 = "{(5,5),(5,7),(7,5),(7,7)}";
    let want_pair = edge_set(&[(p0, "a", p0), (p0, "b", p1), (p1, "b", p2), (p2, "a", p2)]);
    if pair.len() != 3 || pair_edges != want_pair {
        problems.push("pair observer");
    }

    let task = DisambiguationTask::all_distinct(&g1);
    for anchoring in [Anchoring::Plant, Anchoring::Estimate] {
        if !verify_hoo_double_with(&g1, &task, anchoring).opaque
            || !verify_hoo_pair_with(&g1, &task, anchoring).opaque
        {
            problems.push("verdict");
        }
    }

    let elapsed = start.elapsed();
    let ok = problems.is_empty() && elapsed < Duration::from_secs(1);
    r.line(
        1,
        ok,
        format!(
            "G1: 6/3/3 observer states, expected edges match, opaque; mismatches {problems:?}; {elapsed:?}"
        ),
    );
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let m = fixtures::g2_model();
    let g2 = &m.automaton;
    let task = m.task.clone().unwrap();
    let g = Some(events(g2, "g"));
    let double = verify_hoo_double(g2, &task);
    let pair = verify_hoo_pair(g2, &task);
    let cso = verify_cso(g2, m.secrets.as_ref().unwrap());
    let ok_double = !double.opaque && double.witness == g;
    let ok_pair = !pair.opaque && pair.witness == g;
    let ok_cso = !cso.opaque && cso.witness == Some(vec![]);
    let elapsed = start.elapsed();
    r.line(
        2,
        ok_double && ok_pair && ok_cso && elapsed < Duration::from_secs(1),
        format!(
            "G2: double {} pair {} cso {}; {elapsed:?}",
            describe(g2, &double),
            describe(g2, &pair),
            describe(g2, &cso)
        ),
    );
}

fn describe(a: &Automaton, v: &Verdict) -> String {
    match &v.witness {
        None => "opaque".into(),
        Some(w) => format!("violated@{}", a.format_string(w)),
    }
}

fn random_instance(rng: &mut ChaCha8Rng, max_states: usize) -> (Automaton, DisambiguationTask) {
    let n = rng.gen_range(1..=max_states);
    let m = rng.gen_range(1..=4);
    let a = random_automaton(rng, RandomSpec::new(n, m));
    let p = rng.gen_range(0.0..0.5);
    let t = random_task(rng, &a, p);
    (a, t)
}

fn criterion_3(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let total = 500;
    let mut disagreements = 0;
    let mut violated = 0;
    for _ in 0..total {
        let (a, t) = random_instance(&mut rng, 6);
        let d = verify_hoo_double(&a, &t);
        let p = verify_hoo_pair(&a, &t);
        if d.opaque != p.opaque {
            disagreements += 1;
        }
        violated += usize::from(!p.opaque);
    }
    let elapsed = start.elapsed();
    r.line(
        3,
        disagreements == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{total} plants, {violated} not opaque, {disagreements} disagreements; {elapsed:?}"
        ),
    );
}

#[derive(Default)]
struct Mismatches {
    observations: usize,
    estimate: usize,
    know: usize,
    pair: usize,
}

/// Walks every word over `alphabet` up to `max_len`, pruning below words no
/// plant string projects to.
fn for_each_word(alphabet: &[EventId], max_len: usize, visit: &mut dyn FnMut(&[EventId]) -> bool) {
    fn go(
        alphabet: &[EventId],
        max_len: usize,
        word: &mut Vec<EventId>,
        visit: &mut dyn FnMut(&[EventId]) -> bool,
    ) {
        if !visit(word) || word.len() == max_len {
            return;
        }
        for &e in alphabet {
            word.push(e);
            go(alphabet, max_len, word, visit);
            word.pop();
        }
    }
    go(alphabet, max_len, &mut Vec::new(), visit);
}

fn check_estimates(
    a: &Automaton,
    obs: &ObserverAutomaton,
    alphabet: &EventSet,
    task: Option<&DisambiguationTask>,
    cfg: &OracleConfig,
    out: &mut Mismatches,
) {
    let letters: Vec<EventId> = alphabet.iter().collect();
    for_each_word(&letters, cfg.max_len, &mut |alpha| {
        out.observations += 1;
        let oracle = estimate_oracle(a, alphabet, alpha, cfg);
        let built = obs.estimate(alpha).unwrap();
        let built_states: Vec<StateId> = built.iter().flat_map(|s| s.iter()).collect();
        if oracle != built_states {
            out.estimate += 1;
        }
        if let (Some(t), true) = (task, built.is_some()) {
            if know_oracle(a, t, alpha, cfg) != know(obs, t, alpha).unwrap() {
                out.know += 1;
            }
        }
        !oracle.is_empty()
    });
}

fn criterion_4(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = OracleConfig::saturating(6);
    let mut m = Mismatches::default();
    let mut plants = 0;
    for _ in 0..500 {
        let (a, t) = random_instance(&mut rng, 6);
        if a.num_states() > 5 {
            continue;
        }
        plants += 1;
        check_estimates(
            &a,
            &user_observer(&a),
            a.user_observable(),
            Some(&t),
            &cfg,
            &mut m,
        );
        check_estimates(
            &a,
            &intruder_observer(&a),
            a.intruder_observable(),
            None,
            &cfg,
            &mut m,
        );

        let pair = build_state_pair_observer(&a);
        let letters: Vec<EventId> = a.intruder_observable().iter().collect();
        for_each_word(&letters, cfg.max_len, &mut |alpha| {
            let oracle = pair_set_oracle(&a, alpha, &cfg);
            let built = pair
                .reached(alpha)
                .unwrap()
                .map(|q| pair.pair_set(q).clone());
            if oracle != built {
                m.pair += 1;
            }
            oracle.is_some()
        });
    }
    let total = m.estimate + m.know + m.pair;
    r.line(
        4,
        total == 0,
        format!(
            "{plants} plants, {} observations; mismatches estimate {} know {} pair {}; {:?}",
            m.observations,
            m.estimate,
            m.know,
            m.pair,
            start.elapsed()
        ),
    );
}

fn criterion_5(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let total = 200;
    let mut mismatches = 0;
    let mut violated = 0;
    for _ in 0..total {
        let (a, _) = random_instance(&mut rng, 6);
        let density = rng.gen_range(0.2..0.9);
        let secrets = random_secrets(&mut rng, &a, density);
        let full = a.with_observability(
            EventSet::full(a.num_events()),
            a.intruder_observable().clone(),
        );
        let task = DisambiguationTask::from_secrets(&full, &secrets);
        let hoo = verify_hoo_pair(&full, &task);
        let cso = verify_cso(&full, &secrets);
        if hoo.opaque != cso.opaque {
            mismatches += 1;
        }
        violated += usize::from(!cso.opaque);
    }
    r.line(
        5,
        mismatches == 0,
        format!(
            "{total} plants with full user view, {violated} not current-state opaque, {mismatches} mismatches; {:?}",
            start.elapsed()
        ),
    );
}

fn criterion_6(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut plants = vec![fixtures::g1(), fixtures::g2()];
    for _ in 0..100 {
        plants.push(random_instance(&mut rng, 6).0);
    }
    let (mut bad_pairs, mut bad_cover, mut bad_sym, mut pair_sets) = (0, 0, 0, 0);
    for a in &plants {
        for anchoring in [Anchoring::Plant, Anchoring::Estimate] {
            let p = build_state_pair_observer_with(a, anchoring);
            for q in 0..p.len() {
                pair_sets += 1;
                let s = p.pair_set(q);
                if s.is_empty() || !s.is_symmetric() || !s.has_diagonal() {
                    bad_pairs += 1;
                }
            }
        }
        let user = user_observer(a);
        let intruder = intruder_observer(a);
        let double = build_double_observer(a);
        for s in a.generated_strings(6) {
            if user.run_string(&s).is_none()
                || intruder.run_string(&s).is_none()
                || double.outer().run_string(&s).is_none()
            {
                bad_cover += 1;
            }
        }
        let tasks = [
            DisambiguationTask::all_distinct(a),
            random_task(&mut rng, a, 0.2),
            random_task(&mut rng, a, 0.5),
        ];
        for t in &tasks {
            let sym = t.symmetrized();
            if (0..user.len()).any(|q| knows(user.members(q), t) != knows(user.members(q), &sym)) {
                bad_sym += 1;
            }
            if verify_hoo_pair(a, t).opaque != verify_hoo_pair(a, &sym).opaque {
                bad_sym += 1;
            }
        }
    }
    r.line(
        6,
        bad_pairs + bad_cover + bad_sym == 0,
        format!(
            "{} plants, {pair_sets} pair sets; bad pair sets {bad_pairs}, uncovered strings {bad_cover}, symmetrization changes {bad_sym}; {:?}",
            plants.len(),
            start.elapsed()
        ),
    );
}

fn criterion_7(r: &mut Report) {
    let mut worst = Duration::ZERO;
    let mut largest = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let a = random_automaton(&mut rng, RandomSpec::new(10, 5));
        let t = random_task(&mut rng, &a, 0.3);
        let start = Instant::now();
        let _ = verify_hoo_pair(&a, &t);
        worst = worst.max(start.elapsed());
        largest = largest.max(build_state_pair_observer(&a).len());
    }
    r.line(
        7,
        worst < Duration::from_secs(10),
        format!("20 plants with 10 states, 5 events; slowest {worst:?}, largest observer {largest} states"),
    );
}

fn main() {
    let mut r = Report {
        failures: Vec::new(),
    };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    if !r.failures.is_empty() {
        eprintln!("failed criteria: {:?}", r.failures);
        std::process::exit(1);
    }
}

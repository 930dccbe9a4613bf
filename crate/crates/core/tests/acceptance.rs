//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the criteria execute sequentially (two of them measure time)
//! and the summary lines are always printed.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use besynth::arena::Arena;
use besynth::bench::{gen_arch_benchmark, run_instance, BenchConfig, Outcome};
use besynth::best_effort::{synthesize, BestEffortStrategy, Classification, Mode};
use besynth::dfa::compile;
use besynth::domain::{ActionId, Domain, DomainTrace, ReactionId};
use besynth::game::{
    solve_adversarial_reach, solve_adversarial_safe_reach, solve_cooperative_reach,
    solve_cooperative_safe_reach,
};
use besynth::ltlf::evaluate;
use besynth::random::{self, DomainShape};
use besynth::runtime::{
    play, satisfied_in_domain, AdversarialEnv, Environment, InteractiveEnv, PlayOptions,
    RandomEnv, RuntimeError, ScriptedEnv, Turn,
};
use besynth::{FiniteTrace, Formula};
use common::{bits, Table};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

/// Arch instances used throughout: every `O <= L` with `O <= 2, L <= 3`.
const ARCH_SMALL: [(usize, usize); 5] = [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3)];

fn arch(o: usize, l: usize) -> (Arc<Domain>, Formula) {
    let (d, g) = gen_arch_benchmark(o, l).expect("valid size");
    (Arc::new(d), g)
}

/// Random valid domains paired with random goals of size <= 4.
fn random_instances(seed: u64, count: usize, shape: DomainShape) -> Vec<(Arc<Domain>, Formula)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let d = random::domain(&mut rng, shape);
            let g = random::formula(&mut rng, d.fluents(), 4);
            (Arc::new(d), g)
        })
        .collect()
}

fn strategies(instances: &[(Arc<Domain>, Formula)]) -> Vec<BestEffortStrategy> {
    instances
        .iter()
        .map(|(d, g)| synthesize(d, g).expect("valid instance synthesizes"))
        .collect()
}

fn arena_sets(a: &Arena) -> (Vec<bool>, Vec<bool>, Vec<bool>) {
    let n = a.states().len();
    (
        bits(&a.adversarial_target(), n),
        bits(&a.cooperative_target(), n),
        (0..n).map(|t| a.is_error(t)).collect(),
    )
}

fn c1_dfa_oracle() -> Verdict {
    let clock = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xD7A);
    let mut formulas = 0;
    let mut checked = 0usize;
    for _ in 0..200 {
        let fl = random::fluent_set(rng.gen_range(1..=3));
        let f = random::formula(&mut rng, &fl, 6);
        let dfa = compile(&f, &fl).map_err(|e| format!("{f}: {e}"))?;
        for t in FiniteTrace::enumerate(&fl, 4) {
            let want = evaluate(&f, &t, 0).unwrap();
            let got = dfa.accepts(&t).unwrap();
            ensure!(want == got, "{f} on {:?}: dfa {got}, semantics {want}", t.instants());
            checked += 1;
        }
        formulas += 1;
    }
    let el = clock.elapsed();
    ensure!(el < Duration::from_secs(60), "took {el:?}");
    Ok(format!("{formulas} formulas, {checked} trace checks, 0 mismatches, {el:.2?}"))
}

fn c2_game_oracle() -> Verdict {
    let clock = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x6A3E);
    let games = 150;
    for i in 0..games {
        let g = random::game(&mut rng, 8, 3, 3);
        let tbl = Table::of(&g);
        let target: Vec<bool> = (0..g.num_states).map(|_| rng.gen_bool(0.25)).collect();
        let tset = common::to_set(&target);

        let adv = solve_adversarial_reach(&g, &tset);
        let coop = solve_cooperative_reach(&g, &tset);
        let oracle_adv = common::enumerate_adv(&tbl, &target);
        let oracle_coop = common::enumerate_coop(&tbl, &target);
        ensure!(bits(&adv.region, g.num_states) == oracle_adv, "game {i}: adversarial region differs");
        ensure!(bits(&coop.region, g.num_states) == oracle_coop, "game {i}: cooperative region differs");

        let complete = |s: &[Option<usize>]| s.iter().map(|a| a.unwrap_or(0)).collect::<Vec<_>>();
        let forced = common::forced_by(&tbl, &complete(&adv.strategy), &target);
        let possible = common::possible_by(&tbl, &complete(&coop.strategy), &target);
        for t in 0..g.num_states {
            ensure!(!oracle_adv[t] || forced[t], "game {i}: adversarial strategy loses from {t}");
            ensure!(!oracle_coop[t] || possible[t], "game {i}: cooperative strategy misses from {t}");
        }
    }
    let el = clock.elapsed();
    ensure!(el < Duration::from_secs(60), "took {el:?}");
    Ok(format!("{games} games match positional-strategy enumeration, {el:.2?}"))
}

fn c3_safe_to_reach(all: &[BestEffortStrategy]) -> Verdict {
    for (i, s) in all.iter().enumerate() {
        let a = s.arena();
        let n = a.states().len();
        let tbl = Table::of(a.as_ref());

        let safe_adv = a.non_agent_error();
        let mut goal_or_env = a.env_error().clone();
        goal_or_env.union_with(a.goal());
        let lhs = solve_adversarial_safe_reach(a.as_ref(), &safe_adv, &goal_or_env);
        let rhs = solve_adversarial_reach(a.as_ref(), &a.adversarial_target()).region;
        let oracle = common::adv_safe_reach(&tbl, &bits(&safe_adv, n), &bits(&goal_or_env, n));
        ensure!(lhs == rhs, "arena {i}: adversarial SafeReach differs from reduced Reach");
        ensure!(bits(&lhs, n) == oracle, "arena {i}: adversarial SafeReach differs from oracle");

        let safe_coop = a.non_error();
        let lhs = solve_cooperative_safe_reach(a.as_ref(), &safe_coop, a.goal());
        let rhs = solve_cooperative_reach(a.as_ref(), &a.cooperative_target()).region;
        let oracle = common::coop_safe_reach(&tbl, &bits(&safe_coop, n), &bits(a.goal(), n));
        ensure!(lhs == rhs, "arena {i}: cooperative SafeReach differs from reduced Reach");
        ensure!(bits(&lhs, n) == oracle, "arena {i}: cooperative SafeReach differs from oracle");
    }
    Ok(format!("{} composed arenas, both variants set-equal", all.len()))
}

fn oracle_violations(s: &BestEffortStrategy, kappa: &[usize]) -> Vec<usize> {
    let a = s.arena();
    let tbl = Table::of(a.as_ref());
    let (adv_t, coop_t, err) = arena_sets(a);
    common::value_violations(&tbl, kappa, a.initial(), &adv_t, &coop_t, &err, |t, act| {
        a.is_legal(t, ActionId(act))
    })
}

fn c4_maximality(arch_s: &[BestEffortStrategy], rand_s: &[BestEffortStrategy]) -> Verdict {
    for (i, s) in arch_s.iter().chain(rand_s).enumerate() {
        let a = s.arena();
        let n = a.states().len();
        let report = s.verify_maximality();
        ensure!(report.is_ok(), "instance {i}: {:?}", report.violations);
        let tbl = Table::of(a.as_ref());
        let (adv_t, coop_t, _) = arena_sets(a);
        ensure!(bits(s.w_adv(), n) == common::adv_reach(&tbl, &adv_t), "instance {i}: W_adv differs from oracle");
        ensure!(bits(s.w_coop(), n) == common::coop_reach(&tbl, &coop_t), "instance {i}: W_coop differs from oracle");
        ensure!(oracle_violations(s, s.kappa()).is_empty(), "instance {i}: oracle finds a value drop");
    }

    let (mut mutants, mut equivalent, mut flagged, mut false_alarms) = (0, 0, 0, 0);
    for s in arch_s.iter().chain(rand_s) {
        let a = s.arena();
        let reach = s.reachable_under_kappa();
        for t in s.w_adv().ones().filter(|&t| reach[t] && !a.is_error(t)) {
            for act in (0..a.domain().num_actions()).filter(|&x| x != s.kappa()[t]) {
                let mut kappa = s.kappa().to_vec();
                kappa[t] = act;
                let caught = !s.with_kappa(kappa.clone()).verify_maximality().is_ok();
                if oracle_violations(s, &kappa).is_empty() {
                    equivalent += 1;
                    false_alarms += usize::from(caught);
                } else {
                    mutants += 1;
                    flagged += usize::from(caught);
                }
            }
        }
    }
    ensure!(mutants > 0, "no mutants generated");
    let rate = flagged as f64 / mutants as f64;
    ensure!(false_alarms == 0, "{false_alarms} equivalent mutants flagged");
    ensure!(rate >= 0.95, "only {flagged}/{mutants} mutants flagged");
    Ok(format!(
        "{} arch + {} random instances verified; {flagged}/{mutants} mutants flagged ({:.1}%), {equivalent} equivalent mutants, 0 false alarms",
        arch_s.len(),
        rand_s.len(),
        rate * 100.0
    ))
}

/// Replays the first listed reaction, through the interactive front end,
/// sometimes typing garbage first.
fn interactive_input(rng: &mut StdRng, steps: usize) -> Vec<u8> {
    let mut text = String::new();
    for _ in 0..steps {
        if rng.gen_bool(0.2) {
            text.push_str("99\nfoo\n");
        }
        text.push_str("1\n");
    }
    text.into_bytes()
}

fn check_play(s: &BestEffortStrategy, goal: &Formula, rec: &besynth::runtime::PlayRecord) -> Result<(), String> {
    let d = s.domain();
    for k in 1..=rec.trace.len() {
        let prefix = DomainTrace(rec.trace.states()[..k].to_vec());
        ensure!(d.is_legal_trace(&prefix), "illegal prefix of length {k}");
    }
    ensure!(
        d.trace_of(&rec.actions, &rec.reactions).as_ref() == Some(&rec.trace),
        "trace differs from Trace(actions, reactions)"
    );
    ensure!(
        s.arena().project(&rec.arena_states).as_ref() == Ok(&rec.trace),
        "arena run does not project to the trace"
    );
    ensure!(
        satisfied_in_domain(d, &rec.trace, goal) == rec.satisfied_at_step,
        "satisfiedAtStep {:?} disagrees with prefix evaluation",
        rec.satisfied_at_step
    );
    Ok(())
}

fn c5_legality(instances: &[(Arc<Domain>, Formula, BestEffortStrategy)]) -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x1E6A1);
    let mut counts = [0usize; 4];
    let plays = 1000;
    for i in 0..plays {
        let (d, goal, s) = &instances[i % instances.len()];
        let opts = PlayOptions {
            max_steps: rng.gen_range(1..=40),
            keep_going: rng.gen_bool(0.5),
        };
        let arch_like = d.reaction("none").is_some();
        let kind = rng.gen_range(0..if arch_like { 4 } else { 3 });
        counts[kind] += 1;
        let rec = match kind {
            0 => play(s, &mut RandomEnv::new(rng.gen()), opts),
            1 => play(s, &mut AdversarialEnv::new(s), opts),
            2 => {
                let input = interactive_input(&mut rng, opts.max_steps);
                play(s, &mut InteractiveEnv::new(&input[..], std::io::sink()), opts)
            }
            _ => play(s, &mut ScriptedEnv::new(vec!["none".into(); opts.max_steps]), opts),
        }
        .map_err(|e| format!("play {i}: {e}"))?;
        check_play(s, goal, &rec).map_err(|e| format!("play {i}: {e}"))?;
    }
    Ok(format!(
        "{plays} plays legal at every prefix (random {}, adversarial {}, interactive {}, scripted {})",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

/// Every reaction sequence from the initial state reaches the goal within
/// `depth` steps when the agent follows κ.
fn all_reaction_sequences_win(s: &BestEffortStrategy, depth: usize) -> bool {
    fn go(s: &BestEffortStrategy, t: usize, left: usize) -> bool {
        let a = s.arena();
        if a.goal()[t] {
            return true;
        }
        if left == 0 {
            return false;
        }
        let st = a.state(t).domain.assignment().expect("legal plays avoid errors");
        let act = s.action_at(t);
        s.domain()
            .beta(st, act)
            .iter()
            .all(|&r| go(s, a.step(t, act, r), left - 1))
    }
    go(s, s.arena().initial(), depth)
}

fn c6_classification() -> Verdict {
    let mut arch_count = 0;
    for o in 1..=3 {
        for l in o..=6 {
            let (d, goal) = arch(o, l);
            let s = synthesize(&d, &goal).map_err(|e| e.to_string())?;
            ensure!(
                s.classification() == Classification::Pending,
                "arch({o},{l}) classifies {}",
                s.classification()
            );
            let mut env = ScriptedEnv::new(vec!["none".into(); 200]);
            let rec = play(&s, &mut env, PlayOptions { max_steps: 200, keep_going: false })
                .map_err(|e| e.to_string())?;
            ensure!(rec.satisfied_at_step.is_some(), "arch({o},{l}): cooperative script misses the goal");
            check_play(&s, &goal, &rec)?;
            arch_count += 1;
        }
    }

    let shape = DomainShape {
        max_reactions: 1,
        ..DomainShape::default()
    };
    let mut single = 0;
    for (i, (d, g)) in random_instances(0x51, 120, shape).into_iter().enumerate() {
        let s = synthesize(&d, &g).map_err(|e| e.to_string())?;
        if !s.w_coop()[s.arena().initial()] {
            continue;
        }
        single += 1;
        ensure!(s.classification() == Classification::Winning, "single-reaction instance {i} classifies {}", s.classification());
        let n = s.arena().states().len();
        ensure!(all_reaction_sequences_win(&s, n), "single-reaction instance {i} loses a play");
    }
    ensure!(single >= 20, "only {single} single-reaction instances with reachable goals");

    let mut strong = 0;
    for (i, (d, g)) in random_instances(0x57, 150, DomainShape::default()).into_iter().enumerate() {
        let s = synthesize(&d, &g).map_err(|e| e.to_string())?;
        let t0 = s.arena().initial();
        if s.classification() != Classification::Winning || s.adversarial().rank[t0].unwrap_or(0) > 8 {
            continue;
        }
        strong += 1;
        let n = s.arena().states().len();
        ensure!(all_reaction_sequences_win(&s, n), "winning instance {i} loses some reaction sequence");
    }
    Ok(format!(
        "{arch_count} arch instances (O <= 3, L <= 6) pending and cooperatively solved; {single} single-reaction and {strong} multi-reaction winning instances win every reaction sequence"
    ))
}

fn median_total_ms(o: usize, l: usize, mode: Mode, reps: usize) -> Result<f64, String> {
    let cfg = BenchConfig {
        objects: o,
        locations: l,
        timeout: Duration::from_secs(60),
        mode,
    };
    let mut xs = Vec::with_capacity(reps);
    for _ in 0..reps {
        let row = run_instance(&cfg, usize::MAX).map_err(|e| e.to_string())?;
        ensure!(row.outcome == Outcome::Ok, "O={o} L={l} {mode}: outcome {}", row.outcome);
        xs.push(row.t_total_ms);
    }
    Ok(common::median(xs))
}

fn c7_scaling() -> Verdict {
    for l in 1..=10 {
        let clock = Instant::now();
        let (d, g) = arch(1, l);
        let s = synthesize(&d, &g).map_err(|e| e.to_string())?;
        let el = clock.elapsed();
        ensure!(el < Duration::from_secs(60), "L={l} took {el:?}");
        ensure!(s.classification() == Classification::Pending, "L={l} not pending");
    }
    let ls = [1, 2, 4, 8];
    let medians = ls
        .iter()
        .map(|&l| median_total_ms(1, l, Mode::BestEffort, 41))
        .collect::<Result<Vec<_>, _>>()?;
    let inversions: Vec<f64> = medians
        .windows(2)
        .filter(|w| w[1] < w[0])
        .map(|w| (w[0] - w[1]) / w[0])
        .collect();
    let shown = ls
        .iter()
        .zip(&medians)
        .map(|(l, m)| format!("L={l}: {m:.4} ms"))
        .collect::<Vec<_>>()
        .join(", ");
    ensure!(
        inversions.len() <= 1 && inversions.iter().all(|&d| d <= 0.10),
        "medians not increasing: {shown}"
    );
    Ok(format!("all L in 1..10 under 60 s; medians {shown}"))
}

fn c8_overhead() -> Verdict {
    let mut totals = [0.0f64; 3];
    for l in 1..=10 {
        for (k, mode) in Mode::ALL.into_iter().enumerate() {
            totals[k] += median_total_ms(1, l, mode, 21)?;
        }
    }
    let [be, adv, coop] = totals;
    let be_coop = be / coop;
    let be_adv = be / adv;
    ensure!(be_coop <= 1.5, "best-effort / cooperative = {be_coop:.3}");
    ensure!(be_adv >= 1.0, "best-effort / adversarial = {be_adv:.3}");
    Ok(format!(
        "bestEffort {be:.3} ms, adversarialOnly {adv:.3} ms, cooperativeOnly {coop:.3} ms; BE/coop {be_coop:.3}, BE/adv {be_adv:.3}"
    ))
}

/// Cooperates until some object is on the board, removes it once, then
/// cooperates forever.
struct CooperatePunishCooperate {
    punished_at: Option<usize>,
    log: Vec<String>,
}

impl Environment for CooperatePunishCooperate {
    fn react(&mut self, turn: &Turn<'_>) -> Result<Option<ReactionId>, RuntimeError> {
        let d = turn.domain();
        let undo = turn
            .applicable()
            .iter()
            .copied()
            .find(|&r| d.reaction_name(r).starts_with("undo_"));
        let r = match (self.punished_at, undo) {
            (None, Some(u)) if turn.step > 0 => {
                self.punished_at = Some(turn.step);
                u
            }
            _ => d.reaction("none").expect("arch has none"),
        };
        self.log.push(d.reaction_name(r).to_string());
        Ok(Some(r))
    }
}

fn c9_figure_two() -> Verdict {
    let (d, goal) = arch(2, 3);
    let s = synthesize(&d, &goal).map_err(|e| e.to_string())?;
    let opts = PlayOptions::for_strategy(&s);
    let mut env = CooperatePunishCooperate {
        punished_at: None,
        log: Vec::new(),
    };
    let rec = play(&s, &mut env, opts).map_err(|e| e.to_string())?;
    check_play(&s, &goal, &rec)?;
    let punished = env.punished_at.ok_or("environment never interfered")?;
    let done = rec.satisfied_at_step.ok_or("goal not reached after interference")?;
    ensure!(done > punished + 1, "goal reached before the interference");
    let undone = rec.reactions.iter().filter(|&&r| d.reaction_name(r) != "none").count();
    ensure!(undone == 1, "expected one interference, saw {undone}");

    let scripted = play(&s, &mut ScriptedEnv::new(env.log.clone()), opts).map_err(|e| e.to_string())?;
    ensure!(scripted == rec, "scripted replay differs");
    Ok(format!(
        "arch(2,3): undo at step {punished}, goal satisfied at step {done}; script [{}]",
        env.log.join(" ")
    ))
}

fn run(name: &str, f: impl FnOnce() -> Verdict) -> bool {
    let clock = Instant::now();
    let res = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let el = clock.elapsed();
    match res {
        Ok(detail) => {
            println!("PASS {name} ({el:.1?}): {detail}");
            true
        }
        Err(why) => {
            println!("FAIL {name} ({el:.1?}): {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let arch_inst: Vec<_> = ARCH_SMALL
        .iter()
        .map(|&(o, l)| {
            let (d, g) = arch(o, l);
            let s = synthesize(&d, &g).expect("arch synthesizes");
            (d, g, s)
        })
        .collect();
    let rand_inst = random_instances(0xBE5, 60, DomainShape::default());
    let rand_s = strategies(&rand_inst);
    let arch_s: Vec<_> = arch_inst.iter().map(|x| x.2.clone()).collect();

    let mut play_inst = arch_inst.clone();
    play_inst.extend(
        rand_inst
            .iter()
            .cloned()
            .zip(rand_s.iter().cloned())
            .map(|((d, g), s)| (d, g, s)),
    );
    let all_s: Vec<_> = play_inst.iter().map(|x| x.2.clone()).collect();

    let mut ok = true;
    ok &= run("criterion 1, DFA oracle equivalence", c1_dfa_oracle);
    ok &= run("criterion 2, game solver oracle equivalence", c2_game_oracle);
    ok &= run("criterion 3, SafeReach equals reduced Reach", || c3_safe_to_reach(&all_s));
    ok &= run("criterion 4, maximality and mutation testing", || c4_maximality(&arch_s, &rand_s));
    ok &= run("criterion 5, legality of plays", || c5_legality(&play_inst));
    ok &= run("criterion 6, classification properties", c6_classification);
    ok &= run("criterion 7, scaling trend", c7_scaling);
    ok &= run("criterion 8, overhead ratio", c8_overhead);
    ok &= run("criterion 9, cooperate/punish/cooperate scenario", c9_figure_two);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

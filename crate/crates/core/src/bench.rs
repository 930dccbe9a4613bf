//! The objects-at-locations benchmark family and a timing harness that
//! writes one CSV row per instance and mode.
//!
//! An agent picks objects from storage and places them on a line of
//! locations; after every agent move the environment may put one placed
//! object back into storage. The goal asks for object `o` at location `o`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use thiserror::Error;

use crate::best_effort::{synthesize_with, Classification, Mode, SynthesisOptions};
use crate::budget::{Budget, ResourceError};
use crate::domain::{ActionId, Domain, DomainBuilder, DomainError, ReactionId};
use crate::ltlf::{Assignment, FluentSet, Formula, MAX_FLUENTS};

/// Default generator caps for the explicit engine.
pub const MAX_OBJECTS: usize = 3;
pub const MAX_LOCATIONS: usize = 12;

pub const CSV_HEADER: &str = "O,L,mode,dfa_states,arena_states,t_dfa_ms,t_arena_ms,t_adv_ms,t_coop_ms,t_combine_ms,t_total_ms,classification,outcome";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("need 1 <= objects <= locations, got {objects} objects and {locations} locations")]
    InvalidSize { objects: usize, locations: usize },
    #[error("{objects} objects at {locations} locations exceeds the fluent limit of {MAX_FLUENTS}")]
    TooLarge { objects: usize, locations: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

struct ArchLayout {
    objects: usize,
    locations: usize,
}

impl ArchLayout {
    fn at(&self, o: usize, l: usize) -> usize {
        o * self.locations + l
    }

    fn held(&self, o: usize) -> usize {
        self.objects * self.locations + o
    }

    fn stored(&self, o: usize) -> usize {
        self.objects * self.locations + self.objects + o
    }

    fn pick(&self, o: usize) -> ActionId {
        ActionId(o)
    }

    fn place(&self, o: usize, l: usize) -> ActionId {
        ActionId(self.objects + o * self.locations + l)
    }

    fn nop(&self) -> ActionId {
        ActionId(self.objects + self.objects * self.locations)
    }

    fn undo(&self, o: usize, l: usize) -> ReactionId {
        ReactionId(1 + o * self.locations + l)
    }

    fn occupied(&self, s: Assignment, l: usize) -> bool {
        (0..self.objects).any(|o| s.contains(self.at(o, l)))
    }

    fn holding(&self, s: Assignment) -> bool {
        (0..self.objects).any(|o| s.contains(self.held(o)))
    }

    fn enabled(&self, s: Assignment) -> Vec<(ActionId, Assignment)> {
        let mut out = Vec::new();
        for o in 0..self.objects {
            if s.contains(self.stored(o)) && !self.holding(s) {
                out.push((self.pick(o), s.without(self.stored(o)).with(self.held(o))));
            }
        }
        for o in 0..self.objects {
            for l in 0..self.locations {
                if s.contains(self.held(o)) && !self.occupied(s, l) {
                    out.push((self.place(o, l), s.without(self.held(o)).with(self.at(o, l))));
                }
            }
        }
        out.push((self.nop(), s));
        out
    }

    /// `none` followed by one undo per object placed in `post`.
    fn reactions(&self, post: Assignment) -> Vec<(ReactionId, Assignment)> {
        let mut out = vec![(ReactionId(0), post)];
        for o in 0..self.objects {
            for l in 0..self.locations {
                if post.contains(self.at(o, l)) {
                    out.push((self.undo(o, l), post.without(self.at(o, l)).with(self.stored(o))));
                }
            }
        }
        out
    }
}

/// The arch instance with `objects` objects and `locations` locations, and
/// its goal `F(at_0_0 & at_1_1 & ...)`. Tables cover the reachable states.
pub fn gen_arch_benchmark(objects: usize, locations: usize) -> Result<(Domain, Formula), BenchError> {
    if objects == 0 || locations == 0 || objects > locations {
        return Err(BenchError::InvalidSize { objects, locations });
    }
    if objects * locations + 2 * objects > MAX_FLUENTS {
        return Err(BenchError::TooLarge { objects, locations });
    }
    let lay = ArchLayout { objects, locations };
    let mut names = Vec::new();
    for o in 0..objects {
        for l in 0..locations {
            names.push(format!("at_{o}_{l}"));
        }
    }
    names.extend((0..objects).map(|o| format!("held_{o}")));
    names.extend((0..objects).map(|o| format!("stored_{o}")));
    let fluents = FluentSet::new(names).map_err(DomainError::from)?;

    let mut actions: Vec<String> = (0..objects).map(|o| format!("pick_{o}")).collect();
    for o in 0..objects {
        for l in 0..locations {
            actions.push(format!("place_{o}_{l}"));
        }
    }
    actions.push("nop".into());
    let mut reactions = vec!["none".to_string()];
    for o in 0..objects {
        for l in 0..locations {
            reactions.push(format!("undo_{o}_{l}"));
        }
    }

    let s0 = (0..objects).fold(Assignment::EMPTY, |s, o| s.with(lay.stored(o)));
    let mut b = DomainBuilder::new(fluents.clone(), s0, actions, reactions)?;
    let mut seen = HashSet::from([s0]);
    let mut queue = VecDeque::from([s0]);
    while let Some(s) = queue.pop_front() {
        let enabled = lay.enabled(s);
        b.enable(s, enabled.iter().map(|e| e.0));
        for (a, post) in enabled {
            let rs = lay.reactions(post);
            b.allow(s, a, rs.iter().map(|e| e.0));
            for (r, next) in rs {
                b.transition(s, a, r, next)?;
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    let domain = b.build()?;
    let goal = Formula::eventually(Formula::conjunction(
        (0..objects).map(|o| Formula::atom(fluents.fluent(lay.at(o, o)))),
    ));
    Ok((domain, goal))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Ok,
    Timeout,
    Budget,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Ok => "ok",
            Outcome::Timeout => "timeout",
            Outcome::Budget => "budget",
        })
    }
}

/// One benchmark instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub objects: usize,
    pub locations: usize,
    pub timeout: Duration,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub objects: usize,
    pub locations: usize,
    pub mode: Mode,
    pub dfa_states: Option<usize>,
    pub arena_states: Option<usize>,
    pub t_dfa_ms: f64,
    pub t_arena_ms: f64,
    pub t_adv_ms: f64,
    pub t_coop_ms: f64,
    pub t_combine_ms: f64,
    pub t_total_ms: f64,
    pub classification: Option<Classification>,
    pub outcome: Outcome,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl BenchRow {
    fn failed(cfg: &BenchConfig, outcome: Outcome, elapsed: Duration) -> Self {
        BenchRow {
            objects: cfg.objects,
            locations: cfg.locations,
            mode: cfg.mode,
            dfa_states: None,
            arena_states: None,
            t_dfa_ms: 0.0,
            t_arena_ms: 0.0,
            t_adv_ms: 0.0,
            t_coop_ms: 0.0,
            t_combine_ms: 0.0,
            t_total_ms: ms(elapsed),
            classification: None,
            outcome,
        }
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{},{}",
            self.objects,
            self.locations,
            self.mode,
            opt(self.dfa_states),
            opt(self.arena_states),
            self.t_dfa_ms,
            self.t_arena_ms,
            self.t_adv_ms,
            self.t_coop_ms,
            self.t_combine_ms,
            self.t_total_ms,
            self.classification.map(|c| c.to_string()).unwrap_or_default(),
            self.outcome
        )
    }
}

/// Generates and solves one instance. Resource exhaustion is reported in
/// the row, everything else is an error.
pub fn run_instance(cfg: &BenchConfig, state_cap: usize) -> Result<BenchRow, BenchError> {
    let (domain, goal) = gen_arch_benchmark(cfg.objects, cfg.locations)?;
    let domain = Arc::new(domain);
    let opts = SynthesisOptions {
        mode: cfg.mode,
        budget: Budget::default()
            .with_state_cap(state_cap)
            .with_timeout(cfg.timeout),
        ..SynthesisOptions::default()
    };
    let clock = std::time::Instant::now();
    let s = match synthesize_with(&domain, &goal, &opts) {
        Ok(s) => s,
        Err(e) => {
            let outcome = match e.resource() {
                Some(ResourceError::Timeout) => Outcome::Timeout,
                Some(ResourceError::StateCap { .. }) => Outcome::Budget,
                None => panic!("generated instance failed to synthesize: {e}"),
            };
            return Ok(BenchRow::failed(cfg, outcome, clock.elapsed()));
        }
    };
    let t = s.timings();
    if t.total() > cfg.timeout {
        return Ok(BenchRow::failed(cfg, Outcome::Timeout, t.total()));
    }
    Ok(BenchRow {
        objects: cfg.objects,
        locations: cfg.locations,
        mode: cfg.mode,
        dfa_states: Some(s.arena().dfa().num_states()),
        arena_states: Some(s.arena().states().len()),
        t_dfa_ms: ms(t.dfa),
        t_arena_ms: ms(t.arena),
        t_adv_ms: ms(t.adversarial),
        t_coop_ms: ms(t.cooperative),
        t_combine_ms: ms(t.combine),
        t_total_ms: ms(t.total()),
        classification: Some(s.classification()),
        outcome: Outcome::Ok,
    })
}

/// A grid of instances to benchmark.
#[derive(Clone, Debug)]
pub struct BenchSuite {
    pub objects: RangeInclusive<usize>,
    pub locations: RangeInclusive<usize>,
    pub modes: Vec<Mode>,
    pub timeout: Duration,
    /// Each instance is run this many times and the median run is kept.
    pub repetitions: usize,
    /// Worker threads; 1 runs instances sequentially.
    pub parallel: usize,
    pub state_cap: usize,
}

impl Default for BenchSuite {
    fn default() -> Self {
        BenchSuite {
            objects: 1..=1,
            locations: 1..=10,
            modes: Mode::ALL.to_vec(),
            timeout: Duration::from_secs(60),
            repetitions: 1,
            parallel: 1,
            state_cap: Budget::from_env().state_cap,
        }
    }
}

impl BenchSuite {
    /// Instances in row order. Pairs with more objects than locations have
    /// no goal and are skipped.
    pub fn configs(&self) -> Vec<BenchConfig> {
        let mut out = Vec::new();
        for objects in self.objects.clone() {
            for locations in self.locations.clone() {
                if objects > locations {
                    continue;
                }
                for &mode in &self.modes {
                    out.push(BenchConfig {
                        objects,
                        locations,
                        timeout: self.timeout,
                        mode,
                    });
                }
            }
        }
        out
    }
}

fn median_run(cfg: &BenchConfig, reps: usize, state_cap: usize) -> Result<BenchRow, BenchError> {
    let mut rows = (0..reps.max(1))
        .map(|_| run_instance(cfg, state_cap))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.t_total_ms.total_cmp(&b.t_total_ms));
    Ok(rows.swap_remove(rows.len() / 2))
}

/// Runs every instance of the suite.
pub fn run_suite(suite: &BenchSuite) -> Result<Vec<BenchRow>, BenchError> {
    let configs = suite.configs();
    if suite.parallel <= 1 {
        return configs
            .iter()
            .map(|c| median_run(c, suite.repetitions, suite.state_cap))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<BenchRow, BenchError>>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..suite.parallel.min(configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = configs.get(i) else { break };
                let row = median_run(cfg, suite.repetitions, suite.state_cap);
                results.lock().expect("no poisoned lock")[i] = Some(row);
            });
        }
    });
    results
        .into_inner()
        .expect("no poisoned lock")
        .into_iter()
        .map(|r| r.expect("every instance ran"))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    out.flush()
}

/// Per-mode totals over the rows that finished.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchSummary {
    pub rows: usize,
    pub ok: usize,
    pub timeouts: usize,
    pub budget: usize,
    pub best_effort_ms: f64,
    pub adversarial_ms: f64,
    pub cooperative_ms: f64,
}

impl BenchSummary {
    pub fn of(rows: &[BenchRow]) -> Self {
        let mut s = BenchSummary {
            rows: rows.len(),
            ..Default::default()
        };
        for r in rows {
            match r.outcome {
                Outcome::Ok => s.ok += 1,
                Outcome::Timeout => s.timeouts += 1,
                Outcome::Budget => s.budget += 1,
            }
            if r.outcome != Outcome::Ok {
                continue;
            }
            match r.mode {
                Mode::BestEffort => s.best_effort_ms += r.t_total_ms,
                Mode::AdversarialOnly => s.adversarial_ms += r.t_total_ms,
                Mode::CooperativeOnly => s.cooperative_ms += r.t_total_ms,
            }
        }
        s
    }

    /// Best-effort time over cooperative-only time.
    pub fn best_effort_over_cooperative(&self) -> Option<f64> {
        (self.cooperative_ms > 0.0).then(|| self.best_effort_ms / self.cooperative_ms)
    }

    /// Adversarial-only time over best-effort time.
    pub fn adversarial_over_best_effort(&self) -> Option<f64> {
        (self.best_effort_ms > 0.0).then(|| self.adversarial_ms / self.best_effort_ms)
    }
}

impl fmt::Display for BenchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} rows: {} ok, {} timeout, {} budget",
            self.rows, self.ok, self.timeouts, self.budget
        )?;
        writeln!(f, "total bestEffort:      {:.3} ms", self.best_effort_ms)?;
        writeln!(f, "total adversarialOnly: {:.3} ms", self.adversarial_ms)?;
        writeln!(f, "total cooperativeOnly: {:.3} ms", self.cooperative_ms)?;
        let pct = |r: Option<f64>| match r {
            Some(r) => format!("{:.3} ({:+.1}%)", r, (r - 1.0) * 100.0),
            None => "n/a".into(),
        };
        writeln!(
            f,
            "bestEffort / cooperativeOnly: {}",
            pct(self.best_effort_over_cooperative())
        )?;
        write!(
            f,
            "adversarialOnly / bestEffort: {}",
            pct(self.adversarial_over_best_effort())
        )
    }
}

/// Runs the suite, writes the CSV and returns the summary.
pub fn run_bench<W: Write>(suite: &BenchSuite, out: W) -> Result<(Vec<BenchRow>, BenchSummary), BenchError> {
    let rows = run_suite(suite)?;
    write_csv(&rows, out)?;
    let summary = BenchSummary::of(&rows);
    Ok((rows, summary))
}

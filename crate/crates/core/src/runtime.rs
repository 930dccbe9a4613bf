//! Executing a synthesized strategy against an environment.
//!
//! The agent side always follows κ through the arena; the environment side
//! is any [`Environment`]. Every reaction is checked against β before it is
//! applied, so a finished [`PlayRecord`] is always a legal trace.

use std::io::{self, BufRead, Write};

use fixedbitset::FixedBitSet;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::best_effort::BestEffortStrategy;
use crate::domain::{ActionId, Domain, DomainTrace, ReactionId};
use crate::game::forced_under;
use crate::ltlf::{evaluate, Assignment, Formula};

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("step {step}: reaction '{reaction}' is not applicable")]
    IllegalReaction { step: usize, reaction: String },
    #[error("step {step}: the strategy prescribes disabled action '{action}'")]
    IllegalAction { step: usize, action: String },
    #[error("reaction script exhausted at step {0}")]
    ScriptExhausted(usize),
    #[error("max steps must be at least 1")]
    ZeroSteps,
    #[error("malformed reaction script: {0}")]
    Script(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StopReason {
    GoalReached,
    MaxSteps,
    InteractiveQuit,
}

/// What the environment sees before it reacts.
#[derive(Clone, Copy, Debug)]
pub struct Turn<'a> {
    pub strategy: &'a BestEffortStrategy,
    pub step: usize,
    pub arena_state: usize,
    pub state: Assignment,
    pub action: ActionId,
}

impl Turn<'_> {
    pub fn domain(&self) -> &Domain {
        self.strategy.domain()
    }

    /// β(s, a) for this turn.
    pub fn applicable(&self) -> &[ReactionId] {
        self.domain().beta(self.state, self.action)
    }
}

/// An environment strategy. Returning `None` ends the play early.
pub trait Environment {
    fn react(&mut self, turn: &Turn<'_>) -> Result<Option<ReactionId>, RuntimeError>;
}

/// Replays a fixed list of reaction names.
#[derive(Clone, Debug)]
pub struct ScriptedEnv {
    script: Vec<String>,
    next: usize,
}

impl ScriptedEnv {
    pub fn new(script: Vec<String>) -> Self {
        ScriptedEnv { script, next: 0 }
    }
}

impl Environment for ScriptedEnv {
    fn react(&mut self, turn: &Turn<'_>) -> Result<Option<ReactionId>, RuntimeError> {
        let name = self
            .script
            .get(self.next)
            .ok_or(RuntimeError::ScriptExhausted(turn.step))?;
        self.next += 1;
        turn.domain()
            .reaction(name)
            .filter(|r| turn.applicable().contains(r))
            .map(Some)
            .ok_or_else(|| RuntimeError::IllegalReaction {
                step: turn.step,
                reaction: name.clone(),
            })
    }
}

/// Uniform choice among the applicable reactions.
#[derive(Clone, Debug)]
pub struct RandomEnv {
    rng: StdRng,
}

impl RandomEnv {
    pub fn new(seed: u64) -> Self {
        RandomEnv {
            rng: StdRng::seed_from_u64(seed),
        }
    }
}

impl Environment for RandomEnv {
    fn react(&mut self, turn: &Turn<'_>) -> Result<Option<ReactionId>, RuntimeError> {
        Ok(turn.applicable().choose(&mut self.rng).copied())
    }
}

/// Keeps the play outside the states from which κ forces the adversarial
/// target whenever some applicable reaction allows it. Ties go to the first
/// reaction in declared order.
#[derive(Clone, Debug)]
pub struct AdversarialEnv {
    forced: FixedBitSet,
}

impl AdversarialEnv {
    pub fn new(strategy: &BestEffortStrategy) -> Self {
        let a = strategy.arena();
        AdversarialEnv {
            forced: forced_under(a.as_ref(), strategy.kappa(), &a.adversarial_target()),
        }
    }
}

impl Environment for AdversarialEnv {
    fn react(&mut self, turn: &Turn<'_>) -> Result<Option<ReactionId>, RuntimeError> {
        let arena = turn.strategy.arena();
        let rs = turn.applicable();
        let escape = rs
            .iter()
            .copied()
            .find(|&r| !self.forced[arena.step(turn.arena_state, turn.action, r)]);
        Ok(escape.or_else(|| rs.first().copied()))
    }
}

/// A human picks reactions from a numbered menu.
pub struct InteractiveEnv<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> InteractiveEnv<R, W> {
    pub fn new(input: R, output: W) -> Self {
        InteractiveEnv { input, output }
    }
}

impl<R: BufRead, W: Write> Environment for InteractiveEnv<R, W> {
    fn react(&mut self, turn: &Turn<'_>) -> Result<Option<ReactionId>, RuntimeError> {
        let d = turn.domain();
        let rs = turn.applicable();
        writeln!(
            self.output,
            "step {}: state {}, agent does '{}'",
            turn.step,
            d.format_state(turn.state),
            d.action_name(turn.action)
        )?;
        for (i, &r) in rs.iter().enumerate() {
            writeln!(self.output, "  {}) {}", i + 1, d.reaction_name(r))?;
        }
        loop {
            write!(self.output, "reaction [1-{}, q to quit]: ", rs.len())?;
            self.output.flush()?;
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            let line = line.trim();
            if line == "q" {
                return Ok(None);
            }
            match line.parse::<usize>() {
                Ok(k) if (1..=rs.len()).contains(&k) => return Ok(Some(rs[k - 1])),
                _ => writeln!(self.output, "invalid choice '{line}'")?,
            }
        }
    }
}

/// Environment policy kinds that need no external input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvPolicy {
    Scripted(Vec<String>),
    Random(u64),
    Adversarial,
}

impl EnvPolicy {
    pub fn environment(&self, strategy: &BestEffortStrategy) -> Box<dyn Environment> {
        match self {
            EnvPolicy::Scripted(s) => Box::new(ScriptedEnv::new(s.clone())),
            EnvPolicy::Random(seed) => Box::new(RandomEnv::new(*seed)),
            EnvPolicy::Adversarial => Box::new(AdversarialEnv::new(strategy)),
        }
    }
}

/// Reads a reaction script: either a JSON array of names or whitespace
/// separated names, with `#` starting a comment.
pub fn parse_script(text: &str) -> Result<Vec<String>, RuntimeError> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| RuntimeError::Script(e.to_string()));
    }
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(String::from)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlayOptions {
    pub max_steps: usize,
    /// Keep playing after the goal is first satisfied.
    pub keep_going: bool,
}

impl PlayOptions {
    /// Ten times the number of arena states, stopping at the goal.
    pub fn for_strategy(strategy: &BestEffortStrategy) -> Self {
        PlayOptions {
            max_steps: default_max_steps(strategy),
            keep_going: false,
        }
    }
}

pub fn default_max_steps(strategy: &BestEffortStrategy) -> usize {
    10 * strategy.arena().states().len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayRecord {
    pub trace: DomainTrace,
    pub actions: Vec<ActionId>,
    pub reactions: Vec<ReactionId>,
    pub arena_states: Vec<usize>,
    /// Smallest k such that the first k + 1 states satisfy the goal.
    pub satisfied_at_step: Option<usize>,
    pub stop_reason: StopReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayRecordJson {
    pub states: Vec<Vec<String>>,
    pub actions: Vec<String>,
    pub reactions: Vec<String>,
    pub satisfied_at_step: Option<usize>,
    pub stop_reason: StopReason,
}

impl PlayRecord {
    pub fn to_json(&self, d: &Domain) -> PlayRecordJson {
        PlayRecordJson {
            states: self.trace.states().iter().map(|&s| d.fluents().true_names(s)).collect(),
            actions: self.actions.iter().map(|&a| d.action_name(a).to_string()).collect(),
            reactions: self.reactions.iter().map(|&r| d.reaction_name(r).to_string()).collect(),
            satisfied_at_step: self.satisfied_at_step,
            stop_reason: self.stop_reason,
        }
    }
}

/// Plays κ against `env` from the initial state.
pub fn play(
    strategy: &BestEffortStrategy,
    env: &mut dyn Environment,
    opts: PlayOptions,
) -> Result<PlayRecord, RuntimeError> {
    if opts.max_steps == 0 {
        return Err(RuntimeError::ZeroSteps);
    }
    let arena = strategy.arena();
    let d = strategy.domain();
    let mut t = arena.initial();
    let mut s = d.initial();
    let mut rec = PlayRecord {
        trace: DomainTrace(vec![s]),
        actions: Vec::new(),
        reactions: Vec::new(),
        arena_states: vec![t],
        satisfied_at_step: arena.goal()[t].then_some(0),
        stop_reason: StopReason::MaxSteps,
    };
    if rec.satisfied_at_step.is_some() && !opts.keep_going {
        rec.stop_reason = StopReason::GoalReached;
        return Ok(rec);
    }
    for step in 0..opts.max_steps {
        let a = strategy.action_at(t);
        if !d.is_enabled(s, a) {
            return Err(RuntimeError::IllegalAction {
                step,
                action: d.action_name(a).to_string(),
            });
        }
        let turn = Turn {
            strategy,
            step,
            arena_state: t,
            state: s,
            action: a,
        };
        let Some(r) = env.react(&turn)? else {
            rec.stop_reason = StopReason::InteractiveQuit;
            return Ok(rec);
        };
        let next = d.delta(s, a, r).filter(|_| d.is_applicable(s, a, r));
        let Some(next) = next else {
            return Err(RuntimeError::IllegalReaction {
                step,
                reaction: d.reaction_name(r).to_string(),
            });
        };
        s = next;
        t = arena.step(t, a, r);
        rec.actions.push(a);
        rec.reactions.push(r);
        rec.trace.0.push(s);
        rec.arena_states.push(t);
        if rec.satisfied_at_step.is_none() && arena.goal()[t] {
            rec.satisfied_at_step = Some(step + 1);
            if !opts.keep_going {
                rec.stop_reason = StopReason::GoalReached;
                return Ok(rec);
            }
        }
    }
    Ok(rec)
}

/// A play where the environment is a human on `input`/`output`.
pub fn interactive_session<R: BufRead, W: Write>(
    strategy: &BestEffortStrategy,
    input: R,
    output: W,
    opts: PlayOptions,
) -> Result<PlayRecord, RuntimeError> {
    play(strategy, &mut InteractiveEnv::new(input, output), opts)
}

/// Smallest k such that the first k + 1 states of `trace` satisfy `goal`.
pub fn satisfied_in_domain(d: &Domain, trace: &DomainTrace, goal: &Formula) -> Option<usize> {
    let ft = trace.to_finite_trace(d)?;
    (0..ft.len()).find(|&k| evaluate(goal, &ft.prefix(k), 0).unwrap_or(false))
}

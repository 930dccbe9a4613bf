//! Compilation of LTLf goals into minimal, total DFAs over fluent
//! assignments.

mod guard;
mod minimize;
mod progression;

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{Budget, ResourceError};
use crate::ltlf::{Assignment, FiniteTrace, FluentSet, Formula};

pub use guard::{Cube, Guard};

/// Largest number of distinct fluents a goal may mention. The transition
/// function is tabulated over minterms of those fluents.
pub const MAX_SUPPORT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfaError {
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("goal mentions {atoms} distinct fluents, at most {max} are supported")]
    SupportTooLarge { atoms: usize, max: usize },
    #[error("formula mentions a fluent outside the declared set")]
    ForeignAtom,
    #[error("trace and automaton are over different fluent sets")]
    FluentMismatch,
    #[error("state {0} does not exist")]
    NoSuchState(usize),
    #[error("broken automaton: {matches} guards of state {state} match the assignment")]
    GuardViolation { state: usize, matches: usize },
}

/// A total deterministic automaton over assignments of a fluent set.
///
/// The transition function only depends on the `support` fluents; it is
/// held both as a dense table indexed by support minterms and as per-state
/// guard lists that partition the assignment space.
#[derive(Clone, Debug)]
pub struct Dfa {
    fluents: FluentSet,
    support: Vec<usize>,
    initial: usize,
    finals: Vec<bool>,
    table: Vec<u32>,
    guards: Vec<Vec<(Guard, usize)>>,
}

impl Dfa {
    fn from_table(
        fluents: FluentSet,
        support: Vec<usize>,
        initial: usize,
        finals: Vec<bool>,
        table: Vec<u32>,
    ) -> Dfa {
        let width = 1usize << support.len();
        let guards = (0..finals.len())
            .map(|q| guard::guards_for_row(&table[q * width..(q + 1) * width], &support))
            .collect();
        Dfa {
            fluents,
            support,
            initial,
            finals,
            table,
            guards,
        }
    }

    pub fn fluents(&self) -> &FluentSet {
        &self.fluents
    }

    /// Fluents the transition function depends on.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(q, _)| q)
    }

    pub fn guards(&self, q: usize) -> &[(Guard, usize)] {
        &self.guards[q]
    }

    fn width(&self) -> usize {
        1 << self.support.len()
    }

    fn minterm(&self, a: Assignment) -> usize {
        self.support
            .iter()
            .enumerate()
            .fold(0, |m, (i, &v)| m | (usize::from(a.contains(v)) << i))
    }

    /// Table lookup of the successor; `q` must be a valid state.
    #[inline]
    pub fn successor(&self, q: usize, a: Assignment) -> usize {
        self.table[q * self.width() + self.minterm(a)] as usize
    }

    /// Successor via the guard list, checking that exactly one guard matches.
    pub fn step(&self, q: usize, a: Assignment) -> Result<usize, DfaError> {
        let guards = self.guards.get(q).ok_or(DfaError::NoSuchState(q))?;
        let mut hits = guards.iter().filter(|(g, _)| g.matches(a));
        match (hits.next(), hits.next()) {
            (Some((_, to)), None) => Ok(*to),
            (None, _) => Err(DfaError::GuardViolation { state: q, matches: 0 }),
            (Some(_), Some(_)) => Err(DfaError::GuardViolation {
                state: q,
                matches: 2 + hits.count(),
            }),
        }
    }

    /// The unique run on `trace`, starting at the initial state.
    pub fn run(&self, trace: &FiniteTrace) -> Result<Vec<usize>, DfaError> {
        if trace.fluents() != &self.fluents {
            return Err(DfaError::FluentMismatch);
        }
        let mut states = vec![self.initial];
        let mut q = self.initial;
        for &a in trace.instants() {
            q = self.step(q, a)?;
            states.push(q);
        }
        Ok(states)
    }

    pub fn accepts(&self, trace: &FiniteTrace) -> Result<bool, DfaError> {
        let run = self.run(trace)?;
        Ok(self.finals[*run.last().unwrap()])
    }

    pub fn to_json(&self) -> DfaJson {
        let mut transitions = Vec::new();
        for q in 0..self.num_states() {
            for (g, to) in &self.guards[q] {
                transitions.push(TransitionJson {
                    from: q,
                    guard: g.to_text(&self.fluents),
                    to: *to,
                });
            }
        }
        DfaJson {
            fluents: self.fluents.names().map(String::from).collect(),
            states: self.num_states(),
            initial: self.initial,
            finals: self.finals().collect(),
            transitions,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  __start [shape=point];\n");
        for q in 0..self.num_states() {
            let shape = if self.finals[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        let _ = writeln!(out, "  __start -> q{};", self.initial);
        for q in 0..self.num_states() {
            for (g, to) in &self.guards[q] {
                let label = g.to_text(&self.fluents).replace('"', "\\\"");
                let _ = writeln!(out, "  q{q} -> q{to} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }

    /// States reachable from the initial state (all of them for compiled
    /// automata), with the length of a shortest witness.
    pub fn reachable_depths(&self) -> Vec<Option<usize>> {
        let mut depth = vec![None; self.num_states()];
        depth[self.initial] = Some(0);
        let mut queue = VecDeque::from([self.initial]);
        let w = self.width();
        while let Some(q) = queue.pop_front() {
            for m in 0..w {
                let s = self.table[q * w + m] as usize;
                if depth[s].is_none() {
                    depth[s] = Some(depth[q].unwrap() + 1);
                    queue.push_back(s);
                }
            }
        }
        depth
    }

    fn has_incoming(&self, target: usize) -> bool {
        self.table.iter().any(|&s| s as usize == target)
    }
}

/// JSON export of a [`Dfa`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub fluents: Vec<String>,
    pub states: usize,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: usize,
    pub guard: String,
    pub to: usize,
}

/// Compiles `f` into a minimal DFA accepting exactly the nonempty traces
/// over `fluents` that satisfy `f`.
pub fn compile(f: &Formula, fluents: &FluentSet) -> Result<Dfa, DfaError> {
    compile_with(f, fluents, &Budget::default())
}

pub fn compile_with(f: &Formula, fluents: &FluentSet, budget: &Budget) -> Result<Dfa, DfaError> {
    if f.atoms().into_iter().any(|i| i >= fluents.len()) {
        return Err(DfaError::ForeignAtom);
    }
    let raw = progression::construct(f, budget)?;
    let dfa = Dfa::from_table(fluents.clone(), raw.support, 0, raw.finals, raw.table);
    let mut best = minimize(&dfa);
    // Acceptance of the empty word is irrelevant; when the initial state is
    // never re-entered its finality is free, so keep whichever choice
    // minimizes further.
    if !dfa.has_incoming(dfa.initial) {
        let mut flipped = dfa.clone();
        flipped.finals[flipped.initial] = !flipped.finals[flipped.initial];
        let alt = minimize(&flipped);
        if alt.num_states() < best.num_states() {
            best = alt;
        }
    }
    Ok(best)
}

pub use minimize::minimize;

#[cfg(test)]
mod tests;

//! Nondeterministic planning domains `(2^F, s0, Act, React, α, β, δ)`.
//!
//! States are fluent bitsets. The preconditions and the partial transition
//! function are explicit tables keyed by state; anything not listed is
//! empty or undefined.

mod completion;
mod file;
mod trace;
mod validate;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::ltlf::{Assignment, FluentSet, LtlfError};

pub use completion::{CompletedDomain, DomainState};
pub use file::DomainFile;
pub use trace::DomainTrace;
pub use validate::{Scope, ValidationReport, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReactionId(pub usize);

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Display for ReactionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("malformed domain file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fluents(#[from] LtlfError),
    #[error("unknown fluent '{0}'")]
    UnknownFluent(String),
    #[error("unknown action '{0}'")]
    UnknownAction(String),
    #[error("unknown reaction '{0}'")]
    UnknownReaction(String),
    #[error("duplicate {kind} name '{name}'")]
    DuplicateName { kind: &'static str, name: String },
    #[error("transition without precondition: action '{action}' is not in alpha of state {state}")]
    TransitionWithoutPrecondition { state: String, action: String },
    #[error("transition without reaction precondition: reaction '{reaction}' is not in beta of state {state} and action '{action}'")]
    TransitionWithoutReaction {
        state: String,
        action: String,
        reaction: String,
    },
    #[error("reaction precondition for action '{action}' outside alpha of state {state}")]
    ReactionWithoutAction { state: String, action: String },
    #[error("conflicting transitions for state {state}, action '{action}', reaction '{reaction}'")]
    ConflictingTransition {
        state: String,
        action: String,
        reaction: String,
    },
    #[error("missing transition for state {state}, action '{action}', reaction '{reaction}' although both preconditions hold")]
    MissingTransition {
        state: String,
        action: String,
        reaction: String,
    },
}

/// A validated-by-construction planning domain. Use [`DomainBuilder`] or
/// [`Domain::from_json`] to create one.
#[derive(Clone, Debug)]
pub struct Domain {
    fluents: FluentSet,
    initial: Assignment,
    actions: Vec<String>,
    reactions: Vec<String>,
    alpha: HashMap<Assignment, Vec<ActionId>>,
    beta: HashMap<(Assignment, ActionId), Vec<ReactionId>>,
    delta: HashMap<(Assignment, ActionId, ReactionId), Assignment>,
}

impl Domain {
    pub fn fluents(&self) -> &FluentSet {
        &self.fluents
    }

    pub fn initial(&self) -> Assignment {
        self.initial
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn reactions(&self) -> &[String] {
        &self.reactions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.0]
    }

    pub fn reaction_name(&self, r: ReactionId) -> &str {
        &self.reactions[r.0]
    }

    pub fn action(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|n| n == name).map(ActionId)
    }

    pub fn reaction(&self, name: &str) -> Option<ReactionId> {
        self.reactions.iter().position(|n| n == name).map(ReactionId)
    }

    /// α(s), in declared action order.
    pub fn alpha(&self, s: Assignment) -> &[ActionId] {
        self.alpha.get(&s).map_or(&[], Vec::as_slice)
    }

    /// β(s, a), in declared reaction order.
    pub fn beta(&self, s: Assignment, a: ActionId) -> &[ReactionId] {
        self.beta.get(&(s, a)).map_or(&[], Vec::as_slice)
    }

    pub fn is_enabled(&self, s: Assignment, a: ActionId) -> bool {
        self.alpha(s).contains(&a)
    }

    pub fn is_applicable(&self, s: Assignment, a: ActionId, r: ReactionId) -> bool {
        self.beta(s, a).contains(&r)
    }

    /// δ(s, a, r); `None` where the domain leaves it undefined.
    pub fn delta(&self, s: Assignment, a: ActionId, r: ReactionId) -> Option<Assignment> {
        self.delta.get(&(s, a, r)).copied()
    }

    pub fn format_state(&self, s: Assignment) -> String {
        self.fluents.format_assignment(s)
    }

    /// States reachable from s0 through defined transitions, breadth first.
    pub fn reachable_states(&self) -> Vec<Assignment> {
        let mut seen = HashSet::from([self.initial]);
        let mut order = vec![self.initial];
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for &a in self.alpha(s) {
                for &r in self.beta(s, a) {
                    if let Some(t) = self.delta(s, a, r) {
                        if seen.insert(t) {
                            order.push(t);
                            queue.push_back(t);
                        }
                    }
                }
            }
        }
        order
    }

    /// Adds a fresh `nop` action with a single `nopr` reaction looping on
    /// every reachable state whose α is empty.
    pub fn with_nop(&self) -> Domain {
        let mut d = self.clone();
        let fresh = |names: &[String], base: &str| {
            let mut name = base.to_string();
            while names.contains(&name) {
                name.push('_');
            }
            name
        };
        let nop_name = fresh(&d.actions, "nop");
        let nopr_name = fresh(&d.reactions, "nopr");
        let nop = ActionId(d.actions.len());
        let nopr = ReactionId(d.reactions.len());
        d.actions.push(nop_name);
        d.reactions.push(nopr_name);
        for s in self.reachable_states() {
            if self.alpha(s).is_empty() {
                d.alpha.insert(s, vec![nop]);
                d.beta.insert((s, nop), vec![nopr]);
                d.delta.insert((s, nop, nopr), s);
            }
        }
        d
    }

    /// States mentioned anywhere in the tables, plus s0, sorted.
    pub fn mentioned_states(&self) -> Vec<Assignment> {
        let mut all: HashSet<Assignment> = HashSet::from([self.initial]);
        all.extend(self.alpha.keys().copied());
        all.extend(self.beta.keys().map(|k| k.0));
        for (k, v) in &self.delta {
            all.insert(k.0);
            all.insert(*v);
        }
        let mut v: Vec<_> = all.into_iter().collect();
        v.sort();
        v
    }

    pub(crate) fn alpha_table(&self) -> BTreeMap<Assignment, &Vec<ActionId>> {
        self.alpha.iter().map(|(k, v)| (*k, v)).collect()
    }

    pub(crate) fn beta_table(&self) -> BTreeMap<(Assignment, ActionId), &Vec<ReactionId>> {
        self.beta.iter().map(|(k, v)| (*k, v)).collect()
    }

    pub(crate) fn delta_table(&self) -> BTreeMap<(Assignment, ActionId, ReactionId), Assignment> {
        self.delta.iter().map(|(k, v)| (*k, *v)).collect()
    }
}

/// Incremental construction of a [`Domain`] with the loader's checks.
#[derive(Debug)]
pub struct DomainBuilder {
    fluents: FluentSet,
    initial: Assignment,
    actions: Vec<String>,
    reactions: Vec<String>,
    alpha: HashMap<Assignment, Vec<ActionId>>,
    beta: HashMap<(Assignment, ActionId), Vec<ReactionId>>,
    delta: HashMap<(Assignment, ActionId, ReactionId), Assignment>,
}

fn check_names(kind: &'static str, names: &[String]) -> Result<(), DomainError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(DomainError::DuplicateName {
                kind,
                name: n.clone(),
            });
        }
    }
    Ok(())
}

impl DomainBuilder {
    pub fn new(
        fluents: FluentSet,
        initial: Assignment,
        actions: Vec<String>,
        reactions: Vec<String>,
    ) -> Result<Self, DomainError> {
        check_names("action", &actions)?;
        check_names("reaction", &reactions)?;
        Ok(DomainBuilder {
            fluents,
            initial,
            actions,
            reactions,
            alpha: HashMap::new(),
            beta: HashMap::new(),
            delta: HashMap::new(),
        })
    }

    pub fn fluents(&self) -> &FluentSet {
        &self.fluents
    }

    pub fn action(&self, name: &str) -> Result<ActionId, DomainError> {
        self.actions
            .iter()
            .position(|n| n == name)
            .map(ActionId)
            .ok_or_else(|| DomainError::UnknownAction(name.to_string()))
    }

    pub fn reaction(&self, name: &str) -> Result<ReactionId, DomainError> {
        self.reactions
            .iter()
            .position(|n| n == name)
            .map(ReactionId)
            .ok_or_else(|| DomainError::UnknownReaction(name.to_string()))
    }

    /// Adds actions to α(s).
    pub fn enable(&mut self, s: Assignment, actions: impl IntoIterator<Item = ActionId>) {
        let e = self.alpha.entry(s).or_default();
        e.extend(actions);
        e.sort();
        e.dedup();
    }

    /// Adds reactions to β(s, a).
    pub fn allow(&mut self, s: Assignment, a: ActionId, rs: impl IntoIterator<Item = ReactionId>) {
        let e = self.beta.entry((s, a)).or_default();
        e.extend(rs);
        e.sort();
        e.dedup();
    }

    /// Sets δ(s, a, r) = next. Re-adding an identical entry is a no-op.
    pub fn transition(
        &mut self,
        s: Assignment,
        a: ActionId,
        r: ReactionId,
        next: Assignment,
    ) -> Result<(), DomainError> {
        match self.delta.insert((s, a, r), next) {
            Some(prev) if prev != next => Err(DomainError::ConflictingTransition {
                state: self.fluents.format_assignment(s),
                action: self.actions[a.0].clone(),
                reaction: self.reactions[r.0].clone(),
            }),
            _ => Ok(()),
        }
    }

    pub fn build(self) -> Result<Domain, DomainError> {
        let fmt = |s: Assignment| self.fluents.format_assignment(s);
        let mut keys: Vec<_> = self.delta.keys().copied().collect();
        keys.sort();
        for (s, a, r) in keys {
            if !self.alpha.get(&s).is_some_and(|v| v.contains(&a)) {
                return Err(DomainError::TransitionWithoutPrecondition {
                    state: fmt(s),
                    action: self.actions[a.0].clone(),
                });
            }
            if !self.beta.get(&(s, a)).is_some_and(|v| v.contains(&r)) {
                return Err(DomainError::TransitionWithoutReaction {
                    state: fmt(s),
                    action: self.actions[a.0].clone(),
                    reaction: self.reactions[r.0].clone(),
                });
            }
        }
        let mut beta_keys: Vec<_> = self.beta.keys().copied().collect();
        beta_keys.sort();
        for (s, a) in beta_keys {
            if !self.alpha.get(&s).is_some_and(|v| v.contains(&a)) {
                return Err(DomainError::ReactionWithoutAction {
                    state: fmt(s),
                    action: self.actions[a.0].clone(),
                });
            }
            for &r in &self.beta[&(s, a)] {
                if !self.delta.contains_key(&(s, a, r)) {
                    return Err(DomainError::MissingTransition {
                        state: fmt(s),
                        action: self.actions[a.0].clone(),
                        reaction: self.reactions[r.0].clone(),
                    });
                }
            }
        }
        Ok(Domain {
            fluents: self.fluents,
            initial: self.initial,
            actions: self.actions,
            reactions: self.reactions,
            alpha: self.alpha,
            beta: self.beta,
            delta: self.delta,
        })
    }
}

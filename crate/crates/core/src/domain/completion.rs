use std::sync::Arc;

use super::{ActionId, Domain, ReactionId};
use crate::ltlf::Assignment;

/// A state of the completed domain D+: a proper domain state or one of the
/// two absorbing error states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainState {
    State(Assignment),
    AgentError,
    EnvError,
}

impl DomainState {
    pub fn is_error(self) -> bool {
        !matches!(self, DomainState::State(_))
    }

    pub fn assignment(self) -> Option<Assignment> {
        match self {
            DomainState::State(s) => Some(s),
            _ => None,
        }
    }
}

/// D+: the domain with a total transition function. Agent precondition
/// violations lead to the agent error state, environment violations to
/// the environment error state, and both error states loop forever.
#[derive(Clone, Debug)]
pub struct CompletedDomain {
    domain: Arc<Domain>,
}

impl CompletedDomain {
    pub fn new(domain: Arc<Domain>) -> Self {
        CompletedDomain { domain }
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn initial(&self) -> DomainState {
        DomainState::State(self.domain.initial())
    }

    /// δ′(s, a, r).
    pub fn step(&self, s: DomainState, a: ActionId, r: ReactionId) -> DomainState {
        match s {
            DomainState::State(s) => {
                if !self.domain.is_enabled(s, a) {
                    DomainState::AgentError
                } else if !self.domain.is_applicable(s, a, r) {
                    DomainState::EnvError
                } else {
                    DomainState::State(
                        self.domain
                            .delta(s, a, r)
                            .expect("loader guarantees delta on enabled pairs"),
                    )
                }
            }
            err => err,
        }
    }

    /// α extended to error states, where every action is allowed.
    pub fn alpha(&self, s: DomainState) -> Vec<ActionId> {
        match s {
            DomainState::State(s) => self.domain.alpha(s).to_vec(),
            _ => (0..self.domain.num_actions()).map(ActionId).collect(),
        }
    }

    pub fn format_state(&self, s: DomainState) -> String {
        match s {
            DomainState::State(a) => self.domain.format_state(a),
            DomainState::AgentError => "agErr".to_string(),
            DomainState::EnvError => "envErr".to_string(),
        }
    }
}

impl Domain {
    pub fn complete(self: &Arc<Self>) -> CompletedDomain {
        CompletedDomain::new(self.clone())
    }
}

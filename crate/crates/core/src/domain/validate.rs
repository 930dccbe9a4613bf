use std::collections::HashSet;
use std::str::FromStr;

use super::{ActionId, Domain, ReactionId};
use crate::ltlf::Assignment;

/// Which states the well-formedness rules are checked on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scope {
    /// States reachable from s0 through δ.
    #[default]
    Reachable,
    /// Every state in 2^F.
    Full,
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reachable" => Ok(Scope::Reachable),
            "full" => Ok(Scope::Full),
            other => Err(format!("unknown scope '{other}' (expected reachable|full)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Existence of agent action: α(s) is empty.
    NoAgentAction { state: Assignment },
    /// Existence of environment reaction: β(s, a) is empty for some a ∈ α(s).
    NoReaction { state: Assignment, action: ActionId },
    /// Uniqueness of environment reaction: two reactions share a successor.
    AmbiguousReaction {
        state: Assignment,
        action: ActionId,
        first: ReactionId,
        second: ReactionId,
    },
}

impl Violation {
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::NoAgentAction { .. } => "existence of agent action",
            Violation::NoReaction { .. } => "existence of environment reaction",
            Violation::AmbiguousReaction { .. } => "uniqueness of environment reaction",
        }
    }

    pub fn describe(&self, d: &Domain) -> String {
        match *self {
            Violation::NoAgentAction { state } => {
                format!("{}: no action enabled in state {}", self.rule(), d.format_state(state))
            }
            Violation::NoReaction { state, action } => format!(
                "{}: no reaction to '{}' in state {}",
                self.rule(),
                d.action_name(action),
                d.format_state(state)
            ),
            Violation::AmbiguousReaction {
                state,
                action,
                first,
                second,
            } => format!(
                "{}: reactions '{}' and '{}' to '{}' in state {} lead to the same state",
                self.rule(),
                d.reaction_name(first),
                d.reaction_name(second),
                d.action_name(action),
                d.format_state(state)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub scope: Scope,
    pub states_checked: u128,
    pub violations: Vec<Violation>,
    /// Further "no agent action" witnesses not listed in `violations`
    /// (full scope over large fluent sets).
    pub omitted: u128,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty() && self.omitted == 0
    }
}

/// Maximum number of unlisted-state witnesses reported in full scope.
const MAX_UNLISTED_WITNESSES: usize = 64;

impl Domain {
    fn check_state(&self, s: Assignment, out: &mut Vec<Violation>) {
        let alpha = self.alpha(s);
        if alpha.is_empty() {
            out.push(Violation::NoAgentAction { state: s });
        }
        for &a in alpha {
            let beta = self.beta(s, a);
            if beta.is_empty() {
                out.push(Violation::NoReaction { state: s, action: a });
            }
            for (i, &r1) in beta.iter().enumerate() {
                for &r2 in &beta[i + 1..] {
                    if self.delta(s, a, r1) == self.delta(s, a, r2) {
                        out.push(Violation::AmbiguousReaction {
                            state: s,
                            action: a,
                            first: r1,
                            second: r2,
                        });
                    }
                }
            }
        }
    }

    /// Checks the three well-formedness rules on the chosen scope.
    pub fn validate(&self, scope: Scope) -> ValidationReport {
        let mut violations = Vec::new();
        match scope {
            Scope::Reachable => {
                let states = self.reachable_states();
                for &s in &states {
                    self.check_state(s, &mut violations);
                }
                ValidationReport {
                    scope,
                    states_checked: states.len() as u128,
                    violations,
                    omitted: 0,
                }
            }
            Scope::Full => {
                // Only states with a nonempty α can break the second and third
                // rule; every other state breaks the first.
                let mut listed: Vec<Assignment> = self
                    .mentioned_states()
                    .into_iter()
                    .filter(|&s| !self.alpha(s).is_empty())
                    .collect();
                listed.sort();
                for &s in &listed {
                    self.check_state(s, &mut violations);
                }
                let n = self.fluents().len();
                let total: u128 = if n >= 128 { u128::MAX } else { 1u128 << n };
                let unlisted = total - listed.len() as u128;
                let listed_set: HashSet<Assignment> = listed.into_iter().collect();
                let mut reported = 0u128;
                let mut bits = 0u128;
                while reported < unlisted && (reported as usize) < MAX_UNLISTED_WITNESSES {
                    let s = Assignment(bits);
                    if !listed_set.contains(&s) {
                        violations.push(Violation::NoAgentAction { state: s });
                        reported += 1;
                    }
                    bits += 1;
                }
                ValidationReport {
                    scope,
                    states_checked: total,
                    violations,
                    omitted: unlisted - reported,
                }
            }
        }
    }
}

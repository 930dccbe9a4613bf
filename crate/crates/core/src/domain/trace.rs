use super::{ActionId, Domain, ReactionId};
use crate::ltlf::{Assignment, FiniteTrace};

/// A sequence of domain states, expected to start at s0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DomainTrace(pub Vec<Assignment>);

impl DomainTrace {
    pub fn states(&self) -> &[Assignment] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Assignment> {
        self.0.last().copied()
    }

    /// The trace read as an LTLf trace over the domain fluents.
    pub fn to_finite_trace(&self, d: &Domain) -> Option<FiniteTrace> {
        FiniteTrace::new(d.fluents().clone(), self.0.clone()).ok()
    }
}

impl Domain {
    /// `Trace(ā, r̄)`: `None` when the lengths differ or some δ application
    /// is undefined.
    pub fn trace_of(&self, actions: &[ActionId], reactions: &[ReactionId]) -> Option<DomainTrace> {
        if actions.len() != reactions.len() {
            return None;
        }
        let mut states = vec![self.initial()];
        let mut s = self.initial();
        for (&a, &r) in actions.iter().zip(reactions) {
            s = self.delta(s, a, r)?;
            states.push(s);
        }
        Some(DomainTrace(states))
    }

    /// Every step is witnessed by some enabled action and applicable
    /// reaction. An empty sequence or one not starting at s0 is illegal.
    pub fn is_legal_trace(&self, t: &DomainTrace) -> bool {
        let states = t.states();
        if states.first() != Some(&self.initial()) {
            return false;
        }
        states.windows(2).all(|w| self.step_witness(w[0], w[1]).is_some())
    }

    /// Some `(a, r)` with `a ∈ α(s)`, `r ∈ β(s, a)` and `δ(s, a, r) = next`.
    pub fn step_witness(&self, s: Assignment, next: Assignment) -> Option<(ActionId, ReactionId)> {
        self.alpha(s).iter().find_map(|&a| {
            self.beta(s, a)
                .iter()
                .find(|&&r| self.delta(s, a, r) == Some(next))
                .map(|&r| (a, r))
        })
    }
}

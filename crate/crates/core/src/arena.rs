//! The game arena: synchronized product of the completed domain D+ and the
//! goal DFA, restricted to states reachable from `(s0, ϱ(q0, s0))`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::budget::{Budget, ResourceError};
use crate::dfa::Dfa;
use crate::domain::{ActionId, CompletedDomain, Domain, DomainState, DomainTrace, ReactionId};
use crate::game::GameGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("domain and goal automaton are over different fluent sets")]
    FluentMismatch,
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("run does not start at the initial arena state")]
    NotFromInitial,
    #[error("run visits error state at position {0}")]
    ErrorInRun(usize),
    #[error("arena state id {0} out of range")]
    NoSuchState(usize),
}

/// A product state. Error states keep the DFA state at which the error
/// happened.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArenaState {
    pub domain: DomainState,
    pub dfa: usize,
}

#[derive(Clone, Debug)]
pub struct Arena {
    domain: Arc<Domain>,
    dfa: Arc<Dfa>,
    states: Vec<ArenaState>,
    index: HashMap<ArenaState, usize>,
    num_actions: usize,
    num_reactions: usize,
    succ: Vec<u32>,
    initial: usize,
    goal: FixedBitSet,
    agent_error: FixedBitSet,
    env_error: FixedBitSet,
    fallback: Vec<usize>,
}

impl Arena {
    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn dfa(&self) -> &Arc<Dfa> {
        &self.dfa
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state(&self, t: usize) -> ArenaState {
        self.states[t]
    }

    pub fn states(&self) -> &[ArenaState] {
        &self.states
    }

    pub fn id_of(&self, s: &ArenaState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// ∂(t, a, r).
    #[inline]
    pub fn step(&self, t: usize, a: ActionId, r: ReactionId) -> usize {
        self.succ[(t * self.num_actions + a.0) * self.num_reactions + r.0] as usize
    }

    /// R′: states whose DFA component is final.
    pub fn goal(&self) -> &FixedBitSet {
        &self.goal
    }

    pub fn agent_error(&self) -> &FixedBitSet {
        &self.agent_error
    }

    pub fn env_error(&self) -> &FixedBitSet {
        &self.env_error
    }

    pub fn is_error(&self, t: usize) -> bool {
        self.agent_error[t] || self.env_error[t]
    }

    /// ¬S_ag ∩ (S_env ∪ R′), the adversarial reachability target.
    pub fn adversarial_target(&self) -> FixedBitSet {
        let mut t = self.env_error.clone();
        t.union_with(&self.goal);
        t.difference_with(&self.agent_error);
        t
    }

    /// ¬S_ag ∩ ¬S_env ∩ R′, the cooperative reachability target.
    pub fn cooperative_target(&self) -> FixedBitSet {
        let mut t = self.goal.clone();
        t.difference_with(&self.agent_error);
        t.difference_with(&self.env_error);
        t
    }

    pub fn non_agent_error(&self) -> FixedBitSet {
        let mut s = self.agent_error.clone();
        s.toggle_range(..);
        s
    }

    pub fn non_error(&self) -> FixedBitSet {
        let mut s = self.agent_error.clone();
        s.union_with(&self.env_error);
        s.toggle_range(..);
        s
    }

    /// α of the domain component, with every action allowed at error states.
    pub fn legal_actions(&self, t: usize) -> Vec<ActionId> {
        match self.states[t].domain {
            DomainState::State(s) => self.domain.alpha(s).to_vec(),
            _ => (0..self.num_actions).map(ActionId).collect(),
        }
    }

    pub fn is_legal(&self, t: usize, a: ActionId) -> bool {
        match self.states[t].domain {
            DomainState::State(s) => self.domain.is_enabled(s, a),
            _ => true,
        }
    }

    pub fn format_state(&self, t: usize) -> String {
        let st = self.states[t];
        let dom = match st.domain {
            DomainState::State(s) => self.domain.format_state(s),
            DomainState::AgentError => "agErr".into(),
            DomainState::EnvError => "envErr".into(),
        };
        format!("({dom}, q{})", st.dfa)
    }

    /// Domain trace of an error-free run from the initial state.
    pub fn project(&self, run: &[usize]) -> Result<DomainTrace, ArenaError> {
        if run.first() != Some(&self.initial) {
            return Err(ArenaError::NotFromInitial);
        }
        run.iter()
            .enumerate()
            .map(|(i, &t)| {
                let st = self.states.get(t).ok_or(ArenaError::NoSuchState(t))?;
                st.domain.assignment().ok_or(ArenaError::ErrorInRun(i))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(DomainTrace)
    }

    pub fn to_dot(&self, skip_errors: bool) -> String {
        let mut out = String::from("digraph arena {\n  __start [shape=point];\n");
        let keep = |t: usize| !(skip_errors && self.is_error(t));
        for t in (0..self.states.len()).filter(|&t| keep(t)) {
            let color = if self.agent_error[t] {
                "red"
            } else if self.env_error[t] {
                "orange"
            } else if self.goal[t] {
                "green"
            } else {
                "black"
            };
            let _ = writeln!(
                out,
                "  t{t} [label=\"{}\", color={color}];",
                self.format_state(t)
            );
        }
        let _ = writeln!(out, "  __start -> t{};", self.initial);
        for t in (0..self.states.len()).filter(|&t| keep(t)) {
            let mut edges: Vec<(usize, Vec<String>)> = Vec::new();
            for a in 0..self.num_actions {
                for r in 0..self.num_reactions {
                    let u = self.step(t, ActionId(a), ReactionId(r));
                    if !keep(u) || (u == t && self.is_error(t)) {
                        continue;
                    }
                    let label = format!(
                        "{}/{}",
                        self.domain.action_name(ActionId(a)),
                        self.domain.reaction_name(ReactionId(r))
                    );
                    match edges.iter_mut().find(|(v, _)| *v == u) {
                        Some((_, ls)) => ls.push(label),
                        None => edges.push((u, vec![label])),
                    }
                }
            }
            for (u, labels) in edges {
                let _ = writeln!(out, "  t{t} -> t{u} [label=\"{}\"];", labels.join("\\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl GameGraph for Arena {
    fn num_states(&self) -> usize {
        self.states.len()
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn num_reactions(&self) -> usize {
        self.num_reactions
    }

    #[inline]
    fn successor(&self, t: usize, a: usize, r: usize) -> usize {
        self.succ[(t * self.num_actions + a) * self.num_reactions + r] as usize
    }

    fn fallback_action(&self, t: usize) -> usize {
        self.fallback[t]
    }
}

/// Builds `D+ ∘ T_φ` breadth first from `(s0, ϱ(q0, s0))`.
pub fn compose(cd: &CompletedDomain, dfa: &Arc<Dfa>, budget: &Budget) -> Result<Arena, ArenaError> {
    let domain = cd.domain().clone();
    if domain.fluents() != dfa.fluents() {
        return Err(ArenaError::FluentMismatch);
    }
    let (na, nr) = (domain.num_actions(), domain.num_reactions());
    let s0 = domain.initial();
    let t0 = ArenaState {
        domain: DomainState::State(s0),
        dfa: dfa.successor(dfa.initial(), s0),
    };

    let mut states = vec![t0];
    let mut index = HashMap::from([(t0, 0usize)]);
    let mut succ: Vec<u32> = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    let mut intern = |st: ArenaState,
                      states: &mut Vec<ArenaState>,
                      queue: &mut VecDeque<usize>|
     -> Result<u32, ArenaError> {
        if let Some(&id) = index.get(&st) {
            return Ok(id as u32);
        }
        budget.check_states(states.len() + 1, "arena construction")?;
        let id = states.len();
        states.push(st);
        index.insert(st, id);
        queue.push_back(id);
        Ok(id as u32)
    };

    while let Some(t) = queue.pop_front() {
        if t % 256 == 0 {
            budget.check_time()?;
        }
        let ArenaState { domain: ds, dfa: q } = states[t];
        let mut row = vec![0u32; na * nr];
        match ds {
            DomainState::State(s) => {
                let ag = intern(
                    ArenaState {
                        domain: DomainState::AgentError,
                        dfa: q,
                    },
                    &mut states,
                    &mut queue,
                )?;
                for a in 0..na {
                    let a_id = ActionId(a);
                    if !domain.is_enabled(s, a_id) {
                        row[a * nr..(a + 1) * nr].fill(ag);
                        continue;
                    }
                    for r in 0..nr {
                        let next = match cd.step(ds, a_id, ReactionId(r)) {
                            DomainState::State(s2) => ArenaState {
                                domain: DomainState::State(s2),
                                dfa: dfa.successor(q, s2),
                            },
                            err => ArenaState { domain: err, dfa: q },
                        };
                        row[a * nr + r] = intern(next, &mut states, &mut queue)?;
                    }
                }
            }
            _ => row.fill(t as u32),
        }
        succ.extend(row);
    }

    let n = states.len();
    let mut goal = FixedBitSet::with_capacity(n);
    let mut agent_error = FixedBitSet::with_capacity(n);
    let mut env_error = FixedBitSet::with_capacity(n);
    let mut fallback = Vec::with_capacity(n);
    for (t, st) in states.iter().enumerate() {
        goal.set(t, dfa.is_final(st.dfa));
        agent_error.set(t, st.domain == DomainState::AgentError);
        env_error.set(t, st.domain == DomainState::EnvError);
        fallback.push(match st.domain {
            DomainState::State(s) => domain.alpha(s).first().map_or(0, |a| a.0),
            _ => 0,
        });
    }

    Ok(Arena {
        domain,
        dfa: dfa.clone(),
        states,
        index,
        num_actions: na,
        num_reactions: nr,
        succ,
        initial: 0,
        goal,
        agent_error,
        env_error,
        fallback,
    })
}

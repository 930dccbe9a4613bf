use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Domain, DomainBuilder, DomainError};
use crate::ltlf::{Assignment, FluentSet, LtlfError};

/// On-disk JSON form of a domain. States are arrays of fluent names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub fluents: Vec<String>,
    pub initial: Vec<String>,
    pub actions: Vec<String>,
    pub reactions: Vec<String>,
    #[serde(default)]
    pub alpha: Vec<AlphaEntry>,
    #[serde(default)]
    pub beta: Vec<BetaEntry>,
    #[serde(default)]
    pub delta: Vec<DeltaEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub state: Vec<String>,
    pub actions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaEntry {
    pub state: Vec<String>,
    pub action: String,
    pub reactions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaEntry {
    pub state: Vec<String>,
    pub action: String,
    pub reaction: String,
    pub next: Vec<String>,
}

fn state_of(fluents: &FluentSet, names: &[String]) -> Result<Assignment, DomainError> {
    fluents.assignment(names).map_err(|e| match e {
        LtlfError::UndeclaredAtom { name, .. } => DomainError::UnknownFluent(name),
        other => DomainError::Fluents(other),
    })
}

impl DomainFile {
    pub fn into_domain(self) -> Result<Domain, DomainError> {
        let fluents = FluentSet::new(&self.fluents)?;
        let initial = state_of(&fluents, &self.initial)?;
        let mut b = DomainBuilder::new(fluents.clone(), initial, self.actions, self.reactions)?;
        for e in &self.alpha {
            let s = state_of(&fluents, &e.state)?;
            let acts = e
                .actions
                .iter()
                .map(|a| b.action(a))
                .collect::<Result<Vec<_>, _>>()?;
            b.enable(s, acts);
        }
        for e in &self.beta {
            let s = state_of(&fluents, &e.state)?;
            let a = b.action(&e.action)?;
            let rs = e
                .reactions
                .iter()
                .map(|r| b.reaction(r))
                .collect::<Result<Vec<_>, _>>()?;
            b.allow(s, a, rs);
        }
        for e in &self.delta {
            let s = state_of(&fluents, &e.state)?;
            let a = b.action(&e.action)?;
            let r = b.reaction(&e.reaction)?;
            let next = state_of(&fluents, &e.next)?;
            b.transition(s, a, r, next)?;
        }
        b.build()
    }
}

impl Domain {
    pub fn from_json(text: &str) -> Result<Domain, DomainError> {
        serde_json::from_str::<DomainFile>(text)?.into_domain()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Domain, DomainError> {
        Domain::from_json(&std::fs::read_to_string(path)?)
    }

    /// Deterministic file form: entries sorted by state bits, then by
    /// declared action and reaction order.
    pub fn to_file(&self) -> DomainFile {
        let names = |s: Assignment| self.fluents.true_names(s);
        DomainFile {
            fluents: self.fluents.names().map(String::from).collect(),
            initial: names(self.initial),
            actions: self.actions.clone(),
            reactions: self.reactions.clone(),
            alpha: self
                .alpha_table()
                .into_iter()
                .map(|(s, acts)| AlphaEntry {
                    state: names(s),
                    actions: acts.iter().map(|&a| self.action_name(a).to_string()).collect(),
                })
                .collect(),
            beta: self
                .beta_table()
                .into_iter()
                .map(|((s, a), rs)| BetaEntry {
                    state: names(s),
                    action: self.action_name(a).to_string(),
                    reactions: rs.iter().map(|&r| self.reaction_name(r).to_string()).collect(),
                })
                .collect(),
            delta: self
                .delta_table()
                .into_iter()
                .map(|((s, a, r), t)| DeltaEntry {
                    state: names(s),
                    action: self.action_name(a).to_string(),
                    reaction: self.reaction_name(r).to_string(),
                    next: names(t),
                })
                .collect(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("domain serializes")
    }
}

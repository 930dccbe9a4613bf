//! Best-effort synthesis: solve the adversarial and the cooperative
//! reachability game on the arena and combine their positional strategies.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{compose, Arena, ArenaError};
use crate::budget::{Budget, ResourceError};
use crate::dfa::{compile_with, DfaError};
use crate::domain::{ActionId, Domain, DomainState, DomainTrace, Scope, ValidationReport};
use crate::game::{
    forced_under, possible_under, solve_adversarial_reach, solve_cooperative_reach, GameGraph,
    GameResult,
};
use crate::ltlf::Formula;

/// Value of the initial history under the synthesized strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    /// The goal can be enforced: the strategy is a strong solution.
    Winning,
    /// The goal can only be reached with environment cooperation.
    Pending,
    /// The goal cannot be reached at all.
    Losing,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Winning => "winning",
            Classification::Pending => "pending",
            Classification::Losing => "losing",
        })
    }
}

/// Which games to solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    #[serde(rename = "bestEffort")]
    BestEffort,
    #[serde(rename = "adversarialOnly")]
    AdversarialOnly,
    #[serde(rename = "cooperativeOnly")]
    CooperativeOnly,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::BestEffort, Mode::AdversarialOnly, Mode::CooperativeOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::BestEffort => "bestEffort",
            Mode::AdversarialOnly => "adversarialOnly",
            Mode::CooperativeOnly => "cooperativeOnly",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Default)]
pub struct SynthesisOptions {
    pub mode: Mode,
    pub budget: Budget,
    pub scope: Scope,
}

/// Wall-clock time of each pipeline step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepTimings {
    /// Goal DFA and completed domain.
    pub dfa: Duration,
    pub arena: Duration,
    pub adversarial: Duration,
    pub cooperative: Duration,
    pub combine: Duration,
}

impl StepTimings {
    pub fn total(&self) -> Duration {
        self.dfa + self.arena + self.adversarial + self.cooperative + self.combine
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("domain violates {} well-formedness rule instance(s)", .0.violations.len() as u128 + .0.omitted)]
    InvalidDomain(ValidationReport),
    #[error("goal mentions fluents outside the domain")]
    ForeignGoal,
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

impl SynthError {
    pub fn resource(&self) -> Option<&ResourceError> {
        match self {
            SynthError::Dfa(DfaError::Resource(r)) | SynthError::Arena(ArenaError::Resource(r)) => {
                Some(r)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActError {
    #[error("history is empty or does not start at the initial state")]
    BadStart,
    #[error("no legal move under the strategy explains step {0} of the history")]
    Inconsistent(usize),
}

/// The combined positional strategy κ with the regions it was built from.
#[derive(Clone, Debug)]
pub struct BestEffortStrategy {
    arena: Arc<Arena>,
    kappa: Vec<usize>,
    adversarial: GameResult,
    cooperative: GameResult,
    classification: Classification,
    mode: Mode,
    timings: StepTimings,
}

fn empty_result(n: usize) -> GameResult {
    GameResult {
        region: FixedBitSet::with_capacity(n),
        strategy: vec![None; n],
        rank: vec![None; n],
    }
}

/// Synthesizes a best-effort strategy with default options.
pub fn synthesize(domain: &Arc<Domain>, goal: &Formula) -> Result<BestEffortStrategy, SynthError> {
    synthesize_with(domain, goal, &SynthesisOptions::default())
}

pub fn synthesize_with(
    domain: &Arc<Domain>,
    goal: &Formula,
    opts: &SynthesisOptions,
) -> Result<BestEffortStrategy, SynthError> {
    let report = domain.validate(opts.scope);
    if !report.is_ok() {
        return Err(SynthError::InvalidDomain(report));
    }
    if goal.atoms().into_iter().any(|i| i >= domain.fluents().len()) {
        return Err(SynthError::ForeignGoal);
    }
    let budget = &opts.budget;
    let mut timings = StepTimings::default();

    let clock = Instant::now();
    let dfa = Arc::new(compile_with(goal, domain.fluents(), budget)?);
    let completed = domain.complete();
    timings.dfa = clock.elapsed();

    let clock = Instant::now();
    let arena = Arc::new(compose(&completed, &dfa, budget)?);
    timings.arena = clock.elapsed();
    budget.check_time().map_err(ArenaError::from)?;

    let n = arena.num_states();
    let clock = Instant::now();
    let adversarial = if opts.mode == Mode::CooperativeOnly {
        empty_result(n)
    } else {
        solve_adversarial_reach(arena.as_ref(), &arena.adversarial_target())
    };
    timings.adversarial = clock.elapsed();
    budget.check_time().map_err(ArenaError::from)?;

    let clock = Instant::now();
    let cooperative = if opts.mode == Mode::AdversarialOnly {
        empty_result(n)
    } else {
        solve_cooperative_reach(arena.as_ref(), &arena.cooperative_target())
    };
    timings.cooperative = clock.elapsed();
    budget.check_time().map_err(ArenaError::from)?;

    let clock = Instant::now();
    let kappa = combine(&arena, &adversarial, &cooperative);
    let t0 = arena.initial();
    let classification = if adversarial.region[t0] {
        Classification::Winning
    } else if cooperative.region[t0] {
        Classification::Pending
    } else {
        Classification::Losing
    };
    timings.combine = clock.elapsed();

    Ok(BestEffortStrategy {
        arena,
        kappa,
        adversarial,
        cooperative,
        classification,
        mode: opts.mode,
        timings,
    })
}

/// κ_adv on W_adv, κ_coop on W_coop \ W_adv, the first legal action elsewhere.
fn combine(arena: &Arena, adv: &GameResult, coop: &GameResult) -> Vec<usize> {
    (0..arena.num_states())
        .map(|t| {
            if adv.region[t] {
                adv.strategy[t].expect("strategy defined on region")
            } else if coop.region[t] {
                coop.strategy[t].expect("strategy defined on region")
            } else {
                arena.fallback_action(t)
            }
        })
        .collect()
}

impl BestEffortStrategy {
    pub fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.arena.domain()
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn timings(&self) -> StepTimings {
        self.timings
    }

    pub fn kappa(&self) -> &[usize] {
        &self.kappa
    }

    pub fn action_at(&self, t: usize) -> ActionId {
        ActionId(self.kappa[t])
    }

    pub fn adversarial(&self) -> &GameResult {
        &self.adversarial
    }

    pub fn cooperative(&self) -> &GameResult {
        &self.cooperative
    }

    pub fn w_adv(&self) -> &FixedBitSet {
        &self.adversarial.region
    }

    pub fn w_coop(&self) -> &FixedBitSet {
        &self.cooperative.region
    }

    /// The same regions with a different action table, e.g. for mutation
    /// testing.
    pub fn with_kappa(&self, kappa: Vec<usize>) -> BestEffortStrategy {
        assert_eq!(kappa.len(), self.kappa.len());
        BestEffortStrategy {
            kappa,
            ..self.clone()
        }
    }

    /// Whether κ follows the combination rule at every arena state.
    pub fn follows_case_split(&self) -> bool {
        self.kappa == combine(&self.arena, &self.adversarial, &self.cooperative)
    }

    /// Arena state reached by replaying a legal history consistent with κ.
    pub fn replay(&self, history: &DomainTrace) -> Result<usize, ActError> {
        let states = history.states();
        let d = self.domain();
        if states.first() != Some(&d.initial()) {
            return Err(ActError::BadStart);
        }
        let mut t = self.arena.initial();
        for (i, w) in states.windows(2).enumerate() {
            let a = ActionId(self.kappa[t]);
            let r = d
                .beta(w[0], a)
                .iter()
                .copied()
                .find(|&r| d.delta(w[0], a, r) == Some(w[1]))
                .ok_or(ActError::Inconsistent(i + 1))?;
            t = self.arena.step(t, a, r);
        }
        Ok(t)
    }

    /// σ(history): the action κ prescribes at the arena state the history
    /// leads to.
    pub fn act(&self, history: &DomainTrace) -> Result<ActionId, ActError> {
        self.replay(history).map(|t| ActionId(self.kappa[t]))
    }

    /// Arena states reachable from the initial state when the agent follows κ
    /// and the environment plays any reaction.
    pub fn reachable_under_kappa(&self) -> FixedBitSet {
        let a = &self.arena;
        let n = a.num_states();
        let mut seen = FixedBitSet::with_capacity(n);
        seen.insert(a.initial());
        let mut stack = vec![a.initial()];
        while let Some(t) = stack.pop() {
            for r in 0..a.num_reactions() {
                let u = a.successor(t, self.kappa[t], r);
                if !seen.put(u) {
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Checks that κ attains the value of every history it can produce:
    /// from W_adv states every κ-play reaches the adversarial target, from
    /// W_coop \ W_adv states some κ-play reaches the cooperative target, and
    /// κ is legal everywhere. Error states stand for no legal history and are
    /// skipped.
    pub fn verify_maximality(&self) -> VerificationReport {
        let a = &self.arena;
        let forced = forced_under(a.as_ref(), &self.kappa, &a.adversarial_target());
        let possible = possible_under(a.as_ref(), &self.kappa, &a.cooperative_target());
        let mut violations = Vec::new();
        let reach = self.reachable_under_kappa();
        for t in reach.ones() {
            if a.is_error(t) {
                continue;
            }
            let action = ActionId(self.kappa[t]);
            let describe = || a.format_state(t);
            if !a.is_legal(t, action) {
                violations.push(ViolationEntry {
                    state: describe(),
                    kind: ViolationKind::IllegalAction,
                    detail: format!(
                        "action '{}' is not enabled",
                        self.domain().action_name(action)
                    ),
                });
            }
            if self.adversarial.region[t] {
                if !forced[t] {
                    violations.push(ViolationEntry {
                        state: describe(),
                        kind: ViolationKind::WinNotEnforced,
                        detail: "some play from this winning state avoids the goal".into(),
                    });
                }
            } else if self.cooperative.region[t] && !possible[t] {
                violations.push(ViolationEntry {
                    state: describe(),
                    kind: ViolationKind::CooperationLost,
                    detail: "no play from this pending state reaches the goal".into(),
                });
            }
        }
        VerificationReport {
            checked: reach.ones().filter(|&t| !a.is_error(t)).count(),
            violations,
        }
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Json => {
                serde_json::to_string_pretty(&self.to_export()).expect("export serializes")
            }
        }
    }

    pub fn to_export(&self) -> StrategyExport {
        let a = &self.arena;
        let d = self.domain();
        let state_json = |t: usize| {
            let st = a.state(t);
            ArenaStateJson {
                domain_state: match st.domain {
                    DomainState::State(s) => DomainStateJson::Fluents(d.fluents().true_names(s)),
                    DomainState::AgentError => DomainStateJson::Error("agErr".into()),
                    DomainState::EnvError => DomainStateJson::Error("envErr".into()),
                },
                dfa_state: st.dfa,
            }
        };
        let table = (0..a.num_states())
            .map(|t| StrategyEntry {
                state: state_json(t),
                action: d.action_name(ActionId(self.kappa[t])).to_string(),
                region: if self.adversarial.region[t] {
                    RegionTag::Adversarial
                } else if self.cooperative.region[t] {
                    RegionTag::Cooperative
                } else {
                    RegionTag::None
                },
            })
            .collect();
        StrategyExport {
            classification: self.classification,
            mode: self.mode,
            initial: state_json(a.initial()),
            table,
            w_adv: self.adversarial.region.ones().map(state_json).collect(),
            w_coop: self.cooperative.region.ones().map(state_json).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    IllegalAction,
    WinNotEnforced,
    CooperationLost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationEntry {
    pub state: String,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Number of non-error arena states examined.
    pub checked: usize,
    pub violations: Vec<ViolationEntry>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format '{other}' (expected json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainStateJson {
    Fluents(Vec<String>),
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArenaStateJson {
    pub domain_state: DomainStateJson,
    pub dfa_state: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTag {
    Adversarial,
    Cooperative,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyEntry {
    #[serde(flatten)]
    pub state: ArenaStateJson,
    pub action: String,
    pub region: RegionTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StrategyExport {
    pub classification: Classification,
    pub mode: Mode,
    pub initial: ArenaStateJson,
    pub table: Vec<StrategyEntry>,
    pub w_adv: Vec<ArenaStateJson>,
    pub w_coop: Vec<ArenaStateJson>,
}

impl StrategyExport {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

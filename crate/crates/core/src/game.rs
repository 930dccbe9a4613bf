//! Reachability games on deterministic arenas where the agent picks an
//! action and the environment a reaction at every step.
//!
//! Regions are least fixpoints computed by backward worklist induction over
//! precomputed predecessor lists, one layer per fixpoint iteration, so the
//! rank of a state is the iteration at which it joined.

use fixedbitset::FixedBitSet;

/// A deterministic, total game graph over `Act × React`.
pub trait GameGraph {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    fn num_reactions(&self) -> usize;
    fn successor(&self, t: usize, a: usize, r: usize) -> usize;

    /// Action prescribed at states where any action will do (target states).
    fn fallback_action(&self, _t: usize) -> usize {
        0
    }
}

/// A game graph given by an explicit successor table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitGame {
    pub num_states: usize,
    pub num_actions: usize,
    pub num_reactions: usize,
    /// `succ[(t * num_actions + a) * num_reactions + r]`
    pub succ: Vec<usize>,
}

impl GameGraph for ExplicitGame {
    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn num_reactions(&self) -> usize {
        self.num_reactions
    }

    fn successor(&self, t: usize, a: usize, r: usize) -> usize {
        self.succ[(t * self.num_actions + a) * self.num_reactions + r]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameResult {
    pub region: FixedBitSet,
    /// Defined exactly on the region.
    pub strategy: Vec<Option<usize>>,
    /// Fixpoint iteration at which each region state joined.
    pub rank: Vec<Option<u32>>,
}

impl GameResult {
    pub fn contains(&self, t: usize) -> bool {
        self.region[t]
    }
}

/// `(t, a)` pairs with an edge into each state, one entry per reaction.
fn predecessors<G: GameGraph + ?Sized>(g: &G) -> (Vec<u32>, Vec<(u32, u32)>) {
    let (n, na, nr) = (g.num_states(), g.num_actions(), g.num_reactions());
    let mut count = vec![0u32; n + 1];
    for t in 0..n {
        for a in 0..na {
            for r in 0..nr {
                count[g.successor(t, a, r) + 1] += 1;
            }
        }
    }
    for i in 0..n {
        count[i + 1] += count[i];
    }
    let mut fill = count.clone();
    let mut edges = vec![(0u32, 0u32); count[n] as usize];
    for t in 0..n {
        for a in 0..na {
            for r in 0..nr {
                let u = g.successor(t, a, r);
                edges[fill[u] as usize] = (t as u32, a as u32);
                fill[u] += 1;
            }
        }
    }
    (count, edges)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// ∃a ∀r
    Adversarial,
    /// ∃a ∃r
    Cooperative,
}

fn solve<G: GameGraph + ?Sized>(
    g: &G,
    safe: Option<&FixedBitSet>,
    target: &FixedBitSet,
    mode: Mode,
) -> GameResult {
    let (n, na, nr) = (g.num_states(), g.num_actions(), g.num_reactions());
    let (offsets, edges) = predecessors(g);
    let mut region = FixedBitSet::with_capacity(n);
    let mut strategy = vec![None; n];
    let mut rank = vec![None; n];
    // reactions of (t, a) not yet known to lead into the region
    let mut pending = vec![nr as u32; n * na];
    let allowed = |t: usize| safe.is_none_or(|s| s[t]);

    let mut frontier: Vec<usize> = target.ones().filter(|&t| t < n && allowed(t)).collect();
    for &t in &frontier {
        region.insert(t);
        rank[t] = Some(0);
        strategy[t] = Some(g.fallback_action(t));
    }
    let mut level = 0u32;
    while !frontier.is_empty() {
        level += 1;
        let mut joined: Vec<usize> = Vec::new();
        let mut best: Vec<(usize, usize)> = Vec::new();
        for &u in &frontier {
            for &(t, a) in &edges[offsets[u] as usize..offsets[u + 1] as usize] {
                let (t, a) = (t as usize, a as usize);
                if region[t] || !allowed(t) {
                    continue;
                }
                let witnessed = match mode {
                    Mode::Adversarial => {
                        let c = &mut pending[t * na + a];
                        *c -= 1;
                        *c == 0
                    }
                    Mode::Cooperative => true,
                };
                if witnessed {
                    match best.iter_mut().find(|(s, _)| *s == t) {
                        Some(entry) => entry.1 = entry.1.min(a),
                        None => {
                            joined.push(t);
                            best.push((t, a));
                        }
                    }
                }
            }
        }
        for (t, a) in best {
            region.insert(t);
            rank[t] = Some(level);
            strategy[t] = Some(a);
        }
        joined.sort_unstable();
        frontier = joined;
    }
    GameResult {
        region,
        strategy,
        rank,
    }
}

/// Agent winning region of `Reach(target)` against every reaction sequence,
/// with a uniform positional winning strategy.
pub fn solve_adversarial_reach<G: GameGraph + ?Sized>(g: &G, target: &FixedBitSet) -> GameResult {
    solve(g, None, target, Mode::Adversarial)
}

/// Cooperatively winning region of `Reach(target)`: some reaction sequence
/// reaches the target under the returned positional strategy.
pub fn solve_cooperative_reach<G: GameGraph + ?Sized>(g: &G, target: &FixedBitSet) -> GameResult {
    solve(g, None, target, Mode::Cooperative)
}

/// Winning region of `SafeReach(safe, target)`: reach the target while only
/// visiting safe states up to and including the target visit.
pub fn solve_adversarial_safe_reach<G: GameGraph + ?Sized>(
    g: &G,
    safe: &FixedBitSet,
    target: &FixedBitSet,
) -> FixedBitSet {
    solve(g, Some(safe), target, Mode::Adversarial).region
}

pub fn solve_cooperative_safe_reach<G: GameGraph + ?Sized>(
    g: &G,
    safe: &FixedBitSet,
    target: &FixedBitSet,
) -> FixedBitSet {
    solve(g, Some(safe), target, Mode::Cooperative).region
}

/// States from which every play under the fixed positional `kappa`
/// reaches `target`.
pub fn forced_under<G: GameGraph + ?Sized>(g: &G, kappa: &[usize], target: &FixedBitSet) -> FixedBitSet {
    let n = g.num_states();
    let nr = g.num_reactions();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in 0..n {
        for r in 0..nr {
            preds[g.successor(t, kappa[t], r)].push(t);
        }
    }
    let mut pending = vec![nr; n];
    let mut won = target.clone();
    won.grow(n);
    let mut stack: Vec<usize> = won.ones().collect();
    while let Some(u) = stack.pop() {
        for &t in &preds[u] {
            if won[t] {
                continue;
            }
            pending[t] -= 1;
            if pending[t] == 0 {
                won.insert(t);
                stack.push(t);
            }
        }
    }
    won
}

/// States from which some play under the fixed positional `kappa` reaches
/// `target`.
pub fn possible_under<G: GameGraph + ?Sized>(g: &G, kappa: &[usize], target: &FixedBitSet) -> FixedBitSet {
    let n = g.num_states();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in 0..n {
        for r in 0..g.num_reactions() {
            preds[g.successor(t, kappa[t], r)].push(t);
        }
    }
    let mut won = target.clone();
    won.grow(n);
    let mut stack: Vec<usize> = won.ones().collect();
    while let Some(u) = stack.pop() {
        for &t in &preds[u] {
            if !won[t] {
                won.insert(t);
                stack.push(t);
            }
        }
    }
    won
}

//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the solver under test; game graphs are only read through `successor`.

#![allow(dead_code)]

use besynth::game::GameGraph;
use fixedbitset::FixedBitSet;

/// A copied successor table.
pub struct Table {
    pub n: usize,
    pub na: usize,
    pub nr: usize,
    succ: Vec<usize>,
}

impl Table {
    pub fn of<G: GameGraph + ?Sized>(g: &G) -> Self {
        let (n, na, nr) = (g.num_states(), g.num_actions(), g.num_reactions());
        let mut succ = Vec::with_capacity(n * na * nr);
        for t in 0..n {
            for a in 0..na {
                for r in 0..nr {
                    succ.push(g.successor(t, a, r));
                }
            }
        }
        Table { n, na, nr, succ }
    }

    pub fn next(&self, t: usize, a: usize, r: usize) -> usize {
        self.succ[(t * self.na + a) * self.nr + r]
    }
}

pub fn bits(set: &FixedBitSet, n: usize) -> Vec<bool> {
    (0..n).map(|i| set.contains(i)).collect()
}

pub fn to_set(v: &[bool]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(v.len());
    for (i, &b) in v.iter().enumerate() {
        s.set(i, b);
    }
    s
}

/// `ok(t, k)`: from `t` the target is reached within `k` steps while only
/// safe states are visited, where `step(t, prev)` decides one move. `n`
/// steps always suffice on `n` states.
fn horizon<F>(n: usize, safe: &[bool], target: &[bool], step: F) -> Vec<bool>
where
    F: Fn(usize, &[bool]) -> bool,
{
    let mut cur: Vec<bool> = (0..n).map(|t| safe[t] && target[t]).collect();
    for _ in 0..n {
        let next: Vec<bool> = (0..n)
            .map(|t| safe[t] && (target[t] || step(t, &cur)))
            .collect();
        cur = next;
    }
    cur
}

fn all(n: usize) -> Vec<bool> {
    vec![true; n]
}

/// Bounded-horizon adversarial SafeReach: some action wins for every reaction.
pub fn adv_safe_reach(g: &Table, safe: &[bool], target: &[bool]) -> Vec<bool> {
    horizon(g.n, safe, target, |t, prev| {
        (0..g.na).any(|a| (0..g.nr).all(|r| prev[g.next(t, a, r)]))
    })
}

/// Bounded-horizon cooperative SafeReach: some action and some reaction.
pub fn coop_safe_reach(g: &Table, safe: &[bool], target: &[bool]) -> Vec<bool> {
    horizon(g.n, safe, target, |t, prev| {
        (0..g.na).any(|a| (0..g.nr).any(|r| prev[g.next(t, a, r)]))
    })
}

pub fn adv_reach(g: &Table, target: &[bool]) -> Vec<bool> {
    adv_safe_reach(g, &all(g.n), target)
}

pub fn coop_reach(g: &Table, target: &[bool]) -> Vec<bool> {
    coop_safe_reach(g, &all(g.n), target)
}

/// Every play under the fixed positional `sigma` reaches the target.
pub fn forced_by(g: &Table, sigma: &[usize], target: &[bool]) -> Vec<bool> {
    horizon(g.n, &all(g.n), target, |t, prev| {
        (0..g.nr).all(|r| prev[g.next(t, sigma[t], r)])
    })
}

/// Some play under the fixed positional `sigma` reaches the target.
pub fn possible_by(g: &Table, sigma: &[usize], target: &[bool]) -> Vec<bool> {
    horizon(g.n, &all(g.n), target, |t, prev| {
        (0..g.nr).any(|r| prev[g.next(t, sigma[t], r)])
    })
}

fn for_each_strategy(n: usize, na: usize, mut f: impl FnMut(&[usize])) {
    let mut sigma = vec![0usize; n];
    loop {
        f(&sigma);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            sigma[i] += 1;
            if sigma[i] < na {
                break;
            }
            sigma[i] = 0;
            i += 1;
        }
    }
}

/// Union over all positional strategies of the states they win from.
pub fn enumerate_adv(g: &Table, target: &[bool]) -> Vec<bool> {
    let mut won = vec![false; g.n];
    for_each_strategy(g.n, g.na, |sigma| {
        for (w, f) in won.iter_mut().zip(forced_by(g, sigma, target)) {
            *w |= f;
        }
    });
    won
}

pub fn enumerate_coop(g: &Table, target: &[bool]) -> Vec<bool> {
    let mut won = vec![false; g.n];
    for_each_strategy(g.n, g.na, |sigma| {
        for (w, f) in won.iter_mut().zip(possible_by(g, sigma, target)) {
            *w |= f;
        }
    });
    won
}

/// States reachable from `from` when the agent follows `sigma`.
pub fn reachable_by(g: &Table, sigma: &[usize], from: usize) -> Vec<bool> {
    let mut seen = vec![false; g.n];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(t) = stack.pop() {
        for r in 0..g.nr {
            let u = g.next(t, sigma[t], r);
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

/// Independent maximality check of a positional strategy on an arena:
/// every κ-reachable non-error state with a positive value keeps it.
/// `legal(t, a)` decides action legality. Returns the offending states.
pub fn value_violations(
    g: &Table,
    sigma: &[usize],
    initial: usize,
    adv_target: &[bool],
    coop_target: &[bool],
    is_error: &[bool],
    legal: impl Fn(usize, usize) -> bool,
) -> Vec<usize> {
    let w_adv = adv_reach(g, adv_target);
    let w_coop = coop_reach(g, coop_target);
    let forced = forced_by(g, sigma, adv_target);
    let possible = possible_by(g, sigma, coop_target);
    reachable_by(g, sigma, initial)
        .iter()
        .enumerate()
        .filter(|&(t, &r)| r && !is_error[t])
        .map(|(t, _)| t)
        .filter(|&t| {
            !legal(t, sigma[t]) || (w_adv[t] && !forced[t]) || (!w_adv[t] && w_coop[t] && !possible[t])
        })
        .collect()
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

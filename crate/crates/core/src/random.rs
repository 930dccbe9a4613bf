//! Seeded generators for formulas, domains and game graphs, used by the
//! property tests and available to downstream fuzzing.

use rand::seq::index::sample;
use rand::Rng;

use crate::domain::{ActionId, Domain, DomainBuilder, ReactionId};
use crate::game::ExplicitGame;
use crate::ltlf::{Assignment, FluentSet, Formula};

/// A random formula over `fluents` with at most `max_size` distinct
/// subformulas. Every operator of the surface syntax can appear.
pub fn formula<R: Rng + ?Sized>(rng: &mut R, fluents: &FluentSet, max_size: usize) -> Formula {
    assert!(max_size >= 1 && !fluents.is_empty());
    loop {
        let budget = rng.gen_range(1..=max_size);
        let f = build_formula(rng, fluents, budget);
        if f.size() <= max_size {
            return f;
        }
    }
}

fn build_formula<R: Rng + ?Sized>(rng: &mut R, fluents: &FluentSet, nodes: usize) -> Formula {
    if nodes <= 1 {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(fluents.fluent(rng.gen_range(0..fluents.len()))),
        };
    }
    let unary = nodes == 2 || rng.gen_bool(0.4);
    if unary {
        let c = build_formula(rng, fluents, nodes - 1);
        match rng.gen_range(0..6) {
            0 => Formula::not(c),
            1 => Formula::next(c),
            2 => Formula::weak_next(c),
            3 => Formula::eventually(c),
            4 => Formula::always(c),
            _ => Formula::not(c),
        }
    } else {
        let left = rng.gen_range(1..nodes - 1);
        let a = build_formula(rng, fluents, left);
        let b = build_formula(rng, fluents, nodes - 1 - left);
        match rng.gen_range(0..4) {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            2 => Formula::implies(a, b),
            _ => Formula::until(a, b),
        }
    }
}

/// A fluent set `p0, p1, ...` of the given size.
pub fn fluent_set(n: usize) -> FluentSet {
    FluentSet::new((0..n).map(|i| format!("p{i}"))).expect("generated names are valid")
}

/// Shape limits for [`domain`].
#[derive(Clone, Copy, Debug)]
pub struct DomainShape {
    pub max_fluents: usize,
    pub max_actions: usize,
    pub max_reactions: usize,
}

impl Default for DomainShape {
    fn default() -> Self {
        DomainShape {
            max_fluents: 3,
            max_actions: 3,
            max_reactions: 3,
        }
    }
}

/// A random domain defined on every state of `2^F` that satisfies the
/// three well-formedness rules on the full scope.
pub fn domain<R: Rng + ?Sized>(rng: &mut R, shape: DomainShape) -> Domain {
    let nf = rng.gen_range(1..=shape.max_fluents);
    let na = rng.gen_range(1..=shape.max_actions);
    let nr = rng.gen_range(1..=shape.max_reactions);
    let fluents = fluent_set(nf);
    let states = 1usize << nf;
    let initial = Assignment(rng.gen_range(0..states) as u128);
    let mut b = DomainBuilder::new(
        fluents,
        initial,
        (0..na).map(|i| format!("a{i}")).collect(),
        (0..nr).map(|i| format!("r{i}")).collect(),
    )
    .expect("generated names are distinct");
    for s in 0..states {
        let s = Assignment(s as u128);
        let k = rng.gen_range(1..=na);
        let actions: Vec<ActionId> = sample(rng, na, k).into_iter().map(ActionId).collect();
        b.enable(s, actions.iter().copied());
        for a in actions {
            let m = rng.gen_range(1..=nr.min(states));
            let reactions = sample(rng, nr, m).into_vec();
            let targets = sample(rng, states, m).into_vec();
            b.allow(s, a, reactions.iter().map(|&r| ReactionId(r)));
            for (r, t) in reactions.into_iter().zip(targets) {
                b.transition(s, a, ReactionId(r), Assignment(t as u128))
                    .expect("fresh entry");
            }
        }
    }
    b.build().expect("generated tables are consistent")
}

/// A random total game graph with up to the given dimensions.
pub fn game<R: Rng + ?Sized>(
    rng: &mut R,
    max_states: usize,
    max_actions: usize,
    max_reactions: usize,
) -> ExplicitGame {
    let n = rng.gen_range(1..=max_states);
    let na = rng.gen_range(1..=max_actions);
    let nr = rng.gen_range(1..=max_reactions);
    ExplicitGame {
        num_states: n,
        num_actions: na,
        num_reactions: nr,
        succ: (0..n * na * nr).map(|_| rng.gen_range(0..n)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    use super::*;
    use crate::domain::Scope;
    use crate::ltlf::parse;

    #[test]
    fn formulas_respect_size_and_round_trip() {
        let mut rng = StdRng::seed_from_u64(1);
        let fl = fluent_set(3);
        for _ in 0..500 {
            let f = formula(&mut rng, &fl, 6);
            assert!(f.size() <= 6);
            assert_eq!(parse(&f.to_string(), &fl).unwrap(), f);
        }
    }

    #[test]
    fn domains_are_valid_on_full_scope() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..100 {
            let d = domain(&mut rng, DomainShape::default());
            assert!(d.validate(Scope::Full).is_ok());
        }
    }

    #[test]
    fn games_are_total() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let g = game(&mut rng, 8, 3, 3);
            assert_eq!(g.succ.len(), g.num_states * g.num_actions * g.num_reactions);
            assert!(g.succ.iter().all(|&u| u < g.num_states));
        }
    }
}

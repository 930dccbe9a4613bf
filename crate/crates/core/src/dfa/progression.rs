//! Formula-progression construction.
//!
//! The goal is put in negation normal form and hash-consed. A DFA state is a
//! disjunction of clauses, each clause a set of obligations on the rest of
//! the trace: `Strong(ψ)` demands at least one more instant satisfying `ψ`,
//! `Weak(ψ)` demands `ψ` only if the trace continues. A state is final when
//! some clause holds of the empty remainder, i.e. contains only weak
//! obligations.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{DfaError, MAX_SUPPORT};
use crate::budget::Budget;
use crate::ltlf::Formula;

type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Nnf {
    True,
    False,
    Lit(usize, bool),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Next(NodeId),
    WeakNext(NodeId),
    Until(NodeId, NodeId),
    Release(NodeId, NodeId),
}

const TRUE: NodeId = 0;
const FALSE: NodeId = 1;

/// Hash-consed NNF nodes.
struct NnfArena {
    nodes: Vec<Nnf>,
    index: HashMap<Nnf, NodeId>,
}

impl NnfArena {
    fn new() -> Self {
        let mut a = NnfArena {
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        a.intern(Nnf::True);
        a.intern(Nnf::False);
        a
    }

    fn intern(&mut self, n: Nnf) -> NodeId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n.clone());
        self.index.insert(n, id);
        id
    }

    fn junction(&mut self, items: Vec<NodeId>, conj: bool) -> NodeId {
        let (unit, zero) = if conj { (TRUE, FALSE) } else { (FALSE, TRUE) };
        let mut flat = Vec::new();
        for id in items {
            match &self.nodes[id as usize] {
                Nnf::And(xs) if conj => flat.extend(xs.iter().copied()),
                Nnf::Or(xs) if !conj => flat.extend(xs.iter().copied()),
                _ if id == zero => return zero,
                _ if id == unit => {}
                _ => flat.push(id),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        for &id in &flat {
            if let Nnf::Lit(v, pol) = self.nodes[id as usize] {
                if let Some(&other) = self.index.get(&Nnf::Lit(v, !pol)) {
                    if flat.binary_search(&other).is_ok() {
                        return zero;
                    }
                }
            }
        }
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ if conj => self.intern(Nnf::And(flat)),
            _ => self.intern(Nnf::Or(flat)),
        }
    }

    /// NNF of `f` (or of its negation when `positive` is false).
    fn nnf_of(&mut self, f: &Formula, positive: bool) -> NodeId {
        match f {
            Formula::True => {
                if positive {
                    TRUE
                } else {
                    FALSE
                }
            }
            Formula::False => {
                if positive {
                    FALSE
                } else {
                    TRUE
                }
            }
            Formula::Atom(p) => self.intern(Nnf::Lit(p.index, positive)),
            Formula::Not(a) => self.nnf_of(a, !positive),
            Formula::And(a, b) => {
                let (x, y) = (self.nnf_of(a, positive), self.nnf_of(b, positive));
                self.junction(vec![x, y], positive)
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.nnf_of(a, positive), self.nnf_of(b, positive));
                self.junction(vec![x, y], !positive)
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.nnf_of(a, !positive), self.nnf_of(b, positive));
                self.junction(vec![x, y], !positive)
            }
            Formula::Next(a) => {
                let x = self.nnf_of(a, positive);
                self.intern(if positive { Nnf::Next(x) } else { Nnf::WeakNext(x) })
            }
            Formula::WeakNext(a) => {
                let x = self.nnf_of(a, positive);
                self.intern(if positive { Nnf::WeakNext(x) } else { Nnf::Next(x) })
            }
            Formula::Until(a, b) => {
                let (x, y) = (self.nnf_of(a, positive), self.nnf_of(b, positive));
                self.intern(if positive { Nnf::Until(x, y) } else { Nnf::Release(x, y) })
            }
            Formula::Eventually(a) => {
                let x = self.nnf_of(a, positive);
                self.intern(if positive { Nnf::Until(TRUE, x) } else { Nnf::Release(FALSE, x) })
            }
            Formula::Always(a) => {
                let x = self.nnf_of(a, positive);
                self.intern(if positive { Nnf::Release(FALSE, x) } else { Nnf::Until(TRUE, x) })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Obligation {
    body: NodeId,
    strong: bool,
}

/// Propositional combination of current-instant literals and obligations.
#[derive(Clone, Debug)]
enum Prop {
    Const(bool),
    Lit(usize, bool),
    Obl(Obligation),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    fn junction(items: Vec<Prop>, conj: bool) -> Prop {
        let mut out = Vec::with_capacity(items.len());
        for p in items {
            match p {
                Prop::Const(c) if c == conj => {}
                Prop::Const(c) => return Prop::Const(c),
                Prop::And(xs) if conj => out.extend(xs),
                Prop::Or(xs) if !conj => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Prop::Const(conj),
            1 => out.pop().unwrap(),
            _ if conj => Prop::And(out),
            _ => Prop::Or(out),
        }
    }

    fn min_var(&self) -> Option<usize> {
        match self {
            Prop::Lit(v, _) => Some(*v),
            Prop::And(xs) | Prop::Or(xs) => xs.iter().filter_map(Prop::min_var).min(),
            _ => None,
        }
    }

    fn cofactor(&self, var: usize, val: bool) -> Prop {
        match self {
            Prop::Lit(v, pol) if *v == var => Prop::Const(*pol == val),
            Prop::And(xs) => Prop::junction(xs.iter().map(|x| x.cofactor(var, val)).collect(), true),
            Prop::Or(xs) => Prop::junction(xs.iter().map(|x| x.cofactor(var, val)).collect(), false),
            other => other.clone(),
        }
    }
}

type Clause = Vec<Obligation>;

/// Canonical DNF over obligations: sorted clauses, no clause subsumed by another.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct StateFormula(Vec<Clause>);

struct Builder {
    arena: NnfArena,
    expansions: HashMap<NodeId, Prop>,
}

impl Builder {
    fn expand(&mut self, id: NodeId) -> Prop {
        if let Some(p) = self.expansions.get(&id) {
            return p.clone();
        }
        let node = self.arena.nodes[id as usize].clone();
        let p = match node {
            Nnf::True => Prop::Const(true),
            Nnf::False => Prop::Const(false),
            Nnf::Lit(v, pol) => Prop::Lit(v, pol),
            Nnf::And(xs) => Prop::junction(xs.into_iter().map(|x| self.expand(x)).collect(), true),
            Nnf::Or(xs) => Prop::junction(xs.into_iter().map(|x| self.expand(x)).collect(), false),
            Nnf::Next(x) => Prop::Obl(Obligation { body: x, strong: true }),
            Nnf::WeakNext(x) => Prop::Obl(Obligation { body: x, strong: false }),
            // a U b  ==  b | (a & X(a U b))
            Nnf::Until(a, b) => {
                let (ea, eb) = (self.expand(a), self.expand(b));
                let again = Prop::Obl(Obligation { body: id, strong: true });
                Prop::junction(vec![eb, Prop::junction(vec![ea, again], true)], false)
            }
            // a R b  ==  b & (a | WX(a R b))
            Nnf::Release(a, b) => {
                let (ea, eb) = (self.expand(a), self.expand(b));
                let again = Prop::Obl(Obligation { body: id, strong: false });
                Prop::junction(vec![eb, Prop::junction(vec![ea, again], false)], true)
            }
        };
        self.expansions.insert(id, p.clone());
        p
    }

    /// One-step unfolding of a state: every obligation becomes the
    /// expansion of its body at the instant about to be read.
    fn successor_prop(&mut self, state: &StateFormula) -> Prop {
        let clauses = state
            .0
            .iter()
            .map(|c| Prop::junction(c.iter().map(|o| self.expand(o.body)).collect(), true))
            .collect();
        Prop::junction(clauses, false)
    }

    fn normalize(&self, p: &Prop) -> StateFormula {
        let mut clauses: BTreeSet<Clause> = BTreeSet::new();
        for clause in dnf(p) {
            if let Some(c) = self.simplify_clause(clause) {
                clauses.insert(c);
            }
        }
        let all: Vec<Clause> = clauses.into_iter().collect();
        let kept = all
            .iter()
            .filter(|c| {
                !all.iter()
                    .any(|d| d.len() < c.len() && d.iter().all(|o| c.binary_search(o).is_ok()))
            })
            .cloned()
            .collect();
        StateFormula(kept)
    }

    fn simplify_clause(&self, mut c: Clause) -> Option<Clause> {
        c.sort_unstable();
        c.dedup();
        if c.iter().any(|o| o.strong && o.body == FALSE) {
            return None;
        }
        let strong: BTreeSet<NodeId> = c.iter().filter(|o| o.strong).map(|o| o.body).collect();
        c.retain(|o| o.strong || (o.body != TRUE && !strong.contains(&o.body)));
        Some(c)
    }
}

fn dnf(p: &Prop) -> Vec<Clause> {
    match p {
        Prop::Const(true) => vec![vec![]],
        Prop::Const(false) => vec![],
        Prop::Obl(o) => vec![vec![*o]],
        Prop::Or(xs) => xs.iter().flat_map(dnf).collect(),
        Prop::And(xs) => {
            let mut acc: Vec<Clause> = vec![vec![]];
            for x in xs {
                let part = dnf(x);
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut c = a.clone();
                        c.extend_from_slice(b);
                        next.push(c);
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Prop::Lit(..) => unreachable!("literals are eliminated before normalization"),
    }
}

fn is_final(s: &StateFormula) -> bool {
    s.0.iter().any(|c| c.iter().all(|o| !o.strong))
}

/// Result of the raw construction: dense successor table over minterms of
/// `support`, states numbered in breadth-first discovery order.
pub(super) struct RawDfa {
    pub support: Vec<usize>,
    pub finals: Vec<bool>,
    pub table: Vec<u32>,
}

pub(super) fn construct(f: &Formula, budget: &Budget) -> Result<RawDfa, DfaError> {
    let support: Vec<usize> = f.atoms().into_iter().collect();
    if support.len() > MAX_SUPPORT {
        return Err(DfaError::SupportTooLarge {
            atoms: support.len(),
            max: MAX_SUPPORT,
        });
    }
    let pos: HashMap<usize, usize> = support.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let width = 1usize << support.len();

    let mut b = Builder {
        arena: NnfArena::new(),
        expansions: HashMap::new(),
    };
    let root = b.arena.nnf_of(f, true);
    let initial = StateFormula(vec![vec![Obligation { body: root, strong: true }]]);

    let mut ids: HashMap<StateFormula, u32> = HashMap::new();
    let mut states: Vec<StateFormula> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(initial.clone(), 0);
    states.push(initial);
    queue.push_back(0usize);
    let mut table: Vec<u32> = Vec::new();

    while let Some(q) = queue.pop_front() {
        budget.check_time().map_err(DfaError::Resource)?;
        let prop = b.successor_prop(&states[q].clone());
        let mut row = vec![u32::MAX; width];
        // Shannon expansion on the literals, smallest fluent first.
        let mut stack = vec![(prop, 0usize, 0usize)];
        let mut leaves = Vec::new();
        while let Some((p, mask, vals)) = stack.pop() {
            match p.min_var() {
                Some(v) => {
                    let bit = 1 << pos[&v];
                    stack.push((p.cofactor(v, true), mask | bit, vals | bit));
                    stack.push((p.cofactor(v, false), mask | bit, vals));
                }
                None => leaves.push((b.normalize(&p), mask, vals)),
            }
        }
        for (succ, mask, vals) in leaves {
            let id = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    budget
                        .check_states(states.len() + 1, "DFA construction")
                        .map_err(DfaError::Resource)?;
                    ids.insert(succ.clone(), id);
                    states.push(succ);
                    queue.push_back(id as usize);
                    id
                }
            };
            for (m, slot) in row.iter_mut().enumerate() {
                if m & mask == vals {
                    *slot = id;
                }
            }
        }
        debug_assert!(row.iter().all(|&s| s != u32::MAX));
        table.extend(row);
    }

    Ok(RawDfa {
        support,
        finals: states.iter().map(is_final).collect(),
        table,
    })
}

use std::collections::BTreeMap;

use crate::ltlf::{Assignment, FluentSet};

/// Conjunction of literals: `pos` fluents true and `neg` fluents false.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub pos: Assignment,
    pub neg: Assignment,
}

impl Cube {
    pub const TOP: Cube = Cube {
        pos: Assignment::EMPTY,
        neg: Assignment::EMPTY,
    };

    pub fn matches(&self, a: Assignment) -> bool {
        a.0 & self.pos.0 == self.pos.0 && a.0 & self.neg.0 == 0
    }

    fn literals(&self) -> u128 {
        self.pos.0 | self.neg.0
    }

    fn to_text(self, fluents: &FluentSet) -> String {
        let lits: Vec<String> = (0..fluents.len())
            .filter_map(|i| {
                if self.pos.contains(i) {
                    Some(fluents.name(i).to_string())
                } else if self.neg.contains(i) {
                    Some(format!("!{}", fluents.name(i)))
                } else {
                    None
                }
            })
            .collect();
        if lits.is_empty() {
            "true".to_string()
        } else {
            lits.join(" & ")
        }
    }
}

/// Propositional guard in disjunctive normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Guard {
    pub cubes: Vec<Cube>,
}

impl Guard {
    pub fn matches(&self, a: Assignment) -> bool {
        self.cubes.iter().any(|c| c.matches(a))
    }

    pub fn is_true(&self) -> bool {
        self.cubes.iter().any(|c| c.literals() == 0)
    }

    /// Text in the formula grammar, e.g. `p & !q | r`.
    pub fn to_text(&self, fluents: &FluentSet) -> String {
        if self.cubes.is_empty() {
            return "false".to_string();
        }
        if self.cubes.len() == 1 {
            return self.cubes[0].to_text(fluents);
        }
        self.cubes
            .iter()
            .map(|c| {
                if c.literals().count_ones() > 1 {
                    format!("({})", c.to_text(fluents))
                } else {
                    c.to_text(fluents)
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// Merges cubes that differ only in the polarity of a single fluent.
fn merge_cubes(mut cubes: Vec<Cube>) -> Vec<Cube> {
    loop {
        let mut merged = None;
        'search: for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                let (a, b) = (cubes[i], cubes[j]);
                if a.literals() != b.literals() {
                    continue;
                }
                let diff = a.pos.0 ^ b.pos.0;
                if diff.count_ones() == 1 {
                    merged = Some((
                        i,
                        j,
                        Cube {
                            pos: Assignment(a.pos.0 & !diff),
                            neg: Assignment(a.neg.0 & !diff),
                        },
                    ));
                    break 'search;
                }
            }
        }
        match merged {
            Some((i, j, c)) => {
                cubes.remove(j);
                cubes[i] = c;
            }
            None => break,
        }
    }
    cubes.sort();
    cubes
}

/// Guard list of one state, from its row of the minterm table. The result
/// is exclusive and exhaustive by construction (leaves of a decision tree).
pub(super) fn guards_for_row(row: &[u32], support: &[usize]) -> Vec<(Guard, usize)> {
    let mut leaves: Vec<(Cube, u32)> = Vec::new();
    let mut stack = vec![(0usize, 0usize, Cube::TOP, 0usize)];
    while let Some((mask, vals, cube, var)) = stack.pop() {
        let mut targets = row
            .iter()
            .enumerate()
            .filter(|(m, _)| m & mask == vals)
            .map(|(_, &t)| t);
        let first = targets.next().expect("nonempty subcube");
        if targets.all(|t| t == first) {
            leaves.push((cube, first));
            continue;
        }
        let bit = 1 << var;
        let fluent = support[var];
        stack.push((
            mask | bit,
            vals | bit,
            Cube {
                pos: cube.pos.with(fluent),
                neg: cube.neg,
            },
            var + 1,
        ));
        stack.push((
            mask | bit,
            vals,
            Cube {
                pos: cube.pos,
                neg: cube.neg.with(fluent),
            },
            var + 1,
        ));
    }
    let mut by_target: BTreeMap<u32, Vec<Cube>> = BTreeMap::new();
    for (c, t) in leaves {
        by_target.entry(t).or_default().push(c);
    }
    by_target
        .into_iter()
        .map(|(t, cubes)| {
            (
                Guard {
                    cubes: merge_cubes(cubes),
                },
                t as usize,
            )
        })
        .collect()
}

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::LtlfError;

/// Largest number of fluents a [`FluentSet`] may declare. Assignments are
/// stored as a single `u128` bitset.
pub const MAX_FLUENTS: usize = 128;

/// A declared fluent: its name and its ordinal within the owning set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fluent {
    pub index: usize,
    pub name: Arc<str>,
}

impl fmt::Display for Fluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug)]
struct Inner {
    names: Vec<Arc<str>>,
    index: HashMap<Arc<str>, usize>,
}

/// An ordered set of uniquely named fluents. Cheap to clone.
#[derive(Clone, Debug)]
pub struct FluentSet(Arc<Inner>);

pub(crate) fn is_identifier(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FluentSet {
    pub fn new<I, S>(names: I) -> Result<Self, LtlfError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut list: Vec<Arc<str>> = Vec::new();
        let mut index = HashMap::new();
        for name in names {
            let name = name.as_ref();
            if !is_identifier(name) || super::parser::is_keyword(name) {
                return Err(LtlfError::InvalidFluentName(name.to_string()));
            }
            let name: Arc<str> = Arc::from(name);
            if index.insert(name.clone(), list.len()).is_some() {
                return Err(LtlfError::DuplicateFluent(name.to_string()));
            }
            list.push(name);
        }
        if list.len() > MAX_FLUENTS {
            return Err(LtlfError::TooManyFluents(list.len()));
        }
        Ok(FluentSet(Arc::new(Inner { names: list, index })))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<Fluent> {
        self.0.index.get(name).map(|&index| Fluent {
            index,
            name: self.0.names[index].clone(),
        })
    }

    pub fn fluent(&self, index: usize) -> Fluent {
        Fluent {
            index,
            name: self.0.names[index].clone(),
        }
    }

    pub fn name(&self, index: usize) -> &str {
        &self.0.names[index]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.names.iter().map(|n| &**n)
    }

    pub fn iter(&self) -> impl Iterator<Item = Fluent> + '_ {
        (0..self.len()).map(move |i| self.fluent(i))
    }

    /// Builds the assignment holding exactly the named fluents.
    pub fn assignment<I, S>(&self, names: I) -> Result<Assignment, LtlfError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut a = Assignment::EMPTY;
        for name in names {
            let name = name.as_ref();
            let idx = self
                .0
                .index
                .get(name)
                .ok_or_else(|| LtlfError::UndeclaredAtom {
                    name: name.to_string(),
                    position: 0,
                })?;
            a.insert(*idx);
        }
        Ok(a)
    }

    /// Names of the fluents true in `a`, in declaration order.
    pub fn true_names(&self, a: Assignment) -> Vec<String> {
        a.iter()
            .filter(|&i| i < self.len())
            .map(|i| self.name(i).to_string())
            .collect()
    }

    /// Every assignment over this set; only sensible for small sets.
    pub fn all_assignments(&self) -> impl Iterator<Item = Assignment> {
        let n = self.len();
        assert!(n < 64, "refusing to enumerate 2^{n} assignments");
        (0..(1u64 << n)).map(|bits| Assignment(bits as u128))
    }

    pub fn format_assignment(&self, a: Assignment) -> String {
        format!("{{{}}}", self.true_names(a).join(","))
    }
}

impl PartialEq for FluentSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for FluentSet {}

/// A subset of a fluent set, stored as a bitset over fluent ordinals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub u128);

impl Assignment {
    pub const EMPTY: Assignment = Assignment(0);

    pub fn contains(self, index: usize) -> bool {
        (self.0 >> index) & 1 == 1
    }

    pub fn insert(&mut self, index: usize) {
        self.0 |= 1u128 << index;
    }

    pub fn remove(&mut self, index: usize) {
        self.0 &= !(1u128 << index);
    }

    pub fn with(mut self, index: usize) -> Self {
        self.insert(index);
        self
    }

    pub fn without(mut self, index: usize) -> Self {
        self.remove(index);
        self
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..128).filter(move |&i| self.contains(i))
    }
}

/// A finite, nonempty trace of assignments over a fluent set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTrace {
    fluents: FluentSet,
    instants: Vec<Assignment>,
}

impl FiniteTrace {
    pub fn new(fluents: FluentSet, instants: Vec<Assignment>) -> Result<Self, LtlfError> {
        if instants.is_empty() {
            return Err(LtlfError::EmptyTrace);
        }
        let mask = if fluents.len() == 128 {
            u128::MAX
        } else {
            (1u128 << fluents.len()) - 1
        };
        if instants.iter().any(|a| a.0 & !mask != 0) {
            return Err(LtlfError::AssignmentOutOfRange);
        }
        Ok(FiniteTrace { fluents, instants })
    }

    pub fn fluents(&self) -> &FluentSet {
        &self.fluents
    }

    pub fn instants(&self) -> &[Assignment] {
        &self.instants
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the last instant.
    pub fn last(&self) -> usize {
        self.instants.len() - 1
    }

    pub fn prefix(&self, last: usize) -> FiniteTrace {
        FiniteTrace {
            fluents: self.fluents.clone(),
            instants: self.instants[..=last].to_vec(),
        }
    }

    /// Every trace over `fluents` whose length lies in `1..=max_len`.
    pub fn enumerate(fluents: &FluentSet, max_len: usize) -> Vec<FiniteTrace> {
        let letters: Vec<Assignment> = fluents.all_assignments().collect();
        let mut out = Vec::new();
        let mut layer: Vec<Vec<Assignment>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * letters.len());
            for prefix in &layer {
                for &l in &letters {
                    let mut p = prefix.clone();
                    p.push(l);
                    next.push(p);
                }
            }
            out.extend(next.iter().map(|inst| FiniteTrace {
                fluents: fluents.clone(),
                instants: inst.clone(),
            }));
            layer = next;
        }
        out
    }
}

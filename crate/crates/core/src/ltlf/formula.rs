use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use super::Fluent;

/// LTLf abstract syntax. Children are reference counted so that common
/// subterms are shared instead of copied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Fluent),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Next(Arc<Formula>),
    WeakNext(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
    Eventually(Arc<Formula>),
    Always(Arc<Formula>),
}

impl Formula {
    pub fn atom(f: Fluent) -> Self {
        Formula::Atom(f)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Arc::new(f))
    }

    pub fn weak_next(f: Formula) -> Self {
        Formula::WeakNext(Arc::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Arc::new(a), Arc::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Arc::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Arc::new(f))
    }

    /// Conjunction of all items; `True` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::WeakNext(f)
            | Formula::Eventually(f)
            | Formula::Always(f) => vec![f],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b) => vec![a, b],
        }
    }

    /// Number of distinct subformulas.
    pub fn size(&self) -> usize {
        fn walk<'a>(f: &'a Formula, seen: &mut HashSet<&'a Formula>) {
            if seen.insert(f) {
                for c in f.children() {
                    walk(c, seen);
                }
            }
        }
        let mut seen = HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }

    /// Fluent ordinals mentioned by the formula.
    pub fn atoms(&self) -> BTreeSet<usize> {
        fn walk(f: &Formula, out: &mut BTreeSet<usize>) {
            if let Formula::Atom(fl) = f {
                out.insert(fl.index);
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    /// Rewrites derived operators into `True, False, Atom, Not, And, Next, Until`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.desugar()),
                Formula::not(b.desugar()),
            )),
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.desugar(), Formula::not(b.desugar())))
            }
            Formula::Next(f) => Formula::next(f.desugar()),
            Formula::WeakNext(f) => Formula::not(Formula::next(Formula::not(f.desugar()))),
            Formula::Until(a, b) => Formula::until(a.desugar(), b.desugar()),
            Formula::Eventually(f) => Formula::until(Formula::True, f.desugar()),
            Formula::Always(f) => Formula::not(Formula::until(
                Formula::True,
                Formula::not(f.desugar()),
            )),
        }
    }

    pub fn is_core(&self) -> bool {
        let here = matches!(
            self,
            Formula::True
                | Formula::False
                | Formula::Atom(_)
                | Formula::Not(_)
                | Formula::And(..)
                | Formula::Next(_)
                | Formula::Until(..)
        );
        here && self.children().into_iter().all(Formula::is_core)
    }

    pub fn is_temporal(&self) -> bool {
        matches!(
            self,
            Formula::Next(_)
                | Formula::WeakNext(_)
                | Formula::Until(..)
                | Formula::Eventually(_)
                | Formula::Always(_)
        ) || self.children().into_iter().any(Formula::is_temporal)
    }
}

/// Fully parenthesized canonical text, accepted back by the parser.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Not(a) => write!(f, "(!{a})"),
            Formula::Next(a) => write!(f, "(X {a})"),
            Formula::WeakNext(a) => write!(f, "(WX {a})"),
            Formula::Eventually(a) => write!(f, "(F {a})"),
            Formula::Always(a) => write!(f, "(G {a})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::FluentSet;

    fn p() -> Formula {
        Formula::atom(FluentSet::new(["p"]).unwrap().fluent(0))
    }

    #[test]
    fn size_counts_distinct_subformulas() {
        assert_eq!(p().size(), 1);
        assert_eq!(Formula::until(p(), p()).size(), 2);
        assert_eq!(Formula::and(p(), Formula::not(p())).size(), 3);
    }

    #[test]
    fn desugar_examples() {
        assert_eq!(
            Formula::eventually(p()).desugar(),
            Formula::until(Formula::True, p())
        );
        assert_eq!(
            Formula::weak_next(p()).desugar(),
            Formula::not(Formula::next(Formula::not(p())))
        );
        assert_eq!(p().desugar(), p());
        assert!(Formula::always(Formula::or(p(), Formula::True))
            .desugar()
            .is_core());
    }

    #[test]
    fn printing_is_fully_parenthesized() {
        let f = Formula::until(p(), Formula::and(Formula::True, Formula::next(p())));
        assert_eq!(f.to_string(), "(p U (true & (X p)))");
    }
}

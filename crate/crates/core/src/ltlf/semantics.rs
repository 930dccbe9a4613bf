use super::{Assignment, FiniteTrace, Formula, LtlfError};

/// Truth of `f` at instant `i` of `trace`. `evaluate(f, t, 0)` is `t ⊨ f`.
pub fn evaluate(f: &Formula, trace: &FiniteTrace, i: usize) -> Result<bool, LtlfError> {
    if i > trace.last() {
        return Err(LtlfError::InstantOutOfRange {
            instant: i,
            len: trace.len(),
        });
    }
    Ok(holds(f, trace.instants(), i))
}

/// Inductive satisfaction relation. Only instants `>= i` are inspected.
pub(crate) fn holds(f: &Formula, pi: &[Assignment], i: usize) -> bool {
    let last = pi.len() - 1;
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => pi[i].contains(p.index),
        Formula::Not(a) => !holds(a, pi, i),
        Formula::And(a, b) => holds(a, pi, i) && holds(b, pi, i),
        Formula::Or(a, b) => holds(a, pi, i) || holds(b, pi, i),
        Formula::Implies(a, b) => !holds(a, pi, i) || holds(b, pi, i),
        Formula::Next(a) => i < last && holds(a, pi, i + 1),
        Formula::WeakNext(a) => i == last || holds(a, pi, i + 1),
        Formula::Until(a, b) => {
            for j in i..=last {
                if holds(b, pi, j) {
                    return true;
                }
                if !holds(a, pi, j) {
                    return false;
                }
            }
            false
        }
        Formula::Eventually(a) => (i..=last).any(|j| holds(a, pi, j)),
        Formula::Always(a) => (i..=last).all(|j| holds(a, pi, j)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::{parse, FluentSet};

    fn setup() -> (FluentSet, Assignment, Assignment, Assignment) {
        let fs = FluentSet::new(["p", "q"]).unwrap();
        let none = Assignment::EMPTY;
        let p = fs.assignment(["p"]).unwrap();
        let q = fs.assignment(["q"]).unwrap();
        (fs, none, p, q)
    }

    fn eval(text: &str, fs: &FluentSet, trace: Vec<Assignment>, i: usize) -> bool {
        let f = parse(text, fs).unwrap();
        evaluate(&f, &FiniteTrace::new(fs.clone(), trace).unwrap(), i).unwrap()
    }

    #[test]
    fn spec_examples() {
        let (fs, _, p, q) = setup();
        assert!(eval("p", &fs, vec![p], 0));
        assert!(!eval("X p", &fs, vec![p], 0));
        assert!(eval("p U q", &fs, vec![p, p, q], 0));
    }

    #[test]
    fn until_needs_left_before_right() {
        let (fs, none, p, q) = setup();
        assert!(!eval("p U q", &fs, vec![p, none, q], 0));
        assert!(!eval("p U q", &fs, vec![p, p], 0));
        assert!(eval("p U q", &fs, vec![none, q], 1));
    }

    #[test]
    fn weak_next_at_last_instant() {
        let (fs, none, p, _) = setup();
        assert!(eval("WX false", &fs, vec![none], 0));
        assert!(eval("WX p", &fs, vec![none, none], 1));
        assert!(!eval("WX p", &fs, vec![none, none], 0));
        assert!(eval("G p", &fs, vec![none, p], 1));
        assert!(eval("F p", &fs, vec![p, none], 0));
        assert!(!eval("F p", &fs, vec![p, none], 1));
    }

    #[test]
    fn instant_out_of_range() {
        let (fs, none, _, _) = setup();
        let t = FiniteTrace::new(fs.clone(), vec![none]).unwrap();
        assert!(matches!(
            evaluate(&Formula::True, &t, 1),
            Err(LtlfError::InstantOutOfRange { instant: 1, len: 1 })
        ));
    }
}

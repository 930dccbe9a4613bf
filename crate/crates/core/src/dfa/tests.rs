use super::*;
use crate::ltlf::{evaluate, parse};

fn fs(names: &[&str]) -> FluentSet {
    FluentSet::new(names.iter().copied()).unwrap()
}

fn trace(f: &FluentSet, steps: &[&[&str]]) -> FiniteTrace {
    FiniteTrace::new(
        f.clone(),
        steps.iter().map(|s| f.assignment(s.iter()).unwrap()).collect(),
    )
    .unwrap()
}

fn assert_matches_oracle(text: &str, f: &FluentSet, max_len: usize) -> Dfa {
    let phi = parse(text, f).unwrap();
    let d = compile(&phi, f).unwrap();
    for t in FiniteTrace::enumerate(f, max_len) {
        assert_eq!(
            d.accepts(&t).unwrap(),
            evaluate(&phi, &t, 0).unwrap(),
            "{text} on {:?}",
            t.instants()
        );
    }
    d
}

#[test]
fn eventually_is_two_states() {
    let f = fs(&["p"]);
    let d = assert_matches_oracle("F p", &f, 4);
    assert_eq!(d.num_states(), 2);
    let q0 = d.initial();
    assert!(!d.is_final(q0));
    let p = f.assignment(["p"]).unwrap();
    let fin = d.step(q0, p).unwrap();
    assert!(d.is_final(fin));
    assert_eq!(d.step(q0, Assignment::EMPTY).unwrap(), q0);
    assert_eq!(d.step(fin, Assignment::EMPTY).unwrap(), fin);
    assert_eq!(d.step(fin, p).unwrap(), fin);
    assert!(d.accepts(&trace(&f, &[&[], &["p"]])).unwrap());
    assert!(!d.accepts(&trace(&f, &[&[], &[]])).unwrap());
}

#[test]
fn true_is_one_state() {
    let f = fs(&["p"]);
    let d = assert_matches_oracle("true", &f, 3);
    assert_eq!(d.num_states(), 1);
    assert!(d.is_final(0));
    for a in f.all_assignments() {
        assert_eq!(d.step(0, a).unwrap(), 0);
    }
}

#[test]
fn tautology_minimizes_to_true() {
    let f = fs(&["p"]);
    let d = assert_matches_oracle("p | !p", &f, 4);
    assert_eq!(d.num_states(), 1);
}

#[test]
fn conjunction_with_next() {
    let f = fs(&["p"]);
    let d = assert_matches_oracle("p & X p", &f, 4);
    assert!(d.accepts(&trace(&f, &[&["p"], &["p"]])).unwrap());
    assert!(!d.accepts(&trace(&f, &[&["p"]])).unwrap());
    assert!(!d.accepts(&trace(&f, &[&[], &["p"]])).unwrap());
}

#[test]
fn assorted_formulas_match_semantics() {
    let f = fs(&["p", "q"]);
    for text in [
        "false",
        "p U q",
        "G p",
        "G F p",
        "F G p",
        "X X p",
        "WX p",
        "WX WX false",
        "!(p U q)",
        "G (p -> X q)",
        "G (p -> WX q)",
        "(p U q) U p",
        "F (p & X (q & X p))",
        "p -> F q",
        "!X true",
    ] {
        assert_matches_oracle(text, &f, 4);
    }
}

#[test]
fn minimize_is_idempotent_and_distinguishes_states() {
    let f = fs(&["p", "q"]);
    for text in ["F p", "p U q", "G (p -> X q)", "F (p & X q)"] {
        let d = compile(&parse(text, &f).unwrap(), &f).unwrap();
        let again = minimize(&d);
        assert_eq!(again.num_states(), d.num_states(), "{text}");
        // pairwise distinguishable by some word of length <= n
        let traces = FiniteTrace::enumerate(&f, d.num_states());
        for a in 0..d.num_states() {
            for b in a + 1..d.num_states() {
                let split = traces.iter().any(|t| {
                    let end = |mut q: usize| {
                        for &x in t.instants() {
                            q = d.successor(q, x);
                        }
                        d.is_final(q)
                    };
                    end(a) != end(b)
                }) || d.is_final(a) != d.is_final(b);
                assert!(split, "{text}: states {a} and {b} equivalent");
            }
        }
    }
}

#[test]
fn guards_partition_every_state() {
    let f = fs(&["p", "q", "r"]);
    let d = compile(&parse("(p U q) & G (r -> X !p)", &f).unwrap(), &f).unwrap();
    for q in 0..d.num_states() {
        for a in f.all_assignments() {
            let hits = d.guards(q).iter().filter(|(g, _)| g.matches(a)).count();
            assert_eq!(hits, 1);
            assert_eq!(d.step(q, a).unwrap(), d.successor(q, a));
        }
    }
}

#[test]
fn every_state_reachable() {
    let f = fs(&["p", "q"]);
    let d = compile(&parse("G (p -> X X q)", &f).unwrap(), &f).unwrap();
    let depths = d.reachable_depths();
    assert!(depths.iter().all(|x| x.is_some_and(|k| k <= d.num_states())));
}

#[test]
fn state_cap_is_enforced() {
    let f = fs(&["p"]);
    let phi = parse("X X X X p", &f).unwrap();
    let err = compile_with(&phi, &f, &Budget::default().with_state_cap(3)).unwrap_err();
    assert_eq!(
        err,
        DfaError::Resource(ResourceError::StateCap {
            what: "DFA construction",
            cap: 3
        })
    );
}

#[test]
fn fluent_mismatch_is_rejected() {
    let f = fs(&["p"]);
    let g = fs(&["q"]);
    let d = compile(&Formula::True, &f).unwrap();
    let t = FiniteTrace::new(g, vec![Assignment::EMPTY]).unwrap();
    assert_eq!(d.accepts(&t), Err(DfaError::FluentMismatch));
}

#[test]
fn json_and_dot_exports() {
    let f = fs(&["p"]);
    let d = compile(&parse("F p", &f).unwrap(), &f).unwrap();
    let j = serde_json::to_value(d.to_json()).unwrap();
    assert_eq!(j["fluents"], serde_json::json!(["p"]));
    assert_eq!(j["initial"], 0);
    assert_eq!(j["finals"], serde_json::json!([1]));
    let tr = j["transitions"].as_array().unwrap();
    assert_eq!(tr.len(), 3);
    assert_eq!(tr[0], serde_json::json!({"from": 0, "guard": "!p", "to": 0}));
    assert_eq!(tr[1], serde_json::json!({"from": 0, "guard": "p", "to": 1}));
    assert_eq!(tr[2], serde_json::json!({"from": 1, "guard": "true", "to": 1}));
    let dot = d.to_dot();
    assert!(dot.contains("q1 [shape=doublecircle]"));
    assert!(dot.contains("q0 -> q1 [label=\"p\"]"));
}

#[test]
fn guard_text_reparses_to_same_function() {
    let f = fs(&["p", "q", "r"]);
    let d = compile(&parse("(p U q) | X r", &f).unwrap(), &f).unwrap();
    for q in 0..d.num_states() {
        for (g, _) in d.guards(q) {
            let as_formula = parse(&g.to_text(&f), &f).unwrap();
            for a in f.all_assignments() {
                let t = FiniteTrace::new(f.clone(), vec![a]).unwrap();
                assert_eq!(evaluate(&as_formula, &t, 0).unwrap(), g.matches(a));
            }
        }
    }
}

use std::sync::Arc;

use super::*;
use crate::branch::{BranchFormula, Context};
use crate::search::{decide, SearchConfig};
use crate::syntax::{parse_expression, parse_problem};

fn branch(sig: &str, formulas: &[&str]) -> Branch {
    let ctx = Arc::new(Context::new(&parse_problem(sig).unwrap()));
    let mut b = Branch::empty(ctx);
    for f in formulas {
        let f = b.parse_formula(f).unwrap();
        b.add(f);
    }
    b
}

fn sat_branch(src: &str) -> (Problem, Branch) {
    let p = parse_problem(src).unwrap();
    let b = decide(&p, &SearchConfig::default()).verdict.branch().expect("sat").clone();
    (p, b)
}

fn edges_of(b: &Branch) -> Vec<String> {
    b.formulas()
        .iter()
        .filter(|f| matches!(f, BranchFormula::Edge(..)))
        .map(|f| b.show(f))
        .collect()
}

fn interp(states: usize, props: &[(&str, &[State])], roles: &[(&str, &[(State, State)])]) -> Interpretation {
    Interpretation {
        states: (0..states).collect(),
        nominals: BTreeMap::new(),
        props: props.iter().map(|(p, s)| (p.to_string(), s.iter().copied().collect())).collect(),
        roles: roles.iter().map(|(r, e)| (r.to_string(), e.iter().copied().collect())).collect(),
    }
}

fn ev(i: &Interpretation, src: &str, s: State) -> bool {
    eval(i, &parse_expression(src).unwrap(), s).unwrap()
}

#[test]
fn blocked_loop_completes_with_self_edge() {
    let sig = "at x: A0 <r>0 p; r(x, y)";
    let b = branch(sig, &["at x: A0 <r>0 p", "at x: <r>0 p", "r(x, y)", "at y: p", "at y: <r>0 p"]);
    let done = complete_to_pre_evident(&b).unwrap();
    assert_eq!(edges_of(&done), ["r(x, y)", "r(y, y)"]);
    assert_eq!(phi(&done), 0);
}

#[test]
fn evident_branch_is_unchanged() {
    let b = branch("at x: <r>0 p; r(x, y)", &["at x: <r>0 p", "r(x, y)", "at y: p"]);
    assert_eq!(phi(&b), 0);
    assert_eq!(complete_to_pre_evident(&b).unwrap().formulas(), b.formulas());
}

#[test]
fn non_quasi_evident_input_is_rejected() {
    let b = branch("at x: <r>0 p & q", &["at x: <r>0 p & q"]);
    assert!(matches!(complete_to_pre_evident(&b), Err(ModelError::NotQuasiEvident(_))));
}

#[test]
fn global_diamond_example_certifies_with_four_states() {
    let (p, b) = sat_branch("at x: A0 (<r>0 p & <r>0 q & <s>0 q)");
    let cert = certify(&b).unwrap();
    assert_eq!(cert.model.states.len(), 4);
    // copies go from the blocked classes to the successors of x and y
    assert!(edges_of(&cert.completed).len() > edges_of(&b).len());
    check_model_detailed(&cert.model, &p).unwrap();
}

#[test]
fn equal_nominals_share_a_state() {
    let b = branch("at x: p; x = y", &["at x: p", "x = y"]);
    let cert = certify(&b).unwrap();
    assert_eq!(cert.model.states, [0]);
    assert_eq!(cert.model.nominals["x"], 0);
    assert_eq!(cert.model.nominals["y"], 0);
    assert!(cert.model.props["p"].contains(&0));
}

#[test]
fn reflexive_role_gets_loop() {
    let b = branch("refl r; at x: p", &["at x: p"]);
    let g = evidence_closure(&b);
    let x = b.context().nominal_id("x").unwrap();
    let r = b.context().role_id("r").unwrap();
    assert!(g.contains(r, x, x));
}

#[test]
fn basic_closure_adds_nothing() {
    let b = branch("at x: p; r(x, y); s(y, x)", &["r(x, y)", "s(y, x)"]);
    let g = evidence_closure(&b);
    let ctx = b.context();
    let total: usize = ctx.roles().map(|r| g.edges(r).count()).sum();
    assert_eq!(total, 2);
}

#[test]
fn role_hierarchy_example_closure() {
    let (p, b) = sat_branch("r <= s; refl r; trans s; at x: [s]0 <r>0 p; at x: <s>0 q");
    let cert = certify(&b).unwrap();
    let ctx = cert.completed.context();
    let (r, s) = (ctx.role_id("r").unwrap(), ctx.role_id("s").unwrap());
    for x in cert.completed.classes() {
        assert!(cert.closure.contains(r, x, x));
    }
    for (x, y) in cert.closure.edges(r) {
        assert!(cert.closure.contains(s, x, y));
    }
    for (x, y) in cert.closure.edges(s) {
        for z in cert.closure.successors(y, s) {
            assert!(cert.closure.contains(s, x, z));
        }
    }
    check_model_detailed(&cert.model, &p).unwrap();
}

#[test]
fn eval_single_state() {
    let i = interp(1, &[("p", &[0])], &[("r", &[])]);
    assert!(!ev(&i, "<r>0 p", 0));
    assert!(ev(&i, "[r]5 p", 0));
    assert!(ev(&i, "E0 p", 0));
}

#[test]
fn eval_counts_successors() {
    let i = interp(2, &[("p", &[0, 1])], &[("r", &[(0, 0), (0, 1)])]);
    assert!(ev(&i, "<r>1 p", 0));
    assert!(!ev(&i, "<r>2 p", 0));
}

#[test]
fn eval_forall_exception() {
    let i = interp(2, &[("p", &[0])], &[]);
    assert!(!ev(&i, "A0 p", 0));
    assert!(ev(&i, "A1 p", 0));
}

#[test]
fn eval_unbound_name() {
    let i = interp(1, &[], &[]);
    let err = eval(&i, &parse_expression("q").unwrap(), 0).unwrap_err();
    assert_eq!(err, EvalError::Unbound { kind: "proposition", name: "q".into() });
}

#[test]
fn all_false_model_fails_label() {
    let mut i = interp(1, &[("p", &[])], &[]);
    i.nominals.insert("x".into(), 0);
    assert!(!check_model(&i, &parse_problem("at x: p").unwrap()));
}

#[test]
fn model_json_is_sorted() {
    let (_, b) = sat_branch("at x: <r>0 p; at y: q");
    let m = certify(&b).unwrap().model;
    assert_eq!(
        m.to_json(),
        r#"{"states":[0,1,2],"nominals":{"v0":2,"x":0,"y":1},"props":{"p":[2],"q":[1]},"roles":{"r":[[0,2]]}}"#
    );
}

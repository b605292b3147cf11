//! Brute-force semantics, independent of the tableau.
//!
//! Interpretations over `0..k` states are enumerated depth-first, one
//! proposition or edge bit at a time. Partial interpretations are evaluated
//! in three-valued (Kleene) logic and abandoned as soon as some constraint is
//! definitely false; this prunes without losing any model.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::Interpretation;
use crate::syntax::{Expression, Problem};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub found: Option<Interpretation>,
    /// Largest state count searched.
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("state bound must be at least 1")]
    ZeroBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    F,
    U,
    T,
}

impl Tri {
    fn not(self) -> Tri {
        match self {
            Tri::F => Tri::T,
            Tri::U => Tri::U,
            Tri::T => Tri::F,
        }
    }

    fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::F, _) | (_, Tri::F) => Tri::F,
            (Tri::T, Tri::T) => Tri::T,
            _ => Tri::U,
        }
    }

    fn or(self, o: Tri) -> Tri {
        self.not().and(o.not()).not()
    }

    fn of(b: Option<bool>) -> Tri {
        match b {
            None => Tri::U,
            Some(true) => Tri::T,
            Some(false) => Tri::F,
        }
    }
}

#[derive(Clone, Debug)]
enum Term {
    Prop(usize),
    Nom(usize),
    Not(Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Dia(usize, u32, Box<Term>),
    Box(usize, u32, Box<Term>),
    Ex(u32, Box<Term>),
    All(u32, Box<Term>),
}

#[derive(Clone, Debug)]
enum Constraint {
    Holds(Term, usize),
    Edge(usize, usize, usize),
    Eq(usize, usize),
    Neq(usize, usize),
    Incl(usize, usize),
    Refl(usize),
    Trans(usize),
}

#[derive(Default)]
struct Signature {
    noms: Vec<String>,
    props: Vec<String>,
    roles: Vec<String>,
}

fn index(names: &mut Vec<String>, name: &str) -> usize {
    match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    }
}

impl Signature {
    fn term(&mut self, e: &Expression) -> Term {
        let b = |s: &mut Self, t: &Expression| Box::new(s.term(t));
        match e {
            Expression::Prop(p) => Term::Prop(index(&mut self.props, p)),
            Expression::Nom(x) => Term::Nom(index(&mut self.noms, x)),
            Expression::Not(t) => Term::Not(b(self, t)),
            Expression::And(l, r) => {
                let l = b(self, l);
                Term::And(l, b(self, r))
            }
            Expression::Or(l, r) => {
                let l = b(self, l);
                Term::Or(l, b(self, r))
            }
            Expression::Diamond(r, n, t) => {
                let r = index(&mut self.roles, r);
                Term::Dia(r, *n, b(self, t))
            }
            Expression::Box(r, n, t) => {
                let r = index(&mut self.roles, r);
                Term::Box(r, *n, b(self, t))
            }
            Expression::Exists(n, t) => Term::Ex(*n, b(self, t)),
            Expression::Forall(n, t) => Term::All(*n, b(self, t)),
        }
    }

    fn nom(&mut self, x: &str) -> usize {
        index(&mut self.noms, x)
    }

    fn role(&mut self, r: &str) -> usize {
        index(&mut self.roles, r)
    }
}

/// A partial interpretation over `k` states.
struct Partial<'a> {
    k: usize,
    nom: &'a [usize],
    props: Vec<Option<bool>>,
    edges: Vec<Option<bool>>,
}

impl Partial<'_> {
    fn prop(&self, p: usize, s: usize) -> Tri {
        Tri::of(self.props[p * self.k + s])
    }

    fn edge(&self, r: usize, s: usize, t: usize) -> Tri {
        Tri::of(self.edges[(r * self.k + s) * self.k + t])
    }

    /// `hits`: lower/upper bounds on the number of `u` in `us` where the
    /// pair `(guard u, t u)` is true.
    fn count(&self, pairs: impl Iterator<Item = (Tri, Tri)>) -> (u32, u32) {
        let (mut lo, mut hi) = (0, 0);
        for (g, t) in pairs {
            match g.and(t) {
                Tri::T => {
                    lo += 1;
                    hi += 1;
                }
                Tri::U => hi += 1,
                Tri::F => {}
            }
        }
        (lo, hi)
    }

    fn at_least(n: u32, (lo, hi): (u32, u32)) -> Tri {
        if lo > n {
            Tri::T
        } else if hi <= n {
            Tri::F
        } else {
            Tri::U
        }
    }

    fn eval(&self, t: &Term, s: usize) -> Tri {
        match t {
            Term::Prop(p) => self.prop(*p, s),
            Term::Nom(x) => {
                if self.nom[*x] == s {
                    Tri::T
                } else {
                    Tri::F
                }
            }
            Term::Not(t) => self.eval(t, s).not(),
            Term::And(a, b) => {
                let a = self.eval(a, s);
                if a == Tri::F {
                    return a;
                }
                a.and(self.eval(b, s))
            }
            Term::Or(a, b) => {
                let a = self.eval(a, s);
                if a == Tri::T {
                    return a;
                }
                a.or(self.eval(b, s))
            }
            Term::Dia(r, n, t) => {
                let c = self.count((0..self.k).map(|u| (self.edge(*r, s, u), self.eval(t, u))));
                Self::at_least(*n, c)
            }
            Term::Box(r, n, t) => {
                let c = self.count((0..self.k).map(|u| (self.edge(*r, s, u), self.eval(t, u).not())));
                Self::at_least(*n, c).not()
            }
            Term::Ex(n, t) => {
                let c = self.count((0..self.k).map(|u| (Tri::T, self.eval(t, u))));
                Self::at_least(*n, c)
            }
            Term::All(n, t) => {
                let c = self.count((0..self.k).map(|u| (Tri::T, self.eval(t, u).not())));
                Self::at_least(*n, c).not()
            }
        }
    }

    fn check(&self, c: &Constraint) -> Tri {
        let k = self.k;
        let pairs = || (0..k).flat_map(move |a| (0..k).map(move |b| (a, b)));
        match c {
            Constraint::Holds(t, x) => self.eval(t, self.nom[*x]),
            Constraint::Edge(r, x, y) => self.edge(*r, self.nom[*x], self.nom[*y]),
            Constraint::Eq(x, y) => Tri::of(Some(self.nom[*x] == self.nom[*y])),
            Constraint::Neq(x, y) => Tri::of(Some(self.nom[*x] != self.nom[*y])),
            Constraint::Incl(r, s) => pairs().fold(Tri::T, |acc, (a, b)| {
                acc.and(self.edge(*r, a, b).not().or(self.edge(*s, a, b)))
            }),
            Constraint::Refl(r) => (0..k).fold(Tri::T, |acc, a| acc.and(self.edge(*r, a, a))),
            Constraint::Trans(r) => {
                let mut acc = Tri::T;
                for (a, b) in pairs() {
                    for c in 0..k {
                        let premise = self.edge(*r, a, b).and(self.edge(*r, b, c));
                        acc = acc.and(premise.not().or(self.edge(*r, a, c)));
                        if acc == Tri::F {
                            return acc;
                        }
                    }
                }
                acc
            }
        }
    }
}

struct Search<'a> {
    sig: &'a Signature,
    constraints: &'a [Constraint],
    nodes: u64,
    budget: u64,
}

#[derive(Clone, Copy)]
enum Var {
    Prop(usize),
    Edge(usize),
}

impl Search<'_> {
    fn run(&mut self, k: usize) -> Result<Option<Interpretation>, OracleError> {
        let n = self.sig.noms.len();
        let mut nom = vec![0; n];
        loop {
            if let Some(i) = self.fill(k, &nom)? {
                return Ok(Some(i));
            }
            // next nominal map; the first nominal stays at state 0
            let mut i = n;
            loop {
                if i <= 1 {
                    return Ok(None);
                }
                i -= 1;
                nom[i] += 1;
                if nom[i] < k {
                    break;
                }
                nom[i] = 0;
            }
        }
    }

    fn vars(&self, k: usize) -> Vec<Var> {
        let (np, nr) = (self.sig.props.len(), self.sig.roles.len());
        // propositions first, then edges by source state, so that labels at
        // named states are decided early
        let mut out: Vec<Var> = (0..np * k).map(Var::Prop).collect();
        for s in 0..k {
            for r in 0..nr {
                for t in 0..k {
                    out.push(Var::Edge((r * k + s) * k + t));
                }
            }
        }
        out
    }

    fn fill(&mut self, k: usize, nom: &[usize]) -> Result<Option<Interpretation>, OracleError> {
        let mut part = Partial {
            k,
            nom,
            props: vec![None; self.sig.props.len() * k],
            edges: vec![None; self.sig.roles.len() * k * k],
        };
        let vars = self.vars(k);
        if self.dfs(&mut part, &vars, 0)? {
            Ok(Some(self.interpretation(&part)))
        } else {
            Ok(None)
        }
    }

    fn dfs(&mut self, part: &mut Partial, vars: &[Var], depth: usize) -> Result<bool, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExceeded(self.budget));
        }
        let mut all_true = true;
        for c in self.constraints {
            match part.check(c) {
                Tri::F => return Ok(false),
                Tri::U => all_true = false,
                Tri::T => {}
            }
        }
        if all_true {
            // unset bits may take any value; fix them to false
            for v in part.props.iter_mut().chain(part.edges.iter_mut()) {
                v.get_or_insert(false);
            }
            return Ok(true);
        }
        let Some(&var) = vars.get(depth) else {
            unreachable!("a total interpretation decides every constraint");
        };
        for value in [false, true] {
            match var {
                Var::Prop(i) => part.props[i] = Some(value),
                Var::Edge(i) => part.edges[i] = Some(value),
            }
            if self.dfs(part, vars, depth + 1)? {
                return Ok(true);
            }
        }
        match var {
            Var::Prop(i) => part.props[i] = None,
            Var::Edge(i) => part.edges[i] = None,
        }
        Ok(false)
    }

    fn interpretation(&self, part: &Partial) -> Interpretation {
        let k = part.k;
        let on = |v: &Option<bool>| *v == Some(true);
        Interpretation {
            states: (0..k).collect(),
            nominals: self.sig.noms.iter().cloned().zip(part.nom.iter().copied()).collect(),
            props: self
                .sig
                .props
                .iter()
                .enumerate()
                .map(|(p, name)| (name.clone(), (0..k).filter(|&s| on(&part.props[p * k + s])).collect()))
                .collect(),
            roles: self
                .sig
                .roles
                .iter()
                .enumerate()
                .map(|(r, name)| {
                    let ext: BTreeSet<_> = (0..k)
                        .flat_map(|s| (0..k).map(move |t| (s, t)))
                        .filter(|&(s, t)| on(&part.edges[(r * k + s) * k + t]))
                        .collect();
                    (name.clone(), ext)
                })
                .collect(),
        }
    }
}

fn problem_constraints(p: &Problem) -> (Signature, Vec<Constraint>) {
    let mut sig = Signature::default();
    let mut cs = Vec::new();
    for (t, x) in &p.labels {
        let x = sig.nom(x);
        cs.push(Constraint::Holds(sig.term(&Expression::from(t)), x));
    }
    for (r, x, y) in &p.edges {
        let (r, x, y) = (sig.role(r), sig.nom(x), sig.nom(y));
        cs.push(Constraint::Edge(r, x, y));
    }
    for (x, y) in &p.equations {
        let (x, y) = (sig.nom(x), sig.nom(y));
        cs.push(Constraint::Eq(x, y));
    }
    for (x, y) in &p.disequations {
        let (x, y) = (sig.nom(x), sig.nom(y));
        cs.push(Constraint::Neq(x, y));
    }
    for (r, s) in &p.inclusions {
        let (r, s) = (sig.role(r), sig.role(s));
        cs.push(Constraint::Incl(r, s));
    }
    for r in &p.reflexive {
        cs.push(Constraint::Refl(sig.role(r)));
    }
    for r in &p.transitive {
        cs.push(Constraint::Trans(sig.role(r)));
    }
    (sig, cs)
}

fn search(sig: &Signature, cs: &[Constraint], max_states: usize, budget: u64) -> Result<OracleVerdict, OracleError> {
    if max_states == 0 {
        return Err(OracleError::ZeroBound);
    }
    let mut s = Search {
        sig,
        constraints: cs,
        nodes: 0,
        budget,
    };
    for k in 1..=max_states {
        if let Some(found) = s.run(k)? {
            return Ok(OracleVerdict {
                found: Some(found),
                bound: k,
            });
        }
    }
    Ok(OracleVerdict {
        found: None,
        bound: max_states,
    })
}

/// The smallest model of `p` with at most `max_states` states, if any.
pub fn brute_force_sat(p: &Problem, max_states: usize) -> Result<OracleVerdict, OracleError> {
    brute_force_sat_with_budget(p, max_states, DEFAULT_BUDGET)
}

pub fn brute_force_sat_with_budget(p: &Problem, max_states: usize, budget: u64) -> Result<OracleVerdict, OracleError> {
    let (sig, cs) = problem_constraints(p);
    search(&sig, &cs, max_states, budget)
}

/// Do `a` and `b` agree at every state of every interpretation with at most
/// `max_states` states?
pub fn equivalent_exprs(a: &Expression, b: &Expression, max_states: usize) -> Result<bool, OracleError> {
    let mut sig = Signature::default();
    // the state where the two differ; named so that it cannot clash
    let mut here = String::from("here");
    let mut used = BTreeSet::new();
    collect_noms(a, &mut used);
    collect_noms(b, &mut used);
    while used.contains(&here) {
        here.push('_');
    }
    let x = sig.nom(&here);
    let differ = Expression::or(
        Expression::and(a.clone(), Expression::not(b.clone())),
        Expression::and(Expression::not(a.clone()), b.clone()),
    );
    let cs = vec![Constraint::Holds(sig.term(&differ), x)];
    Ok(search(&sig, &cs, max_states, DEFAULT_BUDGET)?.found.is_none())
}

fn collect_noms(e: &Expression, out: &mut BTreeSet<String>) {
    match e {
        Expression::Nom(x) => {
            out.insert(x.clone());
        }
        Expression::Prop(_) => {}
        Expression::Not(t)
        | Expression::Diamond(_, _, t)
        | Expression::Box(_, _, t)
        | Expression::Exists(_, t)
        | Expression::Forall(_, t) => collect_noms(t, out),
        Expression::And(l, r) | Expression::Or(l, r) => {
            collect_noms(l, out);
            collect_noms(r, out);
        }
    }
}

/// Truth of `t` at `s` by the oracle's own evaluator; names missing from
/// `i` are an error.
pub fn oracle_eval(i: &Interpretation, t: &Expression, s: usize) -> Result<bool, String> {
    let mut sig = Signature::default();
    let term = sig.term(t);
    let k = i.states.len();
    let mut nom = Vec::new();
    for x in &sig.noms {
        nom.push(*i.nominals.get(x).ok_or_else(|| format!("unbound nominal `{x}`"))?);
    }
    let mut props = vec![Some(false); sig.props.len() * k];
    for (p, name) in sig.props.iter().enumerate() {
        let ext = i.props.get(name).ok_or_else(|| format!("unbound proposition `{name}`"))?;
        for &s in ext {
            props[p * k + s] = Some(true);
        }
    }
    let mut edges = vec![Some(false); sig.roles.len() * k * k];
    for (r, name) in sig.roles.iter().enumerate() {
        let ext = i.roles.get(name).ok_or_else(|| format!("unbound role `{name}`"))?;
        for &(a, b) in ext {
            edges[(r * k + a) * k + b] = Some(true);
        }
    }
    let part = Partial {
        k,
        nom: &nom,
        props,
        edges,
    };
    Ok(part.eval(&term, s) == Tri::T)
}

/// Names of the problem's signature, for reporting.
pub fn signature_size(p: &Problem) -> BTreeMap<&'static str, usize> {
    let (sig, _) = problem_constraints(p);
    BTreeMap::from([
        ("nominals", sig.noms.len()),
        ("propositions", sig.props.len()),
        ("roles", sig.roles.len()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_model_detailed;
    use crate::syntax::{parse_expression, parse_problem};

    fn prob(src: &str) -> Problem {
        parse_problem(src).unwrap()
    }

    fn expr(src: &str) -> Expression {
        parse_expression(src).unwrap()
    }

    #[test]
    fn graded_clash_has_no_small_model() {
        let v = brute_force_sat(&prob("at x: <r>1 p & [r]1 !p"), 3).unwrap();
        assert_eq!(v.found, None);
        assert_eq!(v.bound, 3);
    }

    #[test]
    fn single_label_one_state() {
        let p = prob("at x: p");
        let v = brute_force_sat(&p, 1).unwrap();
        let m = v.found.unwrap();
        assert_eq!(m.states, [0]);
        check_model_detailed(&m, &p).unwrap();
    }

    #[test]
    fn role_inclusion_example_has_no_model() {
        let v = brute_force_sat(&prob("r <= s; at x: <r>0 p & <s>0 !p & [s]1 (p & !p)"), 4).unwrap();
        assert_eq!(v.found, None);
    }

    #[test]
    fn found_models_check() {
        for src in [
            "refl r; trans s; r <= s; at x: [s]0 <r>0 p; at x: <s>0 q",
            "at x: A0 (<r>0 p & <r>0 q & <s>0 q)",
            "at x: <r>1 p; at y: !p; x != y; r(y, x)",
        ] {
            let p = prob(src);
            let m = brute_force_sat(&p, 4).unwrap().found.expect(src);
            check_model_detailed(&m, &p).unwrap();
        }
    }

    #[test]
    fn tiny_budget_is_an_error() {
        let err = brute_force_sat_with_budget(&prob("at x: <r>1 p & [r]1 !p"), 3, 5).unwrap_err();
        assert_eq!(err, OracleError::BudgetExceeded(5));
    }

    #[test]
    fn negated_graded_diamond_is_a_box() {
        assert!(equivalent_exprs(&expr("!<r>1 p"), &expr("[r]1 !p"), 3).unwrap());
    }

    #[test]
    fn p_and_not_p_differ() {
        assert!(!equivalent_exprs(&expr("p"), &expr("!p"), 1).unwrap());
    }

    #[test]
    fn exists_is_dual_of_forall() {
        assert!(equivalent_exprs(&expr("E0 p"), &expr("!A0 !p"), 3).unwrap());
        assert!(!equivalent_exprs(&expr("E1 p"), &expr("!A0 !p"), 3).unwrap());
    }

    #[test]
    fn nominal_named_here_is_respected() {
        assert!(!equivalent_exprs(&expr("@here"), &expr("!@here"), 1).unwrap());
        assert!(equivalent_exprs(&expr("@here | !@here"), &expr("p | !p"), 2).unwrap());
    }
}

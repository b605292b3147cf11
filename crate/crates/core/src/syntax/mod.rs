//! Modal expressions, their negation normal form, and problem descriptions.
//!
//! A [`Problem`] is what the prover decides: a set of labeled expressions
//! together with edges, (dis)equations between nominals, and the role
//! assertions (inclusion, reflexivity, transitivity) that constrain the
//! accessibility relations.

mod nnf;
mod parser;
mod printer;
mod roles;

use std::collections::BTreeSet;

pub use nnf::to_nnf;
pub use parser::{parse_expression, parse_problem, ParseError};
pub use roles::{simple_roles, sub_role_closure, ValidationError};

/// Modal expression as written by the user. Negation may occur anywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expression {
    Prop(String),
    /// Nominal test `@x`, true exactly at the state named by `x`.
    Nom(String),
    Not(Box<Expression>),
    And(Box<Expression>, Box<Expression>),
    Or(Box<Expression>, Box<Expression>),
    /// `<r>n t`: at least `n + 1` r-successors satisfy `t`.
    Diamond(String, u32, Box<Expression>),
    /// `[r]n t`: all but at most `n` r-successors satisfy `t`.
    Box(String, u32, Box<Expression>),
    /// `En t`: at least `n + 1` states satisfy `t`.
    Exists(u32, Box<Expression>),
    /// `An t`: all but at most `n` states satisfy `t`.
    Forall(u32, Box<Expression>),
}

/// Expression in negation normal form: negation only in front of
/// propositions and nominal tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NnfExpression {
    Prop(String),
    NegProp(String),
    Nom(String),
    NegNom(String),
    And(Box<NnfExpression>, Box<NnfExpression>),
    Or(Box<NnfExpression>, Box<NnfExpression>),
    Diamond(String, u32, Box<NnfExpression>),
    Box(String, u32, Box<NnfExpression>),
    Exists(u32, Box<NnfExpression>),
    Forall(u32, Box<NnfExpression>),
}

impl Expression {
    pub fn prop(name: &str) -> Self {
        Expression::Prop(name.to_string())
    }

    pub fn nom(name: &str) -> Self {
        Expression::Nom(name.to_string())
    }

    pub fn not(e: Expression) -> Self {
        Expression::Not(Box::new(e))
    }

    pub fn and(a: Expression, b: Expression) -> Self {
        Expression::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expression, b: Expression) -> Self {
        Expression::Or(Box::new(a), Box::new(b))
    }

    pub fn diamond(role: &str, grade: u32, e: Expression) -> Self {
        Expression::Diamond(role.to_string(), grade, Box::new(e))
    }

    pub fn boxed(role: &str, grade: u32, e: Expression) -> Self {
        Expression::Box(role.to_string(), grade, Box::new(e))
    }

    pub fn exists(grade: u32, e: Expression) -> Self {
        Expression::Exists(grade, Box::new(e))
    }

    pub fn forall(grade: u32, e: Expression) -> Self {
        Expression::Forall(grade, Box::new(e))
    }

    /// Nesting depth of modal operators (diamonds, boxes, E, A).
    pub fn modal_depth(&self) -> usize {
        match self {
            Expression::Prop(_) | Expression::Nom(_) => 0,
            Expression::Not(e) => e.modal_depth(),
            Expression::And(a, b) | Expression::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Expression::Diamond(_, _, e)
            | Expression::Box(_, _, e)
            | Expression::Exists(_, e)
            | Expression::Forall(_, e) => 1 + e.modal_depth(),
        }
    }
}

impl NnfExpression {
    /// Sub-expressions in pre-order, left to right, the expression itself first.
    pub fn subexpressions(&self) -> Vec<&NnfExpression> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            match e {
                NnfExpression::And(a, b) | NnfExpression::Or(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                NnfExpression::Diamond(_, _, t)
                | NnfExpression::Box(_, _, t)
                | NnfExpression::Exists(_, t)
                | NnfExpression::Forall(_, t) => stack.push(t),
                _ => {}
            }
        }
        out
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, NnfExpression::Diamond(..) | NnfExpression::Box(..))
    }
}

impl From<&NnfExpression> for Expression {
    fn from(e: &NnfExpression) -> Self {
        match e {
            NnfExpression::Prop(p) => Expression::Prop(p.clone()),
            NnfExpression::NegProp(p) => Expression::not(Expression::Prop(p.clone())),
            NnfExpression::Nom(x) => Expression::Nom(x.clone()),
            NnfExpression::NegNom(x) => Expression::not(Expression::Nom(x.clone())),
            NnfExpression::And(a, b) => Expression::and(a.as_ref().into(), b.as_ref().into()),
            NnfExpression::Or(a, b) => Expression::or(a.as_ref().into(), b.as_ref().into()),
            NnfExpression::Diamond(r, n, t) => {
                Expression::Diamond(r.clone(), *n, Box::new(t.as_ref().into()))
            }
            NnfExpression::Box(r, n, t) => {
                Expression::Box(r.clone(), *n, Box::new(t.as_ref().into()))
            }
            NnfExpression::Exists(n, t) => Expression::exists(*n, t.as_ref().into()),
            NnfExpression::Forall(n, t) => Expression::forall(*n, t.as_ref().into()),
        }
    }
}

/// A satisfiability problem: the initial branch plus role assertions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub labels: Vec<(NnfExpression, String)>,
    /// `(role, from, to)`
    pub edges: Vec<(String, String, String)>,
    pub equations: Vec<(String, String)>,
    pub disequations: Vec<(String, String)>,
    /// `(sub, super)` for `sub <= super`
    pub inclusions: Vec<(String, String)>,
    pub reflexive: BTreeSet<String>,
    pub transitive: BTreeSet<String>,
}

/// Which syntactic category a name belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Namespace {
    Proposition,
    Nominal,
    Role,
}

impl std::fmt::Display for Namespace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Namespace::Proposition => "proposition",
            Namespace::Nominal => "nominal",
            Namespace::Role => "role",
        })
    }
}

fn collect_names<'a>(e: &'a NnfExpression, out: &mut Vec<(&'a str, Namespace)>) {
    for sub in e.subexpressions() {
        match sub {
            NnfExpression::Prop(p) | NnfExpression::NegProp(p) => {
                out.push((p, Namespace::Proposition))
            }
            NnfExpression::Nom(x) | NnfExpression::NegNom(x) => out.push((x, Namespace::Nominal)),
            NnfExpression::Diamond(r, _, _) | NnfExpression::Box(r, _, _) => {
                out.push((r, Namespace::Role))
            }
            _ => {}
        }
    }
}

impl Problem {
    /// Every name occurrence in the problem with its namespace, in
    /// declaration order (labels, edges, equations, disequations, then role
    /// assertions).
    pub fn name_occurrences(&self) -> Vec<(&str, Namespace)> {
        let mut out = Vec::new();
        for (e, x) in &self.labels {
            out.push((x.as_str(), Namespace::Nominal));
            collect_names(e, &mut out);
        }
        for (r, x, y) in &self.edges {
            out.push((r.as_str(), Namespace::Role));
            out.push((x.as_str(), Namespace::Nominal));
            out.push((y.as_str(), Namespace::Nominal));
        }
        for (x, y) in self.equations.iter().chain(&self.disequations) {
            out.push((x.as_str(), Namespace::Nominal));
            out.push((y.as_str(), Namespace::Nominal));
        }
        for (r, s) in &self.inclusions {
            out.push((r.as_str(), Namespace::Role));
            out.push((s.as_str(), Namespace::Role));
        }
        for r in self.reflexive.iter().chain(&self.transitive) {
            out.push((r.as_str(), Namespace::Role));
        }
        out
    }

    fn names_in(&self, ns: Namespace) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (name, kind) in self.name_occurrences() {
            if kind == ns && seen.insert(name) {
                out.push(name.to_string());
            }
        }
        out
    }

    /// Nominals in order of first occurrence. The first one is the default
    /// denotation for nominals missing from an extracted model.
    pub fn nominals(&self) -> Vec<String> {
        self.names_in(Namespace::Nominal)
    }

    pub fn propositions(&self) -> Vec<String> {
        self.names_in(Namespace::Proposition)
    }

    pub fn roles(&self) -> Vec<String> {
        self.names_in(Namespace::Role)
    }

    /// True when any inclusion, reflexivity or transitivity assertion is present.
    pub fn has_role_assertions(&self) -> bool {
        !(self.inclusions.is_empty() && self.reflexive.is_empty() && self.transitive.is_empty())
    }

    /// Checks namespace disjointness and the simple-role restriction on
    /// graded boxes.
    pub fn validate(&self) -> Result<(), ValidationError> {
        roles::validate(self)
    }
}

//! Finite models: construction from a quasi-evident branch, evaluation and
//! model checking.

mod completion;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use completion::{
    closure_audit, complete_to_pre_evident, evidence_closure, phi, simple_role_audit, EvidenceClosure, ModelError,
};

use crate::branch::{Branch, Node};
use crate::syntax::{Expression, NnfExpression, Problem};

pub type State = usize;

/// A finite interpretation with states `0..states.len()`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub states: Vec<State>,
    pub nominals: BTreeMap<String, State>,
    pub props: BTreeMap<String, BTreeSet<State>>,
    pub roles: BTreeMap<String, BTreeSet<(State, State)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound {kind} `{name}`")]
    Unbound { kind: &'static str, name: String },
}

impl Interpretation {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("interpretation serializes")
    }

    fn prop(&self, p: &str) -> Result<&BTreeSet<State>, EvalError> {
        self.props.get(p).ok_or_else(|| EvalError::Unbound {
            kind: "proposition",
            name: p.to_string(),
        })
    }

    fn nominal(&self, x: &str) -> Result<State, EvalError> {
        self.nominals.get(x).copied().ok_or_else(|| EvalError::Unbound {
            kind: "nominal",
            name: x.to_string(),
        })
    }

    fn role(&self, r: &str) -> Result<&BTreeSet<(State, State)>, EvalError> {
        self.roles.get(r).ok_or_else(|| EvalError::Unbound {
            kind: "role",
            name: r.to_string(),
        })
    }

    pub fn successors(&self, r: &str, s: State) -> Result<impl Iterator<Item = State> + '_, EvalError> {
        Ok(self.role(r)?.range((s, 0)..=(s, State::MAX)).map(|&(_, t)| t))
    }
}

/// Truth of `t` at state `s`.
pub fn eval(i: &Interpretation, t: &Expression, s: State) -> Result<bool, EvalError> {
    Ok(match t {
        Expression::Prop(p) => i.prop(p)?.contains(&s),
        Expression::Nom(x) => i.nominal(x)? == s,
        Expression::Not(t) => !eval(i, t, s)?,
        Expression::And(a, b) => eval(i, a, s)? && eval(i, b, s)?,
        Expression::Or(a, b) => eval(i, a, s)? || eval(i, b, s)?,
        Expression::Diamond(r, n, t) => {
            let mut hits = 0;
            for u in i.successors(r, s)? {
                hits += eval(i, t, u)? as u32;
            }
            hits > *n
        }
        Expression::Box(r, n, t) => {
            let mut misses = 0;
            for u in i.successors(r, s)? {
                misses += !eval(i, t, u)? as u32;
            }
            misses <= *n
        }
        Expression::Exists(n, t) => {
            let mut hits = 0;
            for &u in &i.states {
                hits += eval(i, t, u)? as u32;
            }
            hits > *n
        }
        Expression::Forall(n, t) => {
            let mut misses = 0;
            for &u in &i.states {
                misses += !eval(i, t, u)? as u32;
            }
            misses <= *n
        }
    })
}

pub fn eval_nnf(i: &Interpretation, t: &NnfExpression, s: State) -> Result<bool, EvalError> {
    eval(i, &Expression::from(t), s)
}

/// The first part of `p` that `i` violates, if any.
pub fn check_model_detailed(i: &Interpretation, p: &Problem) -> Result<(), String> {
    let nom = |x: &str| i.nominal(x).map_err(|e| e.to_string());
    for (t, x) in &p.labels {
        let s = nom(x)?;
        if !eval_nnf(i, t, s).map_err(|e| e.to_string())? {
            return Err(format!("at {x}: {t} is false"));
        }
    }
    for (r, x, y) in &p.edges {
        let edge = (nom(x)?, nom(y)?);
        if !i.role(r).map_err(|e| e.to_string())?.contains(&edge) {
            return Err(format!("{r}({x}, {y}) is missing"));
        }
    }
    for (x, y) in &p.equations {
        if nom(x)? != nom(y)? {
            return Err(format!("{x} = {y} is false"));
        }
    }
    for (x, y) in &p.disequations {
        if nom(x)? == nom(y)? {
            return Err(format!("{x} != {y} is false"));
        }
    }
    let empty = BTreeSet::new();
    let ext = |r: &str| i.roles.get(r).unwrap_or(&empty);
    for (r, s) in &p.inclusions {
        if !ext(r).is_subset(ext(s)) {
            return Err(format!("{r} <= {s} is violated"));
        }
    }
    for r in &p.reflexive {
        if let Some(s) = i.states.iter().find(|&&s| !ext(r).contains(&(s, s))) {
            return Err(format!("refl {r} is violated at state {s}"));
        }
    }
    for r in &p.transitive {
        let e = ext(r);
        for &(a, b) in e {
            for (_, c) in e.range((b, 0)..=(b, State::MAX)) {
                if !e.contains(&(a, *c)) {
                    return Err(format!("trans {r} is violated at ({a}, {b}, {c})"));
                }
            }
        }
    }
    Ok(())
}

pub fn check_model(i: &Interpretation, p: &Problem) -> bool {
    check_model_detailed(i, p).is_ok()
}

/// Reads a model off an evident branch: one state per class, in ascending
/// order of representatives, with role extensions from `g`.
pub fn extract_model(b: &Branch, g: &EvidenceClosure) -> Interpretation {
    let ctx = b.context();
    let reps: Vec<_> = b.classes().collect();
    let state: BTreeMap<_, State> = reps.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut i = Interpretation {
        states: (0..reps.len().max(1)).collect(),
        ..Default::default()
    };
    for x in b.nominals() {
        i.nominals.insert(ctx.nominal_name(x), state[&b.rep(x)]);
    }
    // every nominal is on the branch; the first input nominal is the fallback
    let fallback = ctx.problem().nominals().first().and_then(|x| i.nominals.get(x).copied()).unwrap_or(0);
    for x in ctx.problem().nominals() {
        i.nominals.entry(x).or_insert(fallback);
    }
    for k in 0..ctx.prop_count() {
        let p = crate::branch::PropId(k as u32);
        let ext = ctx
            .lookup(Node::Prop(p))
            .map(|e| reps.iter().filter(|&&x| b.has_label(e, x)).map(|x| state[x]).collect())
            .unwrap_or_default();
        i.props.insert(ctx.prop_name(p).to_string(), ext);
    }
    for r in ctx.roles() {
        let ext = g.edges(r).map(|(x, y)| (state[&x], state[&y])).collect();
        i.roles.insert(ctx.role_name(r).to_string(), ext);
    }
    i
}

/// Everything the certification pipeline produces for a SAT branch.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub completed: Branch,
    pub closure: EvidenceClosure,
    pub model: Interpretation,
}

/// Completion, evidence closure, audits, extraction.
pub fn certify(b: &Branch) -> Result<Certificate, ModelError> {
    let completed = complete_to_pre_evident(b)?;
    let closure = evidence_closure(&completed);
    closure_audit(&completed, &closure).map_err(ModelError::NotEvident)?;
    simple_role_audit(&completed, &closure)?;
    let model = extract_model(&completed, &closure);
    Ok(Certificate {
        completed,
        closure,
        model,
    })
}

#[cfg(test)]
mod tests;

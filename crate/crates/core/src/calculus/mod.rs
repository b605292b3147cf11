//! Tableau rules, their applicability, and the termination measures.
//!
//! Strategy: rules are tried by priority
//! `R⊥¬/R⊥≠ > RN/RN̄ > R∧ > R□ > RA > RT > R∨ > RE > R◇`.
//! Within a level the oldest principal formula wins, except for `R◇`, which
//! prefers the newest principal class, then the diamond that occurs first in
//! the input.

mod conditions;
mod metrics;

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

pub use conditions::{
    blocked, condition_name, distinct_witnesses, evidence_audit_in_mode, evident, evident_in_mode,
    label_condition, pattern_mode, pre_evident, pre_evident_transitive, quasi_evidence_audit,
    quasi_evident_diamond, ConditionFailure,
};
pub use metrics::{metrics, pattern_expanding, s_prime_of, TerminationMetrics};

use crate::branch::{Branch, BranchFormula, Extension, Node, NomId, RoleId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    ClashNeg,
    ClashNeq,
    Nom,
    NegNom,
    Conj,
    Box,
    Forall,
    Trans,
    Disj,
    Exists,
    Diamond,
}

impl RuleId {
    pub const ALL: [RuleId; 11] = [
        RuleId::ClashNeg,
        RuleId::ClashNeq,
        RuleId::Nom,
        RuleId::NegNom,
        RuleId::Conj,
        RuleId::Box,
        RuleId::Forall,
        RuleId::Trans,
        RuleId::Disj,
        RuleId::Exists,
        RuleId::Diamond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::ClashNeg => "R⊥¬",
            RuleId::ClashNeq => "R⊥≠",
            RuleId::Nom => "RN",
            RuleId::NegNom => "RN̄",
            RuleId::Conj => "R∧",
            RuleId::Box => "R□",
            RuleId::Forall => "RA",
            RuleId::Trans => "RT",
            RuleId::Disj => "R∨",
            RuleId::Exists => "RE",
            RuleId::Diamond => "R◇",
        }
    }

    /// Introduces fresh nominals.
    pub fn generative(self) -> bool {
        matches!(self, RuleId::Diamond | RuleId::Exists)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub principal: BranchFormula,
    /// The transitive role of an `RT` instance.
    pub transitive_role: Option<RoleId>,
    /// `Y` for `R□`/`RA`, the target for `RT`, the fresh nominals for
    /// `R◇`/`RE`.
    pub parameters: Vec<NomId>,
    /// One formula set per child branch.
    pub alternatives: Vec<Vec<BranchFormula>>,
    /// Number of fresh nominals each child allocates before adding its
    /// alternative.
    pub fresh: usize,
}

/// Priority levels, highest first.
const LEVELS: [&[RuleId]; 9] = [
    &[RuleId::ClashNeg, RuleId::ClashNeq],
    &[RuleId::Nom, RuleId::NegNom],
    &[RuleId::Conj],
    &[RuleId::Box],
    &[RuleId::Forall],
    &[RuleId::Trans],
    &[RuleId::Disj],
    &[RuleId::Exists],
    &[RuleId::Diamond],
];

/// Instances for one principal formula at one level, in order.
fn instances_for(b: &Branch, level: &[RuleId], f: BranchFormula, out: &mut Vec<RuleInstance>, first: bool) {
    let ctx = b.context();
    let single = |rule, alt: Vec<BranchFormula>| RuleInstance {
        rule,
        principal: f,
        transitive_role: None,
        parameters: vec![],
        alternatives: vec![alt],
        fresh: 0,
    };
    let label = match f {
        BranchFormula::Neq(x, y) => {
            if level.contains(&RuleId::ClashNeq) && b.equivalent(x, y) {
                out.push(single(RuleId::ClashNeq, vec![BranchFormula::Falsum]));
            }
            return;
        }
        BranchFormula::Label(e, x) => (e, x),
        _ => return,
    };
    let (e, x) = label;
    let node = ctx.node(e);
    for &rule in level {
        match (rule, node) {
            (RuleId::ClashNeg, Node::NegProp(p)) => {
                if ctx.lookup(Node::Prop(p)).is_some_and(|pos| b.has_label(pos, x)) {
                    out.push(single(rule, vec![BranchFormula::Falsum]));
                }
            }
            (RuleId::Nom, Node::Nom(y)) => {
                if !b.equivalent(y, x) {
                    out.push(single(rule, vec![BranchFormula::Eq(y, x)]));
                }
            }
            (RuleId::NegNom, Node::NegNom(y)) => {
                if !b.distinct(y, x) {
                    out.push(single(rule, vec![BranchFormula::Neq(y, x)]));
                }
            }
            (RuleId::Conj, Node::And(s, t)) => {
                if !(b.has_label(s, x) && b.has_label(t, x)) {
                    out.push(single(rule, vec![BranchFormula::Label(s, x), BranchFormula::Label(t, x)]));
                }
            }
            (RuleId::Disj, Node::Or(s, t)) => {
                if !b.has_label(s, x) && !b.has_label(t, x) {
                    let mut alternatives = vec![vec![BranchFormula::Label(s, x)]];
                    if s != t {
                        alternatives.push(vec![BranchFormula::Label(t, x)]);
                    }
                    out.push(RuleInstance {
                        alternatives,
                        ..single(rule, vec![])
                    });
                }
            }
            (RuleId::Box, Node::Box(r, n, t)) => {
                let succ = if ctx.extended() {
                    b.induced_successors_reflexive(x, r)
                } else {
                    b.edge_targets(x, r).cloned().unwrap_or_default()
                };
                if let Some(inst) = choice_instance(b, f, rule, n, t, succ) {
                    out.push(inst);
                }
            }
            (RuleId::Forall, Node::Forall(n, t)) => {
                let all: BTreeSet<NomId> = b.classes().collect();
                if let Some(inst) = choice_instance(b, f, rule, n, t, all) {
                    out.push(inst);
                }
            }
            (RuleId::Trans, Node::Box(s, 0, t)) => {
                for r in ctx.roles() {
                    if !(ctx.is_transitive(r) && ctx.sub_role(r, s)) {
                        continue;
                    }
                    let target = ctx
                        .lookup(Node::Box(r, 0, t))
                        .expect("boxes introduced by RT are interned up front");
                    for y in b.induced_successors_reflexive(x, r) {
                        if !b.has_label(target, y) {
                            out.push(RuleInstance {
                                transitive_role: Some(r),
                                parameters: vec![y],
                                ..single(rule, vec![BranchFormula::Label(target, y)])
                            });
                            if first {
                                return;
                            }
                        }
                    }
                }
            }
            (RuleId::Exists, Node::Exists(n, t)) => {
                if !evident(b, &f) {
                    out.push(fresh_instance(b, f, rule, None, n, t));
                }
            }
            (RuleId::Diamond, Node::Diamond(r, n, t)) => {
                if !quasi_evident_diamond(b, e, x) {
                    out.push(fresh_instance(b, f, rule, Some((r, x)), n, t));
                }
            }
            _ => {}
        }
        if first && !out.is_empty() {
            return;
        }
    }
}

/// `R□`/`RA`: pick the first `n+1` exception classes among `candidates`.
/// Every alternative is then a proper extension, and no two alternatives
/// have the same closure.
fn choice_instance(
    b: &Branch,
    f: BranchFormula,
    rule: RuleId,
    n: u32,
    t: crate::branch::ExprId,
    candidates: BTreeSet<NomId>,
) -> Option<RuleInstance> {
    let exceptions: Vec<NomId> = candidates.into_iter().filter(|&y| !b.has_label(t, y)).collect();
    let k = n as usize + 1;
    if exceptions.len() < k {
        return None;
    }
    let ys = &exceptions[..k];
    let mut alternatives = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            alternatives.push(vec![BranchFormula::Eq(ys[i], ys[j])]);
        }
    }
    for &y in ys {
        alternatives.push(vec![BranchFormula::Label(t, y)]);
    }
    Some(RuleInstance {
        rule,
        principal: f,
        transitive_role: None,
        parameters: ys.to_vec(),
        alternatives,
        fresh: 0,
    })
}

/// `R◇`/`RE`: one child with `n+1` fresh, pairwise distinct witnesses.
fn fresh_instance(
    b: &Branch,
    f: BranchFormula,
    rule: RuleId,
    edge: Option<(RoleId, NomId)>,
    n: u32,
    t: crate::branch::ExprId,
) -> RuleInstance {
    let ys = b.peek_fresh(n as usize + 1);
    let mut alt = Vec::new();
    for &y in &ys {
        if let Some((r, x)) = edge {
            alt.push(BranchFormula::Edge(r, x, y));
        }
        alt.push(BranchFormula::Label(t, y));
    }
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            alt.push(BranchFormula::Neq(ys[i], ys[j]));
        }
    }
    RuleInstance {
        rule,
        principal: f,
        transitive_role: None,
        parameters: ys.clone(),
        alternatives: vec![alt],
        fresh: ys.len(),
    }
}

/// Diamond labels in the order `R◇` considers them.
fn diamond_order(b: &Branch) -> Vec<BranchFormula> {
    let ctx = b.context();
    let mut keyed: Vec<_> = b
        .formulas()
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| match f {
            BranchFormula::Label(e, x) if matches!(ctx.node(e), Node::Diamond(..)) => {
                Some(((Reverse(b.rep(x)), ctx.rank(e), i), f))
            }
            _ => None,
        })
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    keyed.into_iter().map(|(_, f)| f).collect()
}

fn collect(b: &Branch, first: bool) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    if b.is_closed() {
        return out;
    }
    for level in LEVELS {
        let order: Vec<BranchFormula> = if level == [RuleId::Diamond] {
            diamond_order(b)
        } else {
            b.formulas().to_vec()
        };
        let mut seen = BTreeSet::new();
        for f in order {
            let key = match f {
                BranchFormula::Label(e, x) => Some((e, b.rep(x))),
                _ => None,
            };
            if key.is_some_and(|k| !seen.insert(k)) {
                continue;
            }
            instances_for(b, level, f, &mut out, first);
            if first && !out.is_empty() {
                return out;
            }
        }
    }
    out
}

/// Every applicable instance in strategy order. `R□`/`RA` contribute their
/// first admissible `Y` per principal. Empty iff the branch is closed or
/// maximal.
pub fn applicable_instances(b: &Branch) -> Vec<RuleInstance> {
    collect(b, false)
}

/// The instance the strategy applies next.
pub fn first_instance(b: &Branch) -> Option<RuleInstance> {
    collect(b, true).into_iter().next()
}

/// One child per alternative.
pub fn apply(b: &Branch, inst: &RuleInstance) -> Vec<Branch> {
    inst.alternatives
        .iter()
        .map(|alt| {
            let mut child = b.clone();
            if inst.fresh > 0 {
                let ys = child.fresh_nominals(inst.fresh);
                debug_assert_eq!(ys, inst.parameters);
            }
            let mut grew = false;
            for &f in alt {
                grew |= child.add(f) == Extension::Proper;
            }
            debug_assert!(grew, "{} produced an improper extension", inst.rule);
            child
        })
        .collect()
}

#[cfg(test)]
mod tests;

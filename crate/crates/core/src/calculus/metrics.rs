use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::conditions::{induced_successors, label_condition, raw_successors, Successors};
use super::{RuleId, RuleInstance};
use crate::branch::{Branch, BranchFormula, ExprId, Node, Pattern, PatternMode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TerminationMetrics {
    /// Global diamonds of the input that are not evident.
    pub psi_e: usize,
    /// Per class with a successor, diamonds of the input not (pre-)evident
    /// there; summed.
    pub psi_diamond: usize,
    /// Distinct patterns owned by classes with a successor, per role (basic
    /// mode) or under `*` (extended mode).
    pub expanded_patterns: BTreeMap<String, usize>,
    pub branch_size: usize,
    pub nominal_count: usize,
    pub class_count: usize,
    /// Modal expressions on the branch, closed under the boxes `RT` may add.
    pub expression_count: usize,
    /// `(2 + |roles|)·N² + |expressions|·N`
    pub size_bound: usize,
}

/// Expressions occurring on the branch (subterms included) plus `[r]0 s`
/// for every `[s']0 s` on it with `r ⊑* s'`.
pub fn s_prime_of(b: &Branch) -> BTreeSet<ExprId> {
    let ctx = b.context();
    let mut mark = vec![false; ctx.expr_count()];
    for f in b.formulas() {
        if let BranchFormula::Label(e, _) = f {
            mark[e.index()] = true;
        }
    }
    // children are interned before their parents
    for i in (0..mark.len()).rev() {
        if mark[i] {
            for c in ctx.subterms(ExprId(i as u32)) {
                mark[c.index()] = true;
            }
        }
    }
    let mut out: BTreeSet<ExprId> = (0..mark.len())
        .filter(|&i| mark[i])
        .map(|i| ExprId(i as u32))
        .collect();
    let boxes: Vec<_> = out
        .iter()
        .filter_map(|&id| match ctx.node(id) {
            Node::Box(s, 0, t) => Some((s, t)),
            _ => None,
        })
        .collect();
    for (s, t) in boxes {
        for r in ctx.roles() {
            if ctx.sub_role(r, s) {
                out.insert(ctx.lookup(Node::Box(r, 0, t)).expect("interned"));
            }
        }
    }
    out
}

pub fn metrics(b: &Branch) -> TerminationMetrics {
    let ctx = b.context();
    let exprs = s_prime_of(b);
    let succ: Box<Successors> = if ctx.extended() {
        Box::new(induced_successors(b))
    } else {
        Box::new(raw_successors(b))
    };
    let mut all: BTreeSet<ExprId> = ctx.initial_expressions().clone();
    all.extend(exprs.iter().copied());
    let any_nominal = b.classes().next();
    let psi_e = match any_nominal {
        None => 0,
        Some(x) => all
            .iter()
            .filter(|&&e| matches!(ctx.node(e), Node::Exists(..)))
            .filter(|&&e| !label_condition(b, e, x, &*succ))
            .count(),
    };
    let diamonds: Vec<ExprId> = all
        .iter()
        .copied()
        .filter(|&e| matches!(ctx.node(e), Node::Diamond(..)))
        .collect();
    let mut psi_diamond = 0;
    for x in b.classes().filter(|&x| b.has_successor(x)) {
        psi_diamond += diamonds
            .iter()
            .filter(|&&e| !label_condition(b, e, x, &*succ))
            .count();
    }
    let mut expanded_patterns = BTreeMap::new();
    if ctx.extended() {
        let owned: BTreeSet<Pattern> = b
            .classes()
            .filter(|&c| b.has_successor(c))
            .map(|c| b.pattern_of(c, PatternMode::Extended))
            .collect();
        expanded_patterns.insert("*".to_string(), owned.len());
    } else {
        for r in ctx.roles() {
            let owned: BTreeSet<Pattern> = b
                .classes()
                .filter(|&c| b.has_role_successor(c, r))
                .map(|c| b.pattern_of(c, PatternMode::Basic(r)))
                .collect();
            expanded_patterns.insert(ctx.role_name(r).to_string(), owned.len());
        }
    }
    let n = b.nominal_count();
    TerminationMetrics {
        psi_e,
        psi_diamond,
        expanded_patterns,
        branch_size: b.size(),
        nominal_count: n,
        class_count: b.class_count(),
        expression_count: exprs.len(),
        size_bound: (2 + ctx.role_count()) * n * n + exprs.len().max(all.len()) * n,
    }
}

/// An `R◇` application is pattern-expanding when the principal's pattern is
/// not expanded before it.
pub fn pattern_expanding(b: &Branch, inst: &RuleInstance) -> bool {
    if inst.rule != RuleId::Diamond {
        return false;
    }
    let BranchFormula::Label(e, x) = inst.principal else {
        return false;
    };
    let Node::Diamond(r, _, _) = b.context().node(e) else {
        return false;
    };
    let mode = super::pattern_mode(b, r);
    !b.pattern_expanded(&b.pattern_of(x, mode), mode)
}

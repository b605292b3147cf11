//! Evidence, pre-evidence and quasi-evidence checks.

use std::collections::BTreeSet;

use crate::branch::{Branch, BranchFormula, ExprId, Node, NomId, PatternMode, RoleId};

/// Successor relation an evidence check quantifies over.
pub type Successors<'a> = dyn Fn(NomId, RoleId) -> BTreeSet<NomId> + 'a;

pub fn raw_successors(b: &Branch) -> impl Fn(NomId, RoleId) -> BTreeSet<NomId> + '_ {
    |x, r| b.edge_targets(x, r).cloned().unwrap_or_default()
}

pub fn induced_successors(b: &Branch) -> impl Fn(NomId, RoleId) -> BTreeSet<NomId> + '_ {
    |x, r| b.induced_successors_reflexive(x, r)
}

/// Are there `need` nominals, drawn from the given classes, that are pairwise
/// declared distinct? A class supplies more than one member only if it is
/// declared distinct from itself.
pub fn distinct_witnesses(b: &Branch, classes: &[NomId], need: usize) -> bool {
    fn weight(b: &Branch, c: NomId) -> usize {
        if b.distinct(c, c) {
            b.members(c).len()
        } else {
            1
        }
    }
    fn go(b: &Branch, cs: &[NomId], from: usize, chosen: &mut Vec<NomId>, total: usize, need: usize) -> bool {
        if total >= need {
            return true;
        }
        let rest: usize = cs[from..].iter().map(|&c| weight(b, c)).sum();
        if total + rest < need {
            return false;
        }
        for i in from..cs.len() {
            let c = cs[i];
            if chosen.iter().all(|&d| b.distinct(c, d)) {
                chosen.push(c);
                if go(b, cs, i + 1, chosen, total + weight(b, c), need) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if need == 0 {
        return true;
    }
    if need == 1 {
        return !classes.is_empty();
    }
    go(b, classes, 0, &mut Vec::new(), 0, need)
}

/// Right-hand side of the evidence condition for `e x`, with diamonds and
/// boxes quantifying over `succ`.
pub fn label_condition(b: &Branch, e: ExprId, x: NomId, succ: &Successors) -> bool {
    let ctx = b.context();
    match ctx.node(e) {
        Node::Prop(_) => true,
        Node::NegProp(p) => ctx
            .lookup(Node::Prop(p))
            .is_none_or(|pos| !b.has_label(pos, x)),
        Node::Nom(y) => b.equivalent(x, y),
        Node::NegNom(y) => !b.equivalent(x, y),
        Node::And(s, t) => b.has_label(s, x) && b.has_label(t, x),
        Node::Or(s, t) => b.has_label(s, x) || b.has_label(t, x),
        Node::Diamond(r, n, t) => {
            let ys: Vec<NomId> = succ(x, r).into_iter().filter(|&y| b.has_label(t, y)).collect();
            distinct_witnesses(b, &ys, n as usize + 1)
        }
        Node::Box(r, n, t) => {
            succ(x, r).into_iter().filter(|&y| !b.has_label(t, y)).count() <= n as usize
        }
        Node::Exists(n, t) => {
            let ys: Vec<NomId> = b.classes().filter(|&y| b.has_label(t, y)).collect();
            distinct_witnesses(b, &ys, n as usize + 1)
        }
        Node::Forall(n, t) => b.classes().filter(|&y| !b.has_label(t, y)).count() <= n as usize,
    }
}

fn formula_condition(b: &Branch, f: &BranchFormula, succ: &Successors) -> bool {
    match *f {
        BranchFormula::Label(e, x) => label_condition(b, e, x, succ),
        BranchFormula::Neq(x, y) => !b.equivalent(x, y),
        BranchFormula::Edge(..) | BranchFormula::Eq(..) => true,
        BranchFormula::Falsum => false,
    }
}

pub fn evident(b: &Branch, f: &BranchFormula) -> bool {
    formula_condition(b, f, &raw_successors(b))
}

pub fn pre_evident(b: &Branch, f: &BranchFormula) -> bool {
    formula_condition(b, f, &induced_successors(b))
}

/// Evidence as the active calculus understands it: plain evidence in basic
/// mode, pre-evidence with role assertions.
pub fn evident_in_mode(b: &Branch, f: &BranchFormula) -> bool {
    if b.context().extended() {
        pre_evident(b, f)
    } else {
        evident(b, f)
    }
}

/// Pre-evidence of `Tr`: every `[s]0 t x` with `r ⊑* s` propagates `[r]0 t`
/// along the induced `r`-successors of `x`.
pub fn pre_evident_transitive(b: &Branch, r: RoleId) -> Result<(), String> {
    let ctx = b.context();
    for x in b.classes() {
        for &e in b.labels(x) {
            if let Node::Box(s, 0, t) = ctx.node(e) {
                if !ctx.sub_role(r, s) {
                    continue;
                }
                let target = ctx.lookup(Node::Box(r, 0, t));
                for y in b.induced_successors_reflexive(x, r) {
                    if !target.is_some_and(|id| b.has_label(id, y)) {
                        return Err(format!(
                            "[{}]0 {} missing at {}",
                            ctx.role_name(r),
                            ctx.show(t),
                            ctx.nominal_name(y)
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn pattern_mode(b: &Branch, diamond_role: RoleId) -> PatternMode {
    if b.context().extended() {
        PatternMode::Extended
    } else {
        PatternMode::Basic(diamond_role)
    }
}

/// The blocking escape of a diamond at `x`: `x` has no successor (of the
/// diamond's role in basic mode, of any role otherwise) and its pattern is
/// expanded.
pub fn blocked(b: &Branch, r: RoleId, x: NomId) -> bool {
    let mode = pattern_mode(b, r);
    let free = match mode {
        PatternMode::Basic(r) => !b.has_role_successor(x, r),
        PatternMode::Extended => !b.has_successor(x),
    };
    free && b.pattern_expanded(&b.pattern_of(x, mode), mode)
}

/// `e x` must be a diamond label.
pub fn quasi_evident_diamond(b: &Branch, e: ExprId, x: NomId) -> bool {
    let Node::Diamond(r, _, _) = b.context().node(e) else {
        panic!("quasi_evident_diamond on a non-diamond");
    };
    evident_in_mode(b, &BranchFormula::Label(e, x)) || blocked(b, r, x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionFailure {
    pub condition: &'static str,
    pub formula: String,
}

impl std::fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} condition violated by {}", self.condition, self.formula)
    }
}

pub fn condition_name(b: &Branch, f: &BranchFormula) -> &'static str {
    match *f {
        BranchFormula::Label(e, _) => match b.context().node(e) {
            Node::Prop(_) => "proposition",
            Node::NegProp(_) => "negated proposition",
            Node::Nom(_) => "nominal",
            Node::NegNom(_) => "negated nominal",
            Node::And(..) => "conjunction",
            Node::Or(..) => "disjunction",
            Node::Diamond(..) => "diamond",
            Node::Box(..) => "box",
            Node::Exists(..) => "exists",
            Node::Forall(..) => "forall",
        },
        BranchFormula::Edge(..) => "edge",
        BranchFormula::Eq(..) => "equation",
        BranchFormula::Neq(..) => "disequation",
        BranchFormula::Falsum => "falsum",
    }
}

/// Full quasi-evidence check of an open branch.
pub fn quasi_evidence_audit(b: &Branch) -> Result<(), ConditionFailure> {
    if b.is_closed() {
        return Err(ConditionFailure {
            condition: "open branch",
            formula: "⊥".into(),
        });
    }
    let ctx = b.context();
    for f in b.formulas() {
        let ok = match *f {
            BranchFormula::Label(e, x) if matches!(ctx.node(e), Node::Diamond(..)) => {
                quasi_evident_diamond(b, e, x)
            }
            _ => evident_in_mode(b, f),
        };
        if !ok {
            let condition = match condition_name(b, f) {
                "diamond" => "diamond quasi-evidence",
                other => other,
            };
            return Err(ConditionFailure {
                condition,
                formula: b.show(f),
            });
        }
    }
    for r in ctx.roles().filter(|&r| ctx.is_transitive(r)) {
        pre_evident_transitive(b, r).map_err(|detail| ConditionFailure {
            condition: "transitivity",
            formula: format!("trans {}: {detail}", ctx.role_name(r)),
        })?;
    }
    Ok(())
}

/// Full (pre-)evidence check: like the quasi-evidence audit but without the
/// blocking escape for diamonds.
pub fn evidence_audit_in_mode(b: &Branch) -> Result<(), ConditionFailure> {
    let ctx = b.context();
    for f in b.formulas() {
        if !evident_in_mode(b, f) {
            return Err(ConditionFailure {
                condition: condition_name(b, f),
                formula: b.show(f),
            });
        }
    }
    for r in ctx.roles().filter(|&r| ctx.is_transitive(r)) {
        pre_evident_transitive(b, r).map_err(|detail| ConditionFailure {
            condition: "transitivity",
            formula: format!("trans {}: {detail}", ctx.role_name(r)),
        })?;
    }
    Ok(())
}

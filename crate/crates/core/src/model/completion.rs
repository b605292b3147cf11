//! From a quasi-evident branch to an evident edge set.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::branch::{Branch, BranchFormula, Node, NomId, RoleId};
use crate::calculus::{
    evident_in_mode, label_condition, pattern_mode, quasi_evidence_audit, ConditionFailure,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("branch is not quasi-evident: {0}")]
    NotQuasiEvident(ConditionFailure),
    #[error("no class expands the pattern of {0}")]
    NoExpandingClass(String),
    #[error("completion made no progress on {0}")]
    CompletionStuck(String),
    #[error("completed branch is not pre-evident: {0}")]
    NotPreEvident(ConditionFailure),
    #[error("evidence closure is not evident: {0}")]
    NotEvident(ConditionFailure),
    #[error("simple role {role}: {detail}")]
    SimpleRole { role: String, detail: String },
}

impl ModelError {
    /// Name of the violated condition, for reporting.
    pub fn condition(&self) -> &str {
        match self {
            ModelError::NotQuasiEvident(c) | ModelError::NotPreEvident(c) | ModelError::NotEvident(c) => {
                c.condition
            }
            ModelError::NoExpandingClass(_) => "pattern expansion",
            ModelError::CompletionStuck(_) => "completion measure",
            ModelError::SimpleRole { .. } => "simple role edges",
        }
    }
}

/// Diamonds on the branch that are not (pre-)evident.
pub fn phi(b: &Branch) -> usize {
    b.formulas()
        .iter()
        .filter(|f| matches!(f, BranchFormula::Label(e, _) if matches!(b.context().node(*e), Node::Diamond(..))))
        .filter(|f| !evident_in_mode(b, f))
        .count()
}

/// Adds edge copies until every diamond is (pre-)evident. Each round takes
/// the first non-evident diamond `<r>n t x` and the first class `y` that
/// expands the pattern of `x`, and adds `r' x z` for every `r' y z` (only
/// `r' = r` without role assertions).
pub fn complete_to_pre_evident(b: &Branch) -> Result<Branch, ModelError> {
    quasi_evidence_audit(b).map_err(ModelError::NotQuasiEvident)?;
    let mut b = b.clone();
    let mut measure = phi(&b);
    while measure > 0 {
        let (f, r, x) = b
            .formulas()
            .iter()
            .find_map(|&f| match f {
                BranchFormula::Label(e, x) => match b.context().node(e) {
                    Node::Diamond(r, _, _) if !evident_in_mode(&b, &f) => Some((f, r, x)),
                    _ => None,
                },
                _ => None,
            })
            .expect("phi counts a diamond");
        let mode = pattern_mode(&b, r);
        let y = b
            .expanding_class(&b.pattern_of(x, mode), mode)
            .ok_or_else(|| ModelError::NoExpandingClass(b.show(&f)))?;
        let copies: Vec<BranchFormula> = b
            .out_edges(y)
            .iter()
            .filter(|(&s, _)| b.context().extended() || s == r)
            .flat_map(|(&s, zs)| zs.iter().map(move |&z| BranchFormula::Edge(s, x, z)))
            .collect();
        for e in copies {
            b.add(e);
        }
        let next = phi(&b);
        if next >= measure {
            return Err(ModelError::CompletionStuck(b.show(&f)));
        }
        measure = next;
    }
    crate::calculus::evidence_audit_in_mode(&b).map_err(ModelError::NotPreEvident)?;
    Ok(b)
}

/// Edges between class representatives after materializing reflexivity,
/// inclusion and transitivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvidenceClosure {
    edges: BTreeMap<RoleId, BTreeSet<(NomId, NomId)>>,
}

impl EvidenceClosure {
    pub fn edges(&self, r: RoleId) -> impl Iterator<Item = (NomId, NomId)> + '_ {
        self.edges.get(&r).into_iter().flatten().copied()
    }

    pub fn contains(&self, r: RoleId, x: NomId, y: NomId) -> bool {
        self.edges.get(&r).is_some_and(|s| s.contains(&(x, y)))
    }

    /// Successor representatives of the representative `x`.
    pub fn successors(&self, x: NomId, r: RoleId) -> BTreeSet<NomId> {
        self.edges
            .get(&r)
            .map(|s| s.range((x, NomId(0))..=(x, NomId(u32::MAX))).map(|&(_, y)| y).collect())
            .unwrap_or_default()
    }
}

/// The least edge set containing the branch's edges that is closed under
/// the role assertions.
pub fn evidence_closure(b: &Branch) -> EvidenceClosure {
    let ctx = b.context();
    let classes: Vec<NomId> = b.classes().collect();
    let mut edges: BTreeMap<RoleId, BTreeSet<(NomId, NomId)>> =
        ctx.roles().map(|r| (r, BTreeSet::new())).collect();
    for &x in &classes {
        for (&r, ys) in b.out_edges(x) {
            edges.get_mut(&r).unwrap().extend(ys.iter().map(|&y| (x, y)));
        }
    }
    loop {
        let mut changed = false;
        for r in ctx.roles().filter(|&r| ctx.is_reflexive(r)) {
            for &x in &classes {
                changed |= edges.get_mut(&r).unwrap().insert((x, x));
            }
        }
        for &(r, s) in ctx.inclusions() {
            let sub: Vec<_> = edges[&r].iter().copied().collect();
            let sup = edges.get_mut(&s).unwrap();
            for e in sub {
                changed |= sup.insert(e);
            }
        }
        for r in ctx.roles().filter(|&r| ctx.is_transitive(r)) {
            let set = edges.get_mut(&r).unwrap();
            loop {
                let add: Vec<(NomId, NomId)> = set
                    .iter()
                    .flat_map(|&(x, y)| {
                        set.range((y, NomId(0))..=(y, NomId(u32::MAX)))
                            .map(move |&(_, z)| (x, z))
                    })
                    .filter(|e| !set.contains(e))
                    .collect();
                if add.is_empty() {
                    break;
                }
                changed = true;
                set.extend(add);
            }
        }
        if !changed {
            break;
        }
    }
    EvidenceClosure { edges }
}

/// Every evidence condition of the branch with successors taken from the
/// closure, plus the conditions of the role assertions.
pub fn closure_audit(b: &Branch, g: &EvidenceClosure) -> Result<(), ConditionFailure> {
    let ctx = b.context();
    let succ = |x: NomId, r: RoleId| g.successors(b.rep(x), r);
    for f in b.formulas() {
        let ok = match *f {
            BranchFormula::Label(e, x) => label_condition(b, e, x, &succ),
            BranchFormula::Neq(x, y) => !b.equivalent(x, y),
            BranchFormula::Falsum => false,
            _ => true,
        };
        if !ok {
            return Err(ConditionFailure {
                condition: crate::calculus::condition_name(b, f),
                formula: b.show(f),
            });
        }
    }
    let fail = |condition, formula: String| Err(ConditionFailure { condition, formula });
    for &(r, s) in ctx.inclusions() {
        if let Some((x, y)) = g.edges(r).find(|&(x, y)| !g.contains(s, x, y)) {
            return fail(
                "inclusion",
                format!("{} <= {} at ({}, {})", ctx.role_name(r), ctx.role_name(s), ctx.nominal_name(x), ctx.nominal_name(y)),
            );
        }
    }
    for r in ctx.roles() {
        if ctx.is_reflexive(r) {
            if let Some(x) = b.classes().find(|&x| !g.contains(r, x, x)) {
                return fail("reflexivity", format!("refl {} at {}", ctx.role_name(r), ctx.nominal_name(x)));
            }
        }
        if ctx.is_transitive(r) {
            for (x, y) in g.edges(r) {
                if let Some(z) = g.successors(y, r).into_iter().find(|&z| !g.contains(r, x, z)) {
                    return fail(
                        "transitivity",
                        format!(
                            "trans {} at ({}, {}, {})",
                            ctx.role_name(r),
                            ctx.nominal_name(x),
                            ctx.nominal_name(y),
                            ctx.nominal_name(z)
                        ),
                    );
                }
            }
        }
    }
    Ok(())
}

/// For simple roles the closure adds nothing beyond the induced relation:
/// `r x y` is in the closure iff `y` is an induced successor of `x`
/// (reflexive loops included).
pub fn simple_role_audit(b: &Branch, g: &EvidenceClosure) -> Result<(), ModelError> {
    let ctx = b.context();
    for r in ctx.roles().filter(|&r| ctx.is_simple(r)) {
        for x in b.classes() {
            let induced = b.induced_successors_reflexive(x, r);
            let closed = g.successors(x, r);
            if induced != closed {
                let names = |s: &BTreeSet<NomId>| {
                    s.iter().map(|&y| ctx.nominal_name(y)).collect::<Vec<_>>().join(", ")
                };
                return Err(ModelError::SimpleRole {
                    role: ctx.role_name(r).to_string(),
                    detail: format!(
                        "closure successors of {} are {{{}}}, induced {{{}}}",
                        ctx.nominal_name(x),
                        names(&closed),
                        names(&induced)
                    ),
                });
            }
        }
    }
    Ok(())
}

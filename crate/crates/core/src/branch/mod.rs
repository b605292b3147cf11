//! Cumulative branch store with nominal classes and closure queries.
//!
//! The equational closure is never materialized. Every nominal belongs to a
//! class whose representative is its member with the lowest creation index,
//! and all indexes are keyed by representatives.

mod context;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use context::{Context, ExprId, Node, NomId, PropId, RoleId};

use crate::syntax::{parse_problem, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BranchFormula {
    Label(ExprId, NomId),
    Edge(RoleId, NomId, NomId),
    Eq(NomId, NomId),
    Neq(NomId, NomId),
    Falsum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    Proper,
    Redundant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchEvent {
    Added(BranchFormula),
    /// `(kept, absorbed)` representatives.
    Merged(NomId, NomId),
}

/// Which patterns are compared: per role, or all modal labels at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternMode {
    Basic(RoleId),
    Extended,
}

/// Diamonds and boxes labeling one nominal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(pub BTreeSet<ExprId>);

impl Pattern {
    pub fn is_subset(&self, other: &Pattern) -> bool {
        self.0.is_subset(&other.0)
    }
}

#[derive(Clone)]
pub struct Branch {
    ctx: Arc<Context>,
    formulas: Vec<BranchFormula>,
    rep: Vec<NomId>,
    /// Members per representative; empty for non-representatives.
    members: Vec<Vec<NomId>>,
    labels: Vec<BTreeSet<ExprId>>,
    succ: Vec<BTreeMap<RoleId, BTreeSet<NomId>>>,
    /// Normalized `(min, max)` pairs of representatives.
    diseq: BTreeSet<(NomId, NomId)>,
    closed: bool,
    events: Vec<BranchEvent>,
}

impl Branch {
    /// An empty branch over the nominals of the context's problem.
    pub fn empty(ctx: Arc<Context>) -> Branch {
        let mut b = Branch {
            ctx,
            formulas: Vec::new(),
            rep: Vec::new(),
            members: Vec::new(),
            labels: Vec::new(),
            succ: Vec::new(),
            diseq: BTreeSet::new(),
            closed: false,
            events: Vec::new(),
        };
        let k = b.ctx.input_nominal_count();
        b.fresh_nominals(k);
        b
    }

    /// The initial branch of a problem.
    pub fn from_problem(p: &Problem) -> Branch {
        let ctx = Arc::new(Context::new(p));
        let mut b = Branch::empty(ctx.clone());
        let nom = |x: &String| ctx.nominal_id(x).expect("problem nominal");
        for (e, x) in &p.labels {
            let id = ctx.expr_id(e).expect("interned label");
            b.add(BranchFormula::Label(id, nom(x)));
        }
        for (r, x, y) in &p.edges {
            let r = ctx.role_id(r).expect("problem role");
            b.add(BranchFormula::Edge(r, nom(x), nom(y)));
        }
        for (x, y) in &p.equations {
            b.add(BranchFormula::Eq(nom(x), nom(y)));
        }
        for (x, y) in &p.disequations {
            b.add(BranchFormula::Neq(nom(x), nom(y)));
        }
        b
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn formulas(&self) -> &[BranchFormula] {
        &self.formulas
    }

    pub fn events(&self) -> &[BranchEvent] {
        &self.events
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Number of formulas, not counting `⊥`.
    pub fn size(&self) -> usize {
        self.formulas.len() - usize::from(self.closed)
    }

    pub fn nominal_count(&self) -> usize {
        self.rep.len()
    }

    pub fn nominals(&self) -> impl Iterator<Item = NomId> {
        (0..self.rep.len() as u32).map(NomId)
    }

    pub fn rep(&self, x: NomId) -> NomId {
        self.rep[x.index()]
    }

    /// Class representatives in ascending creation order.
    pub fn classes(&self) -> impl Iterator<Item = NomId> + '_ {
        self.nominals().filter(|&x| self.rep[x.index()] == x)
    }

    pub fn class_count(&self) -> usize {
        self.classes().count()
    }

    pub fn members(&self, x: NomId) -> &[NomId] {
        &self.members[self.rep(x).index()]
    }

    /// Expressions `t` with `t x` in the closure.
    pub fn labels(&self, x: NomId) -> &BTreeSet<ExprId> {
        &self.labels[self.rep(x).index()]
    }

    pub fn has_label(&self, e: ExprId, x: NomId) -> bool {
        self.labels(x).contains(&e)
    }

    /// Representatives `y` with `r x y` in the closure.
    pub fn edge_targets(&self, x: NomId, r: RoleId) -> Option<&BTreeSet<NomId>> {
        self.succ[self.rep(x).index()].get(&r)
    }

    /// All outgoing edges of the class of `x`, keyed by role.
    pub fn out_edges(&self, x: NomId) -> &BTreeMap<RoleId, BTreeSet<NomId>> {
        &self.succ[self.rep(x).index()]
    }

    /// `x` has an outgoing edge for some role.
    pub fn has_successor(&self, x: NomId) -> bool {
        !self.out_edges(x).is_empty()
    }

    pub fn has_role_successor(&self, x: NomId, r: RoleId) -> bool {
        self.edge_targets(x, r).is_some_and(|s| !s.is_empty())
    }

    pub fn distinct(&self, x: NomId, y: NomId) -> bool {
        let (a, b) = (self.rep(x), self.rep(y));
        self.diseq.contains(&(a.min(b), a.max(b)))
    }

    pub fn closure_contains(&self, f: &BranchFormula) -> bool {
        match *f {
            BranchFormula::Label(e, x) => self.known(x) && self.has_label(e, x),
            BranchFormula::Edge(r, x, y) => {
                self.known(x)
                    && self.known(y)
                    && self.edge_targets(x, r).is_some_and(|s| s.contains(&self.rep(y)))
            }
            BranchFormula::Eq(x, y) => self.known(x) && self.known(y) && self.equivalent(x, y),
            BranchFormula::Neq(x, y) => self.known(x) && self.known(y) && self.distinct(x, y),
            BranchFormula::Falsum => self.closed,
        }
    }

    fn known(&self, x: NomId) -> bool {
        x.index() < self.rep.len()
    }

    pub fn equivalent(&self, x: NomId, y: NomId) -> bool {
        self.rep(x) == self.rep(y)
    }

    /// `D Y`: every two distinct nominals of `Y` are declared distinct.
    pub fn pairwise_distinct(&self, ys: &[NomId]) -> bool {
        let set: BTreeSet<NomId> = ys.iter().copied().collect();
        let v: Vec<NomId> = set.into_iter().collect();
        v.iter()
            .enumerate()
            .all(|(i, &a)| v[i + 1..].iter().all(|&b| self.distinct(a, b)))
    }

    /// Adds a formula. Returns `Redundant` (and changes nothing) when the
    /// formula is already in the closure.
    pub fn add(&mut self, f: BranchFormula) -> Extension {
        for x in nominals_of(&f) {
            assert!(self.known(x), "nominal {x:?} not allocated on this branch");
        }
        if self.closure_contains(&f) {
            return Extension::Redundant;
        }
        self.formulas.push(f);
        self.events.push(BranchEvent::Added(f));
        match f {
            BranchFormula::Label(e, x) => {
                let r = self.rep(x);
                self.labels[r.index()].insert(e);
            }
            BranchFormula::Edge(role, x, y) => {
                let (a, b) = (self.rep(x), self.rep(y));
                self.succ[a.index()].entry(role).or_default().insert(b);
            }
            BranchFormula::Eq(x, y) => self.merge(x, y),
            BranchFormula::Neq(x, y) => {
                let (a, b) = (self.rep(x), self.rep(y));
                self.diseq.insert((a.min(b), a.max(b)));
            }
            BranchFormula::Falsum => self.closed = true,
        }
        Extension::Proper
    }

    fn merge(&mut self, x: NomId, y: NomId) {
        let (a, b) = (self.rep(x), self.rep(y));
        let (keep, gone) = (a.min(b), a.max(b));
        self.events.push(BranchEvent::Merged(keep, gone));
        let moved = std::mem::take(&mut self.members[gone.index()]);
        for &m in &moved {
            self.rep[m.index()] = keep;
        }
        self.members[keep.index()].extend(moved);
        self.members[keep.index()].sort();
        let labels = std::mem::take(&mut self.labels[gone.index()]);
        self.labels[keep.index()].extend(labels);
        let edges = std::mem::take(&mut self.succ[gone.index()]);
        for (r, targets) in edges {
            self.succ[keep.index()].entry(r).or_default().extend(targets);
        }
        for map in &mut self.succ {
            for targets in map.values_mut() {
                if targets.remove(&gone) {
                    targets.insert(keep);
                }
            }
        }
        self.diseq = std::mem::take(&mut self.diseq)
            .into_iter()
            .map(|(p, q)| {
                let p = if p == gone { keep } else { p };
                let q = if q == gone { keep } else { q };
                (p.min(q), p.max(q))
            })
            .collect();
    }

    /// Allocates `k` fresh nominals and returns them.
    pub fn fresh_nominals(&mut self, k: usize) -> Vec<NomId> {
        let start = self.rep.len() as u32;
        let ids: Vec<NomId> = (start..start + k as u32).map(NomId).collect();
        for &x in &ids {
            self.rep.push(x);
            self.members.push(vec![x]);
            self.labels.push(BTreeSet::new());
            self.succ.push(BTreeMap::new());
        }
        ids
    }

    /// The ids the next call to `fresh_nominals(k)` will return.
    pub fn peek_fresh(&self, k: usize) -> Vec<NomId> {
        let start = self.rep.len() as u32;
        (start..start + k as u32).map(NomId).collect()
    }

    /// Representatives `y` with `x ▷r y`: an edge of some sub-role of `r`.
    pub fn induced_successors(&self, x: NomId, r: RoleId) -> BTreeSet<NomId> {
        let mut out = BTreeSet::new();
        for (&s, targets) in self.out_edges(x) {
            if self.ctx.sub_role(s, r) {
                out.extend(targets.iter().copied());
            }
        }
        out
    }

    /// `induced_successors` plus the class of `x` itself when some sub-role
    /// of `r` is reflexive.
    pub fn induced_successors_reflexive(&self, x: NomId, r: RoleId) -> BTreeSet<NomId> {
        let mut out = self.induced_successors(x, r);
        if self.ctx.reflexive_reach(r) {
            out.insert(self.rep(x));
        }
        out
    }

    pub fn pattern_of(&self, x: NomId, mode: PatternMode) -> Pattern {
        Pattern(
            self.labels(x)
                .iter()
                .copied()
                .filter(|&e| {
                    let node = self.ctx.node(e);
                    match mode {
                        PatternMode::Basic(r) => node.is_modal() && node.role() == Some(r),
                        PatternMode::Extended => node.is_modal(),
                    }
                })
                .collect(),
        )
    }

    /// The first class (ascending) that expands `p`, if any.
    pub fn expanding_class(&self, p: &Pattern, mode: PatternMode) -> Option<NomId> {
        self.classes().find(|&c| {
            let has = match mode {
                PatternMode::Basic(r) => self.has_role_successor(c, r),
                PatternMode::Extended => self.has_successor(c),
            };
            has && p.is_subset(&self.pattern_of(c, mode))
        })
    }

    pub fn pattern_expanded(&self, p: &Pattern, mode: PatternMode) -> bool {
        self.expanding_class(p, mode).is_some()
    }

    /// Recomputes every index from the formula list and compares.
    pub fn audit_indexes(&self) -> Result<(), String> {
        let n = self.rep.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for f in &self.formulas {
            if let BranchFormula::Eq(x, y) = *f {
                let (a, b) = (find(&mut parent, x.index()), find(&mut parent, y.index()));
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
        let rep: Vec<NomId> = (0..n)
            .map(|i| {
                // lowest member of the class
                let root = find(&mut parent, i);
                (0..n)
                    .find(|&j| find(&mut parent, j) == root)
                    .map(|j| NomId(j as u32))
                    .unwrap()
            })
            .collect();
        if rep != self.rep {
            return Err("class representatives disagree with equations".into());
        }
        let mut labels = vec![BTreeSet::new(); n];
        let mut succ: Vec<BTreeMap<RoleId, BTreeSet<NomId>>> = vec![BTreeMap::new(); n];
        let mut diseq = BTreeSet::new();
        let mut closed = false;
        for f in &self.formulas {
            match *f {
                BranchFormula::Label(e, x) => {
                    labels[rep[x.index()].index()].insert(e);
                }
                BranchFormula::Edge(r, x, y) => {
                    succ[rep[x.index()].index()]
                        .entry(r)
                        .or_default()
                        .insert(rep[y.index()]);
                }
                BranchFormula::Neq(x, y) => {
                    let (a, b) = (rep[x.index()], rep[y.index()]);
                    diseq.insert((a.min(b), a.max(b)));
                }
                BranchFormula::Eq(..) => {}
                BranchFormula::Falsum => closed = true,
            }
        }
        if labels != self.labels {
            return Err("label index disagrees with formulas".into());
        }
        if succ != self.succ {
            return Err("edge index disagrees with formulas".into());
        }
        if diseq != self.diseq {
            return Err("disequation index disagrees with formulas".into());
        }
        if closed != self.closed {
            return Err("closed flag disagrees with formulas".into());
        }
        for x in self.nominals() {
            let r = self.rep(x);
            if !self.members[r.index()].contains(&x) {
                return Err(format!("{x:?} missing from its class"));
            }
        }
        Ok(())
    }

    /// The branch as a problem (labels, edges, equations, disequations and
    /// the original role assertions). `⊥` has no counterpart and is dropped.
    pub fn to_problem(&self) -> Problem {
        let ctx = &self.ctx;
        let src = ctx.problem();
        let mut p = Problem {
            inclusions: src.inclusions.clone(),
            reflexive: src.reflexive.clone(),
            transitive: src.transitive.clone(),
            ..Problem::default()
        };
        for f in &self.formulas {
            match *f {
                BranchFormula::Label(e, x) => p.labels.push((ctx.expression(e), ctx.nominal_name(x))),
                BranchFormula::Edge(r, x, y) => p.edges.push((
                    ctx.role_name(r).to_string(),
                    ctx.nominal_name(x),
                    ctx.nominal_name(y),
                )),
                BranchFormula::Eq(x, y) => p.equations.push((ctx.nominal_name(x), ctx.nominal_name(y))),
                BranchFormula::Neq(x, y) => {
                    p.disequations.push((ctx.nominal_name(x), ctx.nominal_name(y)))
                }
                BranchFormula::Falsum => {}
            }
        }
        p
    }

    /// Parses a single declaration (`at x: t`, `r(x, y)`, `x = y`, `x != y`)
    /// against this branch's context. Every name must already be known.
    pub fn parse_formula(&self, text: &str) -> Result<BranchFormula, String> {
        let p = parse_problem(text).map_err(|e| e.to_string())?;
        let ctx = &self.ctx;
        let nom = |x: &String| {
            ctx.nominal_id(x)
                .filter(|n| self.known(*n))
                .ok_or_else(|| format!("unknown nominal `{x}`"))
        };
        if let Some((e, x)) = p.labels.first() {
            let id = ctx
                .expr_id(e)
                .ok_or_else(|| format!("expression `{e}` does not occur in the problem"))?;
            return Ok(BranchFormula::Label(id, nom(x)?));
        }
        if let Some((r, x, y)) = p.edges.first() {
            let r = ctx.role_id(r).ok_or_else(|| format!("unknown role `{r}`"))?;
            return Ok(BranchFormula::Edge(r, nom(x)?, nom(y)?));
        }
        if let Some((x, y)) = p.equations.first() {
            return Ok(BranchFormula::Eq(nom(x)?, nom(y)?));
        }
        if let Some((x, y)) = p.disequations.first() {
            return Ok(BranchFormula::Neq(nom(x)?, nom(y)?));
        }
        Err(format!("`{text}` is not a branch formula"))
    }

    /// Prints a formula in input syntax.
    pub fn show(&self, f: &BranchFormula) -> String {
        let ctx = &self.ctx;
        let n = |x: NomId| ctx.nominal_name(x);
        match *f {
            BranchFormula::Label(e, x) => format!("at {}: {}", n(x), ctx.show(e)),
            BranchFormula::Edge(r, x, y) => format!("{}({}, {})", ctx.role_name(r), n(x), n(y)),
            BranchFormula::Eq(x, y) => format!("{} = {}", n(x), n(y)),
            BranchFormula::Neq(x, y) => format!("{} != {}", n(x), n(y)),
            BranchFormula::Falsum => "⊥".to_string(),
        }
    }
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.formulas.iter().map(|x| self.show(x)))
            .finish()
    }
}

pub(crate) fn nominals_of(f: &BranchFormula) -> Vec<NomId> {
    match *f {
        BranchFormula::Label(_, x) => vec![x],
        BranchFormula::Edge(_, x, y) | BranchFormula::Eq(x, y) | BranchFormula::Neq(x, y) => {
            vec![x, y]
        }
        BranchFormula::Falsum => vec![],
    }
}

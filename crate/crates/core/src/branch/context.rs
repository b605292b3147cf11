//! Immutable per-problem data shared by every branch of a derivation.

use std::collections::{BTreeSet, HashMap};

use crate::syntax::{simple_roles, sub_role_closure, NnfExpression, Problem};

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(ExprId);
id_type!(RoleId);
id_type!(PropId);
id_type!(NomId);

/// Hash-consed expression node. Children are referenced by id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Prop(PropId),
    NegProp(PropId),
    Nom(NomId),
    NegNom(NomId),
    And(ExprId, ExprId),
    Or(ExprId, ExprId),
    Diamond(RoleId, u32, ExprId),
    Box(RoleId, u32, ExprId),
    Exists(u32, ExprId),
    Forall(u32, ExprId),
}

impl Node {
    pub fn is_modal(self) -> bool {
        matches!(self, Node::Diamond(..) | Node::Box(..))
    }

    pub fn role(self) -> Option<RoleId> {
        match self {
            Node::Diamond(r, _, _) | Node::Box(r, _, _) => Some(r),
            _ => None,
        }
    }

    fn children(self) -> Vec<ExprId> {
        match self {
            Node::And(a, b) | Node::Or(a, b) => vec![a, b],
            Node::Diamond(_, _, t) | Node::Box(_, _, t) | Node::Exists(_, t) | Node::Forall(_, t) => {
                vec![t]
            }
            _ => vec![],
        }
    }
}

#[derive(Debug)]
pub struct Context {
    problem: Problem,
    roles: Vec<String>,
    props: Vec<String>,
    nominals: Vec<String>,
    role_index: HashMap<String, RoleId>,
    prop_index: HashMap<String, PropId>,
    nominal_index: HashMap<String, NomId>,
    fresh_prefix: String,
    nodes: Vec<Node>,
    node_index: HashMap<Node, ExprId>,
    /// Pre-order first-occurrence rank over the initial labels.
    rank: Vec<u32>,
    /// Expressions occurring in the input, subterms included.
    initial: BTreeSet<ExprId>,
    /// `sub[r][s]` iff `r` is a sub-role of `s` (reflexive-transitive).
    sub: Vec<Vec<bool>>,
    reflexive: Vec<bool>,
    transitive: Vec<bool>,
    reflexive_reach: Vec<bool>,
    simple: Vec<bool>,
    inclusions: Vec<(RoleId, RoleId)>,
    extended: bool,
}

impl Context {
    pub fn new(problem: &Problem) -> Context {
        let roles = problem.roles();
        let props = problem.propositions();
        let nominals = problem.nominals();
        let role_index = index_of(&roles, RoleId);
        let prop_index = index_of(&props, PropId);
        let nominal_index = index_of(&nominals, NomId);

        let mut taken: BTreeSet<&str> = BTreeSet::new();
        taken.extend(roles.iter().map(String::as_str));
        taken.extend(props.iter().map(String::as_str));
        taken.extend(nominals.iter().map(String::as_str));
        let mut fresh_prefix = "v".to_string();
        while taken.iter().any(|n| {
            n.strip_prefix(fresh_prefix.as_str())
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        }) {
            fresh_prefix.push('_');
        }

        let closure = sub_role_closure(problem);
        let simple_set = simple_roles(problem);
        let n = roles.len();
        let mut sub = vec![vec![false; n]; n];
        for (r, sups) in &closure {
            for s in sups {
                sub[role_index[r].index()][role_index[s].index()] = true;
            }
        }
        let reflexive: Vec<bool> = roles.iter().map(|r| problem.reflexive.contains(r)).collect();
        let transitive: Vec<bool> = roles.iter().map(|r| problem.transitive.contains(r)).collect();
        let reflexive_reach = (0..n)
            .map(|r| (0..n).any(|s| sub[s][r] && reflexive[s]))
            .collect();
        let simple = roles.iter().map(|r| simple_set.contains(r)).collect();
        let inclusions = problem
            .inclusions
            .iter()
            .map(|(a, b)| (role_index[a], role_index[b]))
            .collect();

        let mut ctx = Context {
            problem: problem.clone(),
            roles,
            props,
            nominals,
            role_index,
            prop_index,
            nominal_index,
            fresh_prefix,
            nodes: Vec::new(),
            node_index: HashMap::new(),
            rank: Vec::new(),
            initial: BTreeSet::new(),
            sub,
            reflexive,
            transitive,
            reflexive_reach,
            simple,
            inclusions,
            extended: problem.has_role_assertions(),
        };

        let mut order = Vec::new();
        for (e, _) in &problem.labels {
            let id = ctx.intern(e);
            preorder(&ctx.nodes, id, &mut order);
        }
        ctx.initial = order.iter().copied().collect();
        // Boxes that RT may introduce: [r]0 s for r below some s-box role.
        let boxes: Vec<(RoleId, ExprId)> = ctx
            .initial
            .iter()
            .filter_map(|&id| match ctx.nodes[id.index()] {
                Node::Box(r, 0, t) => Some((r, t)),
                _ => None,
            })
            .collect();
        for (r, t) in boxes {
            for s in 0..n {
                if ctx.sub[s][r.index()] {
                    let id = ctx.intern_node(Node::Box(RoleId(s as u32), 0, t));
                    order.push(id);
                }
            }
        }
        ctx.rank = vec![u32::MAX; ctx.nodes.len()];
        let mut next = 0;
        for id in order {
            if ctx.rank[id.index()] == u32::MAX {
                ctx.rank[id.index()] = next;
                next += 1;
            }
        }
        ctx
    }

    fn intern_node(&mut self, node: Node) -> ExprId {
        if let Some(&id) = self.node_index.get(&node) {
            return id;
        }
        let id = ExprId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.node_index.insert(node, id);
        id
    }

    fn intern(&mut self, e: &NnfExpression) -> ExprId {
        let node = match e {
            NnfExpression::Prop(p) => Node::Prop(self.prop_index[p]),
            NnfExpression::NegProp(p) => Node::NegProp(self.prop_index[p]),
            NnfExpression::Nom(x) => Node::Nom(self.nominal_index[x]),
            NnfExpression::NegNom(x) => Node::NegNom(self.nominal_index[x]),
            NnfExpression::And(a, b) => Node::And(self.intern(a), self.intern(b)),
            NnfExpression::Or(a, b) => Node::Or(self.intern(a), self.intern(b)),
            NnfExpression::Diamond(r, n, t) => Node::Diamond(self.role_index[r], *n, self.intern(t)),
            NnfExpression::Box(r, n, t) => Node::Box(self.role_index[r], *n, self.intern(t)),
            NnfExpression::Exists(n, t) => Node::Exists(*n, self.intern(t)),
            NnfExpression::Forall(n, t) => Node::Forall(*n, self.intern(t)),
        };
        self.intern_node(node)
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn node(&self, id: ExprId) -> Node {
        self.nodes[id.index()]
    }

    pub fn expr_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn rank(&self, id: ExprId) -> u32 {
        self.rank[id.index()]
    }

    /// Expressions of the input (subterms included).
    pub fn initial_expressions(&self) -> &BTreeSet<ExprId> {
        &self.initial
    }

    /// Looks up an already interned node.
    pub fn lookup(&self, node: Node) -> Option<ExprId> {
        self.node_index.get(&node).copied()
    }

    /// Looks up an expression; `None` if it does not occur in the input.
    pub fn expr_id(&self, e: &NnfExpression) -> Option<ExprId> {
        let node = match e {
            NnfExpression::Prop(p) => Node::Prop(*self.prop_index.get(p)?),
            NnfExpression::NegProp(p) => Node::NegProp(*self.prop_index.get(p)?),
            NnfExpression::Nom(x) => Node::Nom(*self.nominal_index.get(x)?),
            NnfExpression::NegNom(x) => Node::NegNom(*self.nominal_index.get(x)?),
            NnfExpression::And(a, b) => Node::And(self.expr_id(a)?, self.expr_id(b)?),
            NnfExpression::Or(a, b) => Node::Or(self.expr_id(a)?, self.expr_id(b)?),
            NnfExpression::Diamond(r, n, t) => {
                Node::Diamond(*self.role_index.get(r)?, *n, self.expr_id(t)?)
            }
            NnfExpression::Box(r, n, t) => Node::Box(*self.role_index.get(r)?, *n, self.expr_id(t)?),
            NnfExpression::Exists(n, t) => Node::Exists(*n, self.expr_id(t)?),
            NnfExpression::Forall(n, t) => Node::Forall(*n, self.expr_id(t)?),
        };
        self.lookup(node)
    }

    pub fn expression(&self, id: ExprId) -> NnfExpression {
        let b = |id: ExprId| Box::new(self.expression(id));
        match self.node(id) {
            Node::Prop(p) => NnfExpression::Prop(self.props[p.index()].clone()),
            Node::NegProp(p) => NnfExpression::NegProp(self.props[p.index()].clone()),
            Node::Nom(x) => NnfExpression::Nom(self.nominal_name(x)),
            Node::NegNom(x) => NnfExpression::NegNom(self.nominal_name(x)),
            Node::And(a, c) => NnfExpression::And(b(a), b(c)),
            Node::Or(a, c) => NnfExpression::Or(b(a), b(c)),
            Node::Diamond(r, n, t) => NnfExpression::Diamond(self.role_name(r).into(), n, b(t)),
            Node::Box(r, n, t) => NnfExpression::Box(self.role_name(r).into(), n, b(t)),
            Node::Exists(n, t) => NnfExpression::Exists(n, b(t)),
            Node::Forall(n, t) => NnfExpression::Forall(n, b(t)),
        }
    }

    /// Sub-expressions of `id`, itself included.
    pub fn subterms(&self, id: ExprId) -> Vec<ExprId> {
        let mut out = Vec::new();
        preorder(&self.nodes, id, &mut out);
        out
    }

    pub fn roles(&self) -> impl Iterator<Item = RoleId> {
        (0..self.roles.len() as u32).map(RoleId)
    }

    pub fn role_count(&self) -> usize {
        self.roles.len()
    }

    pub fn role_name(&self, r: RoleId) -> &str {
        &self.roles[r.index()]
    }

    pub fn role_id(&self, name: &str) -> Option<RoleId> {
        self.role_index.get(name).copied()
    }

    pub fn prop_name(&self, p: PropId) -> &str {
        &self.props[p.index()]
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.prop_index.get(name).copied()
    }

    pub fn prop_count(&self) -> usize {
        self.props.len()
    }

    /// Number of nominals named in the input. Fresh nominals follow them.
    pub fn input_nominal_count(&self) -> usize {
        self.nominals.len()
    }

    pub fn nominal_name(&self, x: NomId) -> String {
        match self.nominals.get(x.index()) {
            Some(name) => name.clone(),
            None => format!("{}{}", self.fresh_prefix, x.index() - self.nominals.len()),
        }
    }

    pub fn nominal_id(&self, name: &str) -> Option<NomId> {
        if let Some(&x) = self.nominal_index.get(name) {
            return Some(x);
        }
        let rest = name.strip_prefix(self.fresh_prefix.as_str())?;
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let i: usize = rest.parse().ok()?;
        Some(NomId((self.nominals.len() + i) as u32))
    }

    /// `r ⊑* s`
    pub fn sub_role(&self, r: RoleId, s: RoleId) -> bool {
        self.sub[r.index()][s.index()]
    }

    pub fn is_reflexive(&self, r: RoleId) -> bool {
        self.reflexive[r.index()]
    }

    pub fn is_transitive(&self, r: RoleId) -> bool {
        self.transitive[r.index()]
    }

    /// Some sub-role of `r` is declared reflexive.
    pub fn reflexive_reach(&self, r: RoleId) -> bool {
        self.reflexive_reach[r.index()]
    }

    pub fn is_simple(&self, r: RoleId) -> bool {
        self.simple[r.index()]
    }

    pub fn inclusions(&self) -> &[(RoleId, RoleId)] {
        &self.inclusions
    }

    /// Extended (role-hierarchy) mode: any inclusion, reflexivity or
    /// transitivity assertion is present.
    pub fn extended(&self) -> bool {
        self.extended
    }

    pub fn show(&self, id: ExprId) -> String {
        self.expression(id).to_string()
    }
}

fn index_of<T: Copy>(names: &[String], make: fn(u32) -> T) -> HashMap<String, T> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), make(i as u32)))
        .collect()
}

fn preorder(nodes: &[Node], id: ExprId, out: &mut Vec<ExprId>) {
    out.push(id);
    for c in nodes[id.index()].children() {
        preorder(nodes, c, out);
    }
}

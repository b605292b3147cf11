//! Seeded generators and audits shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use gradtab::branch::{Branch, ExprId, PatternMode};
use gradtab::calculus::{metrics, pattern_expanding, s_prime_of, RuleId, RuleInstance};
use gradtab::search::SearchObserver;
use gradtab::syntax::{simple_roles, to_nnf, Expression, NnfExpression, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct Signature {
    pub props: Vec<&'static str>,
    pub roles: Vec<&'static str>,
    pub noms: Vec<&'static str>,
}

impl Signature {
    pub fn random(rng: &mut impl Rng) -> Signature {
        Signature {
            props: ["p", "q", "o"][..rng.gen_range(1..=3)].to_vec(),
            roles: ["r", "s"][..rng.gen_range(1..=2)].to_vec(),
            noms: ["x", "y"][..rng.gen_range(1..=2)].to_vec(),
        }
    }
}

fn grade(rng: &mut impl Rng) -> u32 {
    match rng.gen_range(0..20) {
        0..=13 => 0,
        14..=17 => 1,
        _ => 2,
    }
}

fn pick<'a>(rng: &mut impl Rng, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

/// A random expression with modal depth at most `depth`; `size` bounds the
/// number of connectives.
pub fn random_expression(rng: &mut impl Rng, sig: &Signature, depth: usize, size: usize) -> Expression {
    if size == 0 || rng.gen_bool(0.25) {
        let atom = if !sig.noms.is_empty() && rng.gen_bool(0.1) {
            Expression::nom(pick(rng, &sig.noms))
        } else {
            Expression::prop(pick(rng, &sig.props))
        };
        return if rng.gen_bool(0.4) { Expression::not(atom) } else { atom };
    }
    let sub = |rng: &mut _, d| random_expression(rng, sig, d, size - 1);
    let choice = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..10) };
    match choice {
        0 => Expression::not(sub(rng, depth)),
        1 => Expression::and(sub(rng, depth), random_expression(rng, sig, depth, size / 2)),
        2 => Expression::or(sub(rng, depth), random_expression(rng, sig, depth, size / 2)),
        3..=5 => Expression::diamond(pick(rng, &sig.roles), grade(rng), sub(rng, depth - 1)),
        6..=7 => Expression::boxed(pick(rng, &sig.roles), grade(rng), sub(rng, depth - 1)),
        8 => Expression::exists(grade(rng), sub(rng, depth - 1)),
        _ => Expression::forall(grade(rng), sub(rng, depth - 1)),
    }
}

fn repair(e: &NnfExpression, simple: &BTreeSet<String>) -> NnfExpression {
    use NnfExpression as N;
    let b = |t: &NnfExpression| Box::new(repair(t, simple));
    match e {
        N::And(l, r) => N::And(b(l), b(r)),
        N::Or(l, r) => N::Or(b(l), b(r)),
        N::Diamond(r, n, t) => N::Diamond(r.clone(), *n, b(t)),
        N::Box(r, n, t) => {
            let n = if simple.contains(r) { *n } else { 0 };
            N::Box(r.clone(), n, b(t))
        }
        N::Exists(n, t) => N::Exists(*n, b(t)),
        N::Forall(n, t) => N::Forall(*n, b(t)),
        other => other.clone(),
    }
}

/// A random valid problem: up to three propositions, two roles, two
/// nominals, grades up to 2, modal depth up to 3 and a random subset of
/// one inclusion, one reflexivity and one transitivity assertion. Graded
/// boxes on roles that end up non-simple get grade 0.
pub fn random_problem(rng: &mut impl Rng) -> Problem {
    let sig = Signature::random(rng);
    let mut p = Problem::default();
    for _ in 0..rng.gen_range(1..=2) {
        let depth = rng.gen_range(1..=3);
        let e = random_expression(rng, &sig, depth, 5);
        p.labels.push((to_nnf(&e), pick(rng, &sig.noms).to_string()));
    }
    if sig.noms.len() == 2 {
        match rng.gen_range(0..8) {
            0 => p.edges.push((pick(rng, &sig.roles).into(), "x".into(), "y".into())),
            1 => p.equations.push(("x".into(), "y".into())),
            2 => p.disequations.push(("x".into(), "y".into())),
            _ => {}
        }
    }
    if rng.gen_bool(0.3) {
        if sig.roles.len() == 2 {
            let (a, b) = if rng.gen_bool(0.5) { ("r", "s") } else { ("s", "r") };
            p.inclusions.push((a.into(), b.into()));
        } else {
            p.inclusions.push(("r".into(), "s".into()));
        }
    }
    if rng.gen_bool(0.3) {
        p.reflexive.insert(pick(rng, &sig.roles).into());
    }
    if rng.gen_bool(0.3) {
        p.transitive.insert(pick(rng, &sig.roles).into());
    }
    let simple = simple_roles(&p);
    p.labels = p.labels.iter().map(|(e, x)| (repair(e, &simple), x.clone())).collect();
    p.validate().expect("repaired problem is valid");
    p
}

pub fn problem_suite(seed: u64, count: usize) -> Vec<Problem> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_problem(&mut rng)).collect()
}

/// Checks the termination measures on every rule application.
#[derive(Default)]
pub struct MeasureAudit {
    root: Option<BTreeSet<ExprId>>,
    pub steps: u64,
    pub violations: Vec<String>,
}

fn expanded_patterns(b: &Branch) -> Vec<(gradtab::branch::Pattern, PatternMode)> {
    let ctx = b.context();
    let modes: Vec<PatternMode> = if ctx.extended() {
        vec![PatternMode::Extended]
    } else {
        ctx.roles().map(PatternMode::Basic).collect()
    };
    let mut out = Vec::new();
    for mode in modes {
        for x in b.classes() {
            let p = b.pattern_of(x, mode);
            if b.pattern_expanded(&p, mode) {
                out.push((p, mode));
            }
        }
    }
    out
}

impl SearchObserver for MeasureAudit {
    fn on_step(&mut self, parent: &Branch, inst: &RuleInstance, children: &[Branch]) {
        self.steps += 1;
        let root = self.root.get_or_insert_with(|| s_prime_of(parent)).clone();
        let before = metrics(parent);
        let expanding = pattern_expanding(parent, inst);
        let expanded = expanded_patterns(parent);
        let mut fail = |what: String| self.violations.push(format!("{} on {}: {what}", inst.rule, parent.show(&inst.principal)));
        for child in children {
            let after = metrics(child);
            if inst.rule == RuleId::Exists {
                if after.psi_e >= before.psi_e {
                    fail(format!("psi_e {} -> {}", before.psi_e, after.psi_e));
                }
            } else if after.psi_e > before.psi_e {
                fail(format!("psi_e grew {} -> {}", before.psi_e, after.psi_e));
            }
            if inst.rule == RuleId::Diamond {
                if !expanding && after.psi_diamond >= before.psi_diamond {
                    fail(format!("psi_diamond {} -> {}", before.psi_diamond, after.psi_diamond));
                }
            } else if after.psi_diamond > before.psi_diamond {
                fail(format!("psi_diamond grew {} -> {}", before.psi_diamond, after.psi_diamond));
            }
            if !s_prime_of(child).is_subset(&root) {
                fail("new modal expression".into());
            }
            for (p, mode) in &expanded {
                if !child.pattern_expanded(p, *mode) {
                    fail(format!("pattern {:?} no longer expanded", p.0));
                }
            }
            if after.branch_size > after.size_bound {
                fail(format!("size {} over bound {}", after.branch_size, after.size_bound));
            }
            if !child.is_closed() && child.size() <= parent.size() {
                fail("branch did not grow".into());
            }
        }
    }
}

/// The open branch as a problem: its formulas plus the role assertions.
pub fn branch_problem(b: &Branch) -> Problem {
    let axioms = b.context().problem();
    let mut p = Problem {
        inclusions: axioms.inclusions.clone(),
        reflexive: axioms.reflexive.clone(),
        transitive: axioms.transitive.clone(),
        ..Problem::default()
    };
    let lines: Vec<String> = b.formulas().iter().map(|f| b.show(f)).collect();
    let body = gradtab::syntax::parse_problem(&lines.join(";\n")).expect("branch formulas reparse");
    p.labels = body.labels;
    p.edges = body.edges;
    p.equations = body.equations;
    p.disequations = body.disequations;
    p
}

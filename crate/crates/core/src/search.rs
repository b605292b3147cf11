//! Depth-first exploration of the tableau.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::branch::Branch;
use crate::calculus::{apply, first_instance, metrics, RuleId, RuleInstance, TerminationMetrics};
use crate::syntax::Problem;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchConfig {
    /// Rule applications allowed in total before giving up.
    pub max_steps: Option<u64>,
    pub trace: bool,
    pub collect_stats: bool,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// An open, maximal branch.
    Sat(Branch),
    Unsat,
    Aborted,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Aborted => "ABORTED",
        }
    }

    pub fn branch(&self) -> Option<&Branch> {
        match self {
            Verdict::Sat(b) => Some(b),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub rule_applications: BTreeMap<String, u64>,
    pub steps: u64,
    pub peak_branch_size: usize,
    pub peak_nominal_count: usize,
    pub branches_explored: u64,
    pub closed_leaves: u64,
    #[serde(serialize_with = "millis")]
    pub wall_time: Duration,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step: u64,
    pub rule: RuleId,
    pub principal: String,
    pub alternatives: usize,
    /// Measures of the branch the rule was applied to.
    pub metrics: TerminationMetrics,
}

#[derive(Clone, Debug)]
pub struct DecisionResult {
    pub verdict: Verdict,
    pub stats: Stats,
    pub trace: Vec<TraceRecord>,
}

/// Hooks for audits that need every step of a run.
pub trait SearchObserver {
    fn on_step(&mut self, _parent: &Branch, _inst: &RuleInstance, _children: &[Branch]) {}
    fn on_leaf(&mut self, _leaf: &Branch) {}
}

struct NoObserver;

impl SearchObserver for NoObserver {}

pub fn decide(p: &Problem, cfg: &SearchConfig) -> DecisionResult {
    decide_observed(p, cfg, &mut NoObserver)
}

pub fn decide_observed(p: &Problem, cfg: &SearchConfig, obs: &mut dyn SearchObserver) -> DecisionResult {
    decide_branch(Branch::from_problem(p), cfg, obs)
}

/// Runs the search from an arbitrary initial branch.
pub fn decide_branch(root: Branch, cfg: &SearchConfig, obs: &mut dyn SearchObserver) -> DecisionResult {
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut trace = Vec::new();
    let mut stack = vec![root];
    let verdict = loop {
        let Some(b) = stack.pop() else {
            break Verdict::Unsat;
        };
        stats.branches_explored += 1;
        if cfg.collect_stats {
            stats.peak_branch_size = stats.peak_branch_size.max(b.size());
            stats.peak_nominal_count = stats.peak_nominal_count.max(b.nominal_count());
        }
        if b.is_closed() {
            stats.closed_leaves += 1;
            obs.on_leaf(&b);
            continue;
        }
        let Some(inst) = first_instance(&b) else {
            debug_assert!(
                crate::calculus::quasi_evidence_audit(&b).is_ok(),
                "maximal branch is not quasi-evident"
            );
            obs.on_leaf(&b);
            break Verdict::Sat(b);
        };
        if cfg.max_steps.is_some_and(|m| stats.steps >= m) {
            break Verdict::Aborted;
        }
        stats.steps += 1;
        *stats.rule_applications.entry(inst.rule.name().to_string()).or_default() += 1;
        if cfg.trace {
            trace.push(TraceRecord {
                step: stats.steps,
                rule: inst.rule,
                principal: b.show(&inst.principal),
                alternatives: inst.alternatives.len(),
                metrics: metrics(&b),
            });
        }
        let children = apply(&b, &inst);
        obs.on_step(&b, &inst, &children);
        stack.extend(children.into_iter().rev());
    };
    stats.wall_time = start.elapsed();
    DecisionResult { verdict, stats, trace }
}

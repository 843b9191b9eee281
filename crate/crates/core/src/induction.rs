//! Hypothesis search: pick a minimum-cost subset of the hypothesis space
//! that reproduces an example's labels exactly.
//!
//! Every candidate rule gets a guard atom `use(tag)` that is freely chosen
//! and penalized by the rule's cost through a weak constraint. A verification
//! part requires the target extension to contain every label atom and
//! nothing else.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::atom::{GroundAtom, Term};
use crate::bias::PredicateSchema;
use crate::instance::{facts_text, Example};
use crate::rule::HypRule;
use crate::solver::{SolveMode, SolveRequest, Solver, SolverError};
use crate::space::{HypothesisSpace, SpaceRule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    /// Sorted like the space they come from.
    pub rules: Vec<SpaceRule>,
    pub total_cost: i64,
    /// The solver proved that no cheaper subset exists.
    pub proven_optimal: bool,
}

impl Hypothesis {
    pub fn new(mut rules: Vec<SpaceRule>, proven_optimal: bool) -> Self {
        rules.sort_by(|a, b| (a.cost.total, &a.text).cmp(&(b.cost.total, &b.text)));
        let total_cost = rules.iter().map(|r| r.cost.total).sum();
        Hypothesis {
            rules,
            total_cost,
            proven_optimal,
        }
    }

    /// The rules as a program, one per line.
    pub fn program(&self) -> String {
        let mut s = String::new();
        for r in &self.rules {
            s.push_str(&r.text);
            s.push('\n');
        }
        s
    }

    pub fn max_rule_cost(&self) -> Option<i64> {
        self.rules.iter().map(|r| r.cost.total).max()
    }
}

/// Stable tag of a rendered rule.
pub fn rule_tag(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut s = String::from("r");
    for b in &digest[..10] {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Guarded rule, free choice of its guard, and the weak constraint that
/// charges `cost` when the guard holds.
pub fn transform_rule(rule: &HypRule, cost: i64) -> String {
    let tag = rule_tag(&rule.render());
    let guard = format!("use({tag})");
    format!(
        "{}\n{{ {guard} }}.\n:~ {guard}. [{cost}@0,{tag}]\n",
        rule.render_with_guard(&guard)
    )
}

fn pos_name(target: &str) -> String {
    format!("pos_{target}")
}

fn target_vars(arity: usize) -> String {
    (1..=arity)
        .map(|i| format!("X{i}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn atom_text(predicate: &str, args: &[Term]) -> String {
    GroundAtom::new(predicate, args.to_vec()).to_string()
}

/// Exact-coverage check of `label` against the target extension.
pub fn build_verify(label: &[GroundAtom], target: &PredicateSchema) -> String {
    let pos = pos_name(&target.name);
    let mut s = String::new();
    for a in label {
        let _ = writeln!(s, "{}.", atom_text(&pos, &a.args));
    }
    if label.is_empty() {
        s.push_str("covered.\n");
    } else {
        let conj: Vec<String> = label.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(s, "covered :- {}.", conj.join(", "));
    }
    let xs = target_vars(target.arity());
    let call = |p: &str| {
        if xs.is_empty() {
            p.to_string()
        } else {
            format!("{p}({xs})")
        }
    };
    let _ = writeln!(s, "violated :- {}, not {}.", call(&target.name), call(&pos));
    s.push_str("good_example :- covered, not violated.\n");
    s.push_str(":- not good_example.\n");
    s
}

fn fragments(space: &HypothesisSpace) -> String {
    let mut s = String::new();
    for r in &space.rules {
        s.push_str(&transform_rule(&r.rule, r.cost.total));
    }
    s.push_str("#show use/1.\n");
    s
}

/// The search program for one example.
pub fn build_phs(
    bk: &str,
    trace: &[GroundAtom],
    label: &[GroundAtom],
    space: &HypothesisSpace,
    target: &PredicateSchema,
) -> String {
    let mut s = String::new();
    s.push_str(bk);
    if !bk.ends_with('\n') {
        s.push('\n');
    }
    s.push_str(&facts_text(trace));
    s.push_str(&fragments(space));
    s.push_str(&build_verify(label, target));
    s
}

/// The search program for all examples at once. Traces and labels share one
/// answer set, so examples whose atoms overlap influence each other; this is
/// only meaningful for examples over disjoint time ranges.
pub fn build_phs_multi(
    bk: &str,
    examples: &[Example],
    space: &HypothesisSpace,
    target: &PredicateSchema,
) -> String {
    let mut s = String::new();
    s.push_str(bk);
    if !bk.ends_with('\n') {
        s.push('\n');
    }
    for e in examples {
        s.push_str(&facts_text(&e.trace));
    }
    s.push_str(&fragments(space));

    let pos = pos_name(&target.name);
    let labels: BTreeSet<&GroundAtom> = examples.iter().flat_map(|e| &e.valid_moves).collect();
    for a in &labels {
        let _ = writeln!(s, "{}.", atom_text(&pos, &a.args));
    }
    for (i, e) in examples.iter().enumerate() {
        let _ = writeln!(s, "example({i}).");
        if e.valid_moves.is_empty() {
            let _ = writeln!(s, "covered({i}).");
        } else {
            let conj: Vec<String> = e.valid_moves.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(s, "covered({i}) :- {}.", conj.join(", "));
        }
    }
    let xs = target_vars(target.arity());
    let call = |p: &str| {
        if xs.is_empty() {
            p.to_string()
        } else {
            format!("{p}({xs})")
        }
    };
    let _ = writeln!(s, "violated :- {}, not {}.", call(&target.name), call(&pos));
    s.push_str("good_example(E) :- covered(E), not violated.\n");
    s.push_str(":- example(E), not good_example(E).\n");
    s
}

/// Runs a search program and reads the chosen rules off the best model.
/// `None` when the program is unsatisfiable or no model appeared in time.
pub fn solve_phs(
    program: String,
    space: &HypothesisSpace,
    solver: &Solver,
    time_limit: Option<Duration>,
) -> Result<Option<Hypothesis>, SolverError> {
    let req = SolveRequest::new(program, SolveMode::Optimize).time_limit(time_limit);
    let result = solver.solve(&req)?;
    let Some(best) = result.best() else {
        return Ok(None);
    };
    let used: BTreeSet<String> = best
        .with_predicate("use")
        .filter_map(|a| a.args.first().and_then(Term::as_sym).map(str::to_string))
        .collect();
    let rules = space
        .rules
        .iter()
        .filter(|r| used.contains(&rule_tag(&r.text)))
        .cloned()
        .collect();
    Ok(Some(Hypothesis::new(rules, result.exhaustive)))
}

pub fn find_hypothesis(
    bk: &str,
    trace: &[GroundAtom],
    label: &[GroundAtom],
    space: &HypothesisSpace,
    target: &PredicateSchema,
    solver: &Solver,
    time_limit: Option<Duration>,
) -> Result<Option<Hypothesis>, SolverError> {
    if space.is_empty() && !label.is_empty() {
        return Ok(None);
    }
    solve_phs(
        build_phs(bk, trace, label, space, target),
        space,
        solver,
        time_limit,
    )
}

pub fn find_hypothesis_multi(
    bk: &str,
    examples: &[Example],
    space: &HypothesisSpace,
    target: &PredicateSchema,
    solver: &Solver,
    time_limit: Option<Duration>,
) -> Result<Option<Hypothesis>, SolverError> {
    solve_phs(
        build_phs_multi(bk, examples, space, target),
        space,
        solver,
        time_limit,
    )
}

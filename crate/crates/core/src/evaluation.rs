//! Hypothesis quality on examples and predictions on test traces, both
//! computed from the first answer set of background, hypothesis and trace.

use std::collections::BTreeSet;
use std::time::Duration;

use crate::atom::{GroundAtom, Term};
use crate::bias::PredicateSchema;
use crate::instance::{facts_text, trace_time, Example, TestTrace, Verdict, TRACE_PREDICATE};
use crate::solver::{SolveMode, SolveRequest, Solver, SolverError, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    Atoms(BTreeSet<GroundAtom>),
    Unsat,
    TimedOut,
}

impl Extension {
    pub fn atoms(&self) -> Option<&BTreeSet<GroundAtom>> {
        match self {
            Extension::Atoms(a) => Some(a),
            _ => None,
        }
    }
}

/// Shared inputs of every evaluation call.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    pub bk: &'a str,
    pub target: &'a PredicateSchema,
    pub solver: &'a Solver,
    pub time_limit: Option<Duration>,
}

impl Evaluator<'_> {
    /// Target atoms of the first answer set of bk, hypothesis and trace.
    pub fn extension(
        &self,
        hypothesis: &str,
        trace: &[GroundAtom],
    ) -> Result<Extension, SolverError> {
        let mut program = String::new();
        for part in [self.bk, hypothesis] {
            program.push_str(part);
            if !part.ends_with('\n') {
                program.push('\n');
            }
        }
        program.push_str(&facts_text(trace));
        program.push_str(&format!(
            "#show {}/{}.\n",
            self.target.name,
            self.target.arity()
        ));
        let req = SolveRequest::new(program, SolveMode::SatOne).time_limit(self.time_limit);
        let result = self.solver.solve(&req)?;
        Ok(match (result.status, result.models.first()) {
            (_, Some(m)) => Extension::Atoms(
                m.with_predicate(&self.target.name)
                    .filter(|a| a.arity() == self.target.arity())
                    .cloned()
                    .collect(),
            ),
            (Status::Unsat, None) => Extension::Unsat,
            _ => Extension::TimedOut,
        })
    }

    /// Exact reproduction of the example's labels; any failure counts as no.
    pub fn check_example(&self, hypothesis: &str, example: &Example) -> bool {
        match self.extension(hypothesis, &example.trace) {
            Ok(Extension::Atoms(ext)) => {
                let label: BTreeSet<GroundAtom> = example.valid_moves.iter().cloned().collect();
                ext == label
            }
            _ => false,
        }
    }

    /// Number of examples reproduced exactly.
    pub fn quality(&self, hypothesis: &str, examples: &[Example]) -> usize {
        examples
            .iter()
            .filter(|e| self.check_example(hypothesis, e))
            .count()
    }

    /// VALID iff every step of the trace is a derived valid move.
    pub fn predict(&self, hypothesis: &str, test: &TestTrace) -> Verdict {
        match self.extension(hypothesis, &test.trace) {
            Ok(Extension::Atoms(ext)) => judge(&ext, &test.trace, &self.target.name),
            _ => Verdict::Invalid,
        }
    }
}

/// Moves of a trace: `(cell, t)` for each `agent_at(cell, t+1)` that
/// follows some position at `t`.
pub fn trace_moves(trace: &[GroundAtom]) -> Vec<(Term, i64)> {
    let positions: Vec<(i64, &Term)> = trace
        .iter()
        .filter(|a| a.predicate == TRACE_PREDICATE && a.arity() == 2)
        .filter_map(|a| Some((trace_time(a)?, &a.args[0])))
        .collect();
    let mut moves = Vec::new();
    for &(t, _) in &positions {
        for &(t2, c2) in &positions {
            if t2 == t + 1 {
                moves.push((c2.clone(), t));
            }
        }
    }
    moves.sort();
    moves.dedup();
    moves
}

pub fn judge(extension: &BTreeSet<GroundAtom>, trace: &[GroundAtom], target: &str) -> Verdict {
    let ok = trace_moves(trace)
        .into_iter()
        .all(|(c, t)| extension.contains(&GroundAtom::new(target, vec![c, Term::Int(t)])));
    if ok {
        Verdict::Valid
    } else {
        Verdict::Invalid
    }
}

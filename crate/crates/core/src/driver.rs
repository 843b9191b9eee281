//! The best-effort learning loop.
//!
//! Examples are visited shortest trace first. For each one the cost limit
//! grows from `climit_min` until a hypothesis for that example is found.
//! Each hypothesis is scored on all examples; a strictly better score
//! triggers a prediction attempt on the test traces, and a perfect score
//! ends the run right after its attempt.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::json;

use crate::config::SpaceParams;
use crate::evaluation::Evaluator;
use crate::induction::{find_hypothesis, find_hypothesis_multi, Hypothesis};
use crate::instance::{write_attempt, InstanceFile, Verdict};
use crate::rule::Language;
use crate::solver::Solver;
use crate::space::asp::generate_space_asp;
use crate::space::native::{enumerate_with, NativeOptions};
use crate::space::{Backend, HypothesisSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Competition,
    General,
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "competition" => Ok(Profile::Competition),
            "general" => Ok(Profile::General),
            other => Err(format!(
                "unknown profile `{other}` (expected competition or general)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DriverConfig {
    pub climit_min: i64,
    /// `None` runs until no larger limit can add rules.
    pub climit_max: Option<i64>,
    /// Per solver call.
    pub time_limit: Option<Duration>,
    pub backend: Backend,
    pub invention: bool,
    pub params: SpaceParams,
    /// Checked between solver calls.
    pub global_budget: Option<Duration>,
}

impl DriverConfig {
    pub fn profile(p: Profile) -> Self {
        match p {
            Profile::Competition => DriverConfig {
                climit_min: 4,
                climit_max: Some(15),
                time_limit: Some(Duration::from_secs(5)),
                backend: Backend::Asp,
                invention: true,
                params: SpaceParams::default(),
                global_budget: None,
            },
            Profile::General => DriverConfig {
                climit_min: 1,
                climit_max: None,
                time_limit: Some(Duration::from_secs(5)),
                ..DriverConfig::profile(Profile::Competition)
            },
        }
    }

    /// Highest limit worth trying: one above the cost of the most expensive
    /// rule the hard limits allow.
    pub fn effective_climit_max(&self, lang: &Language) -> i64 {
        let bound = max_rule_cost(&self.params, lang.types.len() as i64) + 1;
        match self.climit_max {
            Some(m) => m.min(bound.max(self.climit_min)),
            None => bound,
        }
    }
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig::profile(Profile::Competition)
    }
}

/// An upper bound on any rule's cost under the hard limits.
fn max_rule_cost(p: &SpaceParams, ntypes: i64) -> i64 {
    let (l, c) = (&p.limits, &p.costs);
    let per_type = l.maxvars as i64;
    let vars = per_type * ntypes;
    let lits = l.maxliterals as i64;
    let inv = l.maxinventpred as i64;
    (vars - c.free_vars).max(0) * c.cost_vars
        + ntypes * (per_type - 2).max(0) * c.cost_type_usedmorethantwice
        + lits
            * (c.cost_posbodyliteral.max(c.cost_negbodyliteral)
                + c.cost_pred_multi
                + c.cost_reflexive)
        + vars * (c.cost_varonlyhead.max(c.cost_varonlyoncebody) + c.cost_var_boundmorethantwice)
        + c.cost_inv
        + inv * (c.cost_inv_pred + c.cost_inv_headbodyorder)
        + c.cost_inv_headbody
        + c.cost_inv_bodymulti
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttemptRecord {
    pub quality: usize,
    pub example: Option<i64>,
    pub climit: i64,
    pub predictions: Vec<(i64, Verdict)>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub hypothesis: Option<Hypothesis>,
    pub quality: usize,
    pub examples: usize,
    /// Per example in instance order, for the returned hypothesis.
    pub per_example: Vec<bool>,
    pub attempts: Vec<AttemptRecord>,
    /// Example ids in processing order.
    pub order: Vec<i64>,
}

impl RunOutcome {
    pub fn complete(&self) -> bool {
        self.hypothesis.is_some() && self.quality == self.examples
    }
}

pub struct Driver<'a> {
    pub instance: &'a InstanceFile,
    pub cfg: DriverConfig,
    pub solver: Solver,
    lang: Language,
    bk: String,
    spaces: BTreeMap<i64, HypothesisSpace>,
    report: Option<&'a mut dyn Write>,
    started: Instant,
}

impl<'a> Driver<'a> {
    pub fn new(instance: &'a InstanceFile, cfg: DriverConfig, solver: Solver) -> Self {
        let lang = Language::new(instance.bias(), cfg.params.limits);
        Driver {
            instance,
            cfg,
            solver,
            lang,
            bk: instance.background_text(),
            spaces: BTreeMap::new(),
            report: None,
            started: Instant::now(),
        }
    }

    /// Line-delimited JSON run report.
    pub fn with_report(mut self, w: &'a mut dyn Write) -> Self {
        self.report = Some(w);
        self
    }

    fn log(&mut self, value: serde_json::Value) {
        if let Some(w) = self.report.as_mut() {
            let _ = writeln!(w, "{value}");
        }
    }

    fn out_of_budget(&self) -> bool {
        self.cfg
            .global_budget
            .is_some_and(|b| self.started.elapsed() >= b)
    }

    fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            bk: &self.bk,
            target: &self.instance.target,
            solver: &self.solver,
            time_limit: self.cfg.time_limit,
        }
    }

    /// The space for `climit`, generated once per run.
    pub fn space(&mut self, climit: i64) -> &HypothesisSpace {
        if !self.spaces.contains_key(&climit) {
            let t = Instant::now();
            let cfg = &self.cfg;
            let space = match cfg.backend {
                Backend::Native => enumerate_with(
                    &self.lang,
                    &cfg.params.costs,
                    climit,
                    NativeOptions {
                        invention: cfg.invention,
                        prune: true,
                    },
                ),
                Backend::Asp => generate_space_asp(
                    &self.lang,
                    &cfg.params.costs,
                    climit,
                    cfg.invention,
                    &self.solver,
                    cfg.time_limit,
                )
                .unwrap_or_else(|e| {
                    eprintln!("hypothesis space generation failed at climit {climit}: {e}");
                    HypothesisSpace::new(climit, Vec::new(), false)
                }),
            };
            let entry = json!({
                "event": "space",
                "climit": climit,
                "rules": space.len(),
                "exhaustive": space.exhaustive,
                "ms": t.elapsed().as_millis() as u64,
            });
            self.spaces.insert(climit, space);
            self.log(entry);
        }
        &self.spaces[&climit]
    }

    /// Quality per example, evaluated concurrently.
    fn score(&self, h: &Hypothesis) -> Vec<bool> {
        let program = h.program();
        let ev = self.evaluator();
        std::thread::scope(|s| {
            let handles: Vec<_> = self
                .instance
                .examples
                .iter()
                .map(|e| {
                    let (ev, program) = (&ev, &program);
                    s.spawn(move || ev.check_example(program, e))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or(false))
                .collect()
        })
    }

    fn predictions(&self, h: &Hypothesis) -> Vec<(i64, Verdict)> {
        let program = h.program();
        let ev = self.evaluator();
        self.instance
            .tests
            .iter()
            .map(|t| (t.id, ev.predict(&program, t)))
            .collect()
    }

    fn attempt(
        &mut self,
        sink: &mut dyn Write,
        h: &Hypothesis,
        quality: usize,
        example: Option<i64>,
        climit: i64,
    ) -> AttemptRecord {
        let predictions = self.predictions(h);
        let block = write_attempt(&predictions, Some(&self.instance.tests))
            .expect("predictions cover exactly the test traces");
        let _ = sink.write_all(block.as_bytes());
        let _ = sink.flush();
        self.log(json!({
            "event": "attempt",
            "quality": quality,
            "example": example,
            "climit": climit,
            "hypothesis": h.rules.iter().map(|r| r.text.clone()).collect::<Vec<_>>(),
        }));
        AttemptRecord {
            quality,
            example,
            climit,
            predictions,
        }
    }

    fn log_hypothesis(
        &mut self,
        example: Option<i64>,
        climit: i64,
        h: &Hypothesis,
        scores: &[bool],
    ) {
        let ids: Vec<i64> = self.instance.examples.iter().map(|e| e.id).collect();
        self.log(json!({
            "event": "hypothesis",
            "example": example,
            "climit": climit,
            "cost": h.total_cost,
            "proven_optimal": h.proven_optimal,
            "rules": h.rules.iter().map(|r| r.text.clone()).collect::<Vec<_>>(),
            "per_example": ids.iter().zip(scores).map(|(i, s)| json!({"id": i, "ok": s})).collect::<Vec<_>>(),
            "quality": scores.iter().filter(|&&s| s).count(),
        }));
    }

    fn finish(&mut self, outcome: &RunOutcome) {
        self.log(json!({
            "event": "done",
            "quality": outcome.quality,
            "examples": outcome.examples,
            "complete": outcome.complete(),
            "attempts": outcome.attempts.len(),
            "hypothesis": outcome.hypothesis.as_ref().map(|h| h.rules.iter().map(|r| r.text.clone()).collect::<Vec<_>>()),
            "ms": self.started.elapsed().as_millis() as u64,
        }));
    }

    /// Per-example learning loop.
    pub fn run(&mut self, sink: &mut dyn Write) -> RunOutcome {
        self.started = Instant::now();
        let examples = &self.instance.examples;
        let mut sorted: Vec<usize> = (0..examples.len()).collect();
        sorted.sort_by_key(|&i| examples[i].trace.len());

        let mut outcome = RunOutcome {
            hypothesis: None,
            quality: 0,
            examples: examples.len(),
            per_example: vec![false; examples.len()],
            attempts: Vec::new(),
            order: Vec::new(),
        };
        let climit_max = self.cfg.effective_climit_max(&self.lang);

        'examples: for i in sorted {
            let example = &self.instance.examples[i];
            outcome.order.push(example.id);
            self.log(
                json!({"event": "example", "id": example.id, "trace_len": example.trace.len()}),
            );
            for climit in self.cfg.climit_min.max(1)..=climit_max {
                if self.out_of_budget() {
                    break 'examples;
                }
                let target = self.instance.target.clone();
                let time_limit = self.cfg.time_limit;
                let space = self.space(climit).clone();
                let found = find_hypothesis(
                    &self.bk,
                    &example.trace,
                    &example.valid_moves,
                    &space,
                    &target,
                    &self.solver,
                    time_limit,
                );
                let h = match found {
                    Ok(Some(h)) => h,
                    Ok(None) => continue,
                    Err(e) => {
                        eprintln!("hypothesis search failed for example {}: {e}", example.id);
                        continue;
                    }
                };
                let scores = self.score(&h);
                let quality = scores.iter().filter(|&&s| s).count();
                self.log_hypothesis(Some(example.id), climit, &h, &scores);
                if quality > outcome.quality {
                    let rec = self.attempt(sink, &h, quality, Some(example.id), climit);
                    outcome.attempts.push(rec);
                    outcome.quality = quality;
                    outcome.per_example = scores;
                    outcome.hypothesis = Some(h);
                    if quality == outcome.examples {
                        break 'examples;
                    }
                } else if outcome.hypothesis.is_none() {
                    // no attempt without an improvement, but remember it
                    outcome.per_example = scores;
                    outcome.hypothesis = Some(h);
                }
                continue 'examples;
            }
        }
        self.finish(&outcome);
        outcome
    }

    /// One search over all examples at once.
    pub fn run_batch(&mut self, sink: &mut dyn Write) -> RunOutcome {
        self.started = Instant::now();
        let n = self.instance.examples.len();
        let mut outcome = RunOutcome {
            hypothesis: None,
            quality: 0,
            examples: n,
            per_example: vec![false; n],
            attempts: Vec::new(),
            order: self.instance.examples.iter().map(|e| e.id).collect(),
        };
        if n == 0 {
            self.finish(&outcome);
            return outcome;
        }
        let climit_max = self.cfg.effective_climit_max(&self.lang);
        for climit in self.cfg.climit_min.max(1)..=climit_max {
            if self.out_of_budget() {
                break;
            }
            let target = self.instance.target.clone();
            let time_limit = self.cfg.time_limit;
            let space = self.space(climit).clone();
            let found = find_hypothesis_multi(
                &self.bk,
                &self.instance.examples,
                &space,
                &target,
                &self.solver,
                time_limit,
            );
            let h = match found {
                Ok(Some(h)) => h,
                Ok(None) => continue,
                Err(e) => {
                    eprintln!("batch hypothesis search failed: {e}");
                    continue;
                }
            };
            let scores = self.score(&h);
            let quality = scores.iter().filter(|&&s| s).count();
            self.log_hypothesis(None, climit, &h, &scores);
            let rec = self.attempt(sink, &h, quality, None, climit);
            outcome.attempts.push(rec);
            outcome.quality = quality;
            outcome.per_example = scores;
            outcome.hypothesis = Some(h);
            break;
        }
        self.finish(&outcome);
        outcome
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::tests::grid_language;

    #[test]
    fn profiles() {
        let c = DriverConfig::profile(Profile::Competition);
        assert_eq!((c.climit_min, c.climit_max), (4, Some(15)));
        assert_eq!(c.time_limit, Some(Duration::from_secs(5)));
        let g = DriverConfig::profile(Profile::General);
        assert_eq!((g.climit_min, g.climit_max), (1, None));
    }

    #[test]
    fn unbounded_limit_is_finite() {
        let g = DriverConfig::profile(Profile::General);
        let m = g.effective_climit_max(&grid_language());
        assert!(m > 15 && m < 1000);
        let c = DriverConfig::profile(Profile::Competition);
        assert_eq!(c.effective_climit_max(&grid_language()), 15);
    }
}

//! Shared fixtures and oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ilp_core::atom::{parse_ground_atom, GroundAtom, Term};
use ilp_core::bias::ModeBias;
use ilp_core::config::HardLimits;
use ilp_core::instance::{parse_instance, Example, InstanceFile};
use ilp_core::rule::Language;
use ilp_core::solver::{SolveMode, SolveRequest, Solver};
use ilp_core::space::HypothesisSpace;
use rand::seq::SliceRandom;
use rand::Rng;

pub const GRID: &str = include_str!("../fixtures/grid_moves.txt");
pub const TWO_STEP: &str = include_str!("../fixtures/grid_two_step.txt");
pub const DISJOINT: &str = include_str!("../fixtures/grid_disjoint_times.txt");

pub fn solver() -> Solver {
    Solver::from_env()
}

pub fn grid() -> InstanceFile {
    parse_instance(GRID).unwrap()
}

pub fn grid_bias() -> ModeBias {
    ModeBias::from_decls(
        "valid_move(cell,time)",
        &[
            "gap(cell)",
            "agent_at(cell,time)",
            "h_adjacent(cell,cell)",
            "v_adjacent(cell,cell)",
        ],
    )
    .unwrap()
}

pub fn lang(bias: ModeBias) -> Language {
    Language::new(bias, HardLimits::default())
}

pub fn atoms(text: &[&str]) -> Vec<GroundAtom> {
    text.iter().map(|a| parse_ground_atom(a).unwrap()).collect()
}

/// Extension of the target for each rule on its own, from one solver call
/// in which every rule gets its own head predicate. Only valid for rules
/// whose bodies do not mention the target or invented predicates.
pub fn rule_extensions(
    bk: &str,
    trace: &[GroundAtom],
    rules: &[&str],
    target: &str,
) -> Vec<BTreeSet<Vec<Term>>> {
    let mut program = String::from(bk);
    program.push('\n');
    for a in trace {
        program.push_str(&format!("{a}.\n"));
    }
    let prefix = format!("{target}(");
    for (k, r) in rules.iter().enumerate() {
        let rest = r
            .strip_prefix(&prefix)
            .expect("rule has the target as head");
        program.push_str(&format!("ext_{k}({rest}\n"));
    }
    program.push_str("#show.\n");
    for k in 0..rules.len() {
        program.push_str(&format!("#show ext_{k}(X,Y) : ext_{k}(X,Y).\n"));
    }
    let result = solver()
        .solve(&SolveRequest::new(program, SolveMode::SatOne))
        .unwrap();
    let model = result.models.first().expect("background is satisfiable");
    let mut ext = vec![BTreeSet::new(); rules.len()];
    for a in &model.atoms {
        if let Some(k) = a
            .predicate
            .strip_prefix("ext_")
            .and_then(|k| k.parse::<usize>().ok())
        {
            ext[k].insert(a.args.clone());
        }
    }
    ext
}

/// All minimum-cost subsets of the non-invention rules of `space` whose
/// combined extension equals the label. Rules with invented predicates are
/// left out: a subset using one needs both a defining and a using rule, and
/// callers check that such pairs cost more than the minimum found.
pub fn minimal_hypotheses(
    bk: &str,
    example: &Example,
    space: &HypothesisSpace,
    target: &str,
) -> (i64, Vec<Vec<String>>) {
    let plain: Vec<_> = space
        .rules
        .iter()
        .filter(|r| r.rule.invented.is_empty())
        .collect();
    let texts: Vec<&str> = plain.iter().map(|r| r.text.as_str()).collect();
    let ext = rule_extensions(bk, &example.trace, &texts, target);
    let label: BTreeSet<Vec<Term>> = example.valid_moves.iter().map(|a| a.args.clone()).collect();
    // only rules deriving nothing outside the label can take part
    let useful: Vec<usize> = (0..plain.len())
        .filter(|&i| ext[i].is_subset(&label))
        .collect();

    let mut best = i64::MAX;
    let mut found: Vec<Vec<usize>> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        cost: i64,
        covered: &BTreeSet<Vec<Term>>,
        chosen: &mut Vec<usize>,
        useful: &[usize],
        ext: &[BTreeSet<Vec<Term>>],
        costs: &[i64],
        label: &BTreeSet<Vec<Term>>,
        best: &mut i64,
        found: &mut Vec<Vec<usize>>,
    ) {
        if cost > *best {
            return;
        }
        if covered == label {
            if cost < *best {
                *best = cost;
                found.clear();
            }
            found.push(chosen.clone());
            // adding rules only adds cost; rules deriving nothing may still
            // cost zero, and those duplicates are enumerated below
        }
        for j in i..useful.len() {
            let r = useful[j];
            let c = cost + costs[r];
            if c > *best {
                continue;
            }
            let mut cov = covered.clone();
            cov.extend(ext[r].iter().cloned());
            chosen.push(r);
            go(
                j + 1,
                c,
                &cov,
                chosen,
                useful,
                ext,
                costs,
                label,
                best,
                found,
            );
            chosen.pop();
        }
    }
    let costs: Vec<i64> = plain.iter().map(|r| r.cost.total).collect();
    go(
        0,
        0,
        &BTreeSet::new(),
        &mut Vec::new(),
        &useful,
        &ext,
        &costs,
        &label,
        &mut best,
        &mut found,
    );
    found.retain(|s| s.iter().map(|&r| costs[r]).sum::<i64>() == best);
    let hyps = found
        .into_iter()
        .map(|s| {
            let mut v: Vec<String> = s.into_iter().map(|r| texts[r].to_string()).collect();
            v.sort();
            v
        })
        .collect();
    (best, hyps)
}

/// Cheapest rule pair that uses an invented predicate: a rule defining it
/// plus a target rule using it.
pub fn cheapest_invention_pair(space: &HypothesisSpace) -> Option<i64> {
    let inv: Vec<_> = space
        .rules
        .iter()
        .filter(|r| !r.rule.invented.is_empty())
        .collect();
    let head = inv
        .iter()
        .filter(|r| r.rule.head.pred_id.starts_with("ip_"))
        .map(|r| r.cost.total)
        .min()?;
    let user = inv
        .iter()
        .filter(|r| !r.rule.head.pred_id.starts_with("ip_"))
        .map(|r| r.cost.total)
        .min()?;
    Some(head + user)
}

/// A random grid world with a known rule for valid moves.
#[derive(Debug, Clone)]
pub struct World {
    pub width: i64,
    pub height: i64,
    pub gaps: BTreeSet<(i64, i64)>,
    pub truth: Truth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    /// Move right.
    Right,
    /// Move right or up.
    RightUp,
    /// Move right or up, never onto a gap.
    RightUpNoGap,
    /// Move left.
    Left,
}

impl World {
    pub fn random<R: Rng>(rng: &mut R) -> World {
        let width = rng.gen_range(2..=3);
        let height = rng.gen_range(2..=3);
        let mut gaps = BTreeSet::new();
        for x in 0..width {
            for y in 0..height {
                if rng.gen_bool(0.2) {
                    gaps.insert((x, y));
                }
            }
        }
        let truth = *[
            Truth::Right,
            Truth::RightUp,
            Truth::RightUpNoGap,
            Truth::Left,
        ]
        .choose(rng)
        .unwrap();
        World {
            width,
            height,
            gaps,
            truth,
        }
    }

    fn cells(&self) -> Vec<(i64, i64)> {
        let mut v = Vec::new();
        for x in 0..self.width {
            for y in 0..self.height {
                v.push((x, y));
            }
        }
        v
    }

    pub fn moves_from(&self, (x, y): (i64, i64)) -> Vec<(i64, i64)> {
        let inside = |(a, b): (i64, i64)| a >= 0 && b >= 0 && a < self.width && b < self.height;
        let cand = match self.truth {
            Truth::Right => vec![(x + 1, y)],
            Truth::RightUp | Truth::RightUpNoGap => vec![(x + 1, y), (x, y + 1)],
            Truth::Left => vec![(x - 1, y)],
        };
        cand.into_iter()
            .filter(|&c| inside(c))
            .filter(|c| self.truth != Truth::RightUpNoGap || !self.gaps.contains(c))
            .collect()
    }

    pub fn background(&self, horizon: i64) -> String {
        let mut s = String::new();
        for (x, y) in self.cells() {
            s.push_str(&format!("cell(({x},{y})).\n"));
            if self.gaps.contains(&(x, y)) {
                s.push_str(&format!("gap(({x},{y})).\n"));
            }
            if x + 1 < self.width {
                s.push_str(&format!("h_adjacent(({x},{y}),({},{y})).\n", x + 1));
            }
            if y + 1 < self.height {
                s.push_str(&format!("v_adjacent(({x},{y}),({x},{})).\n", y + 1));
            }
        }
        s.push_str(&format!("time(0..{horizon}).\n"));
        s
    }

    /// A walk along valid moves (stopping early at dead ends) and its label.
    pub fn example<R: Rng>(&self, rng: &mut R, id: i64, len: usize) -> Example {
        let cells = self.cells();
        let mut pos = *cells.choose(rng).unwrap();
        let mut trace = vec![pos];
        while trace.len() < len {
            match self.moves_from(pos).choose(rng) {
                Some(&next) => {
                    pos = next;
                    trace.push(pos);
                }
                None => break,
            }
        }
        let atom = |p: &str, (x, y): (i64, i64), t: usize| {
            parse_ground_atom(&format!("{p}(({x},{y}),{t})")).unwrap()
        };
        let mut valid_moves: Vec<GroundAtom> = Vec::new();
        for (t, &c) in trace.iter().enumerate() {
            for m in self.moves_from(c) {
                valid_moves.push(atom("valid_move", m, t));
            }
        }
        valid_moves.sort();
        Example {
            id,
            trace: trace
                .iter()
                .enumerate()
                .map(|(t, &c)| atom("agent_at", c, t))
                .collect(),
            valid_moves,
        }
    }
}

/// Counts of rules per cost.
pub fn buckets(space: &HypothesisSpace) -> BTreeMap<i64, usize> {
    space.buckets()
}

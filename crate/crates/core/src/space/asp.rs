//! Hypothesis-space generation with the ASP encoding.
//!
//! The encoding has four parts (main, cost, redundancy, invention) kept as
//! assets under `asp/`. Bias facts are appended, and limits, costs and
//! `climit` are passed as solver constants. Every answer set describes one
//! rule; the decoder rebuilds it and keeps it if it is canonical.

use std::collections::BTreeMap;
use std::time::Duration;

use thiserror::Error;

use crate::atom::{GroundAtom, Term};
use crate::bias::{emit_bias_facts, BiasError, ModeBias};
use crate::canonical::is_canonical;
use crate::config::{CostConfig, HardLimits, SpaceParams};
use crate::cost::{CostBreakdown, CostItem};
use crate::rule::{
    invented_name, parse_invented_name, HypHead, HypLiteral, HypRule, HypVar, InventedPred,
    Language, Polarity,
};
use crate::solver::{SolveMode, SolveRequest, Solver, SolverError, Status};
use crate::space::{HypothesisSpace, SpaceRule};

pub const MAIN_LP: &str = include_str!("../../asp/main.lp");
pub const COST_LP: &str = include_str!("../../asp/cost.lp");
pub const REDUNDANCY_LP: &str = include_str!("../../asp/redundancy.lp");
pub const INVENTION_LP: &str = include_str!("../../asp/invention.lp");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingBundle {
    pub main: String,
    pub cost: String,
    pub redundancy: String,
    /// Empty when invention is disabled.
    pub invention: String,
    pub facts: Vec<String>,
    /// All 22 parameters followed by `climit`.
    pub constants: Vec<(String, i64)>,
}

impl EncodingBundle {
    /// The program without constant definitions; constants go to the
    /// solver separately.
    pub fn program(&self) -> String {
        let mut s = String::new();
        for part in [&self.main, &self.cost, &self.redundancy, &self.invention] {
            if !part.is_empty() {
                s.push_str(part);
                if !part.ends_with('\n') {
                    s.push('\n');
                }
            }
        }
        for f in &self.facts {
            s.push_str(f);
            s.push('\n');
        }
        s
    }

    /// The program preceded by `#const` definitions, runnable on its own.
    pub fn standalone(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.constants {
            s.push_str(&format!("#const {k}={v}.\n"));
        }
        s.push_str(&self.program());
        s
    }

    pub fn request(&self, time_limit: Option<Duration>) -> SolveRequest {
        let mut req =
            SolveRequest::new(self.program(), SolveMode::EnumerateAll).time_limit(time_limit);
        for (k, v) in &self.constants {
            req = req.constant(k.clone(), *v);
        }
        req
    }
}

pub fn emit_encoding(
    bias: &ModeBias,
    limits: &HardLimits,
    cfg: &CostConfig,
    climit: i64,
    invention_enabled: bool,
) -> Result<EncodingBundle, BiasError> {
    let table = bias.type_table();
    let mut facts = emit_bias_facts(bias, &table)?;
    let invention = invention_enabled && limits.maxinventpred > 0;
    if invention {
        for k in 1..=limits.maxinventpred {
            for a in limits.inv_minarity..=limits.inv_maxarity {
                facts.push(format!(
                    "inv_cand({k},{a},{}).",
                    invented_name(k, a as usize)
                ));
            }
        }
    }
    let params = SpaceParams {
        limits: *limits,
        costs: *cfg,
    };
    let mut constants: Vec<(String, i64)> = params
        .entries()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    constants.push(("climit".to_string(), climit));
    Ok(EncodingBundle {
        main: MAIN_LP.to_string(),
        cost: COST_LP.to_string(),
        redundancy: REDUNDANCY_LP.to_string(),
        invention: if invention {
            INVENTION_LP.to_string()
        } else {
            String::new()
        },
        facts,
        constants,
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("answer set has {0} head atoms, expected one")]
    HeadCount(usize),
    #[error("variable {0} is bound but not declared")]
    UndeclaredVar(String),
    #[error("{0}: expected {1} arguments, found {2}")]
    Arity(String, usize, usize),
    #[error("malformed atom `{0}`")]
    Malformed(String),
}

fn var_index(t: &Term) -> Option<u32> {
    match t.as_func()? {
        ("v", [i]) => i.as_int().and_then(|i| u32::try_from(i).ok()),
        _ => None,
    }
}

fn sym(t: &Term) -> Option<String> {
    t.as_sym().map(str::to_string)
}

/// Rebuilds the rule and its cost items from one answer set.
pub fn decode_answer_set(atoms: &[GroundAtom]) -> Result<(HypRule, CostBreakdown), DecodeError> {
    let bad = |a: &GroundAtom| DecodeError::Malformed(a.to_string());
    let mut var_types: BTreeMap<u32, String> = BTreeMap::new();
    let mut heads = Vec::new();
    let mut hbind: BTreeMap<i64, u32> = BTreeMap::new();
    // (id, slot, polarity) -> (predicate, arity)
    let mut lits: BTreeMap<(String, u32, Polarity), (String, usize)> = BTreeMap::new();
    let mut bbind: BTreeMap<(String, u32, Polarity), BTreeMap<i64, u32>> = BTreeMap::new();
    let mut inv_types: BTreeMap<String, BTreeMap<i64, String>> = BTreeMap::new();
    let mut items = Vec::new();
    let mut total = None;

    let lit_id = |t: &Term| -> Option<(String, u32)> {
        match t.as_func()? {
            ("id_idx", [i, k]) => Some((sym(i)?, u32::try_from(k.as_int()?).ok()?)),
            _ => None,
        }
    };

    for a in atoms {
        let args = &a.args;
        match (a.predicate.as_str(), args.len()) {
            ("use_var_type", 2) => {
                let idx = var_index(&args[0]).ok_or_else(|| bad(a))?;
                var_types.insert(idx, sym(&args[1]).ok_or_else(|| bad(a))?);
            }
            ("use_head_pred", 3) => {
                let id = sym(&args[0]).ok_or_else(|| bad(a))?;
                let p = sym(&args[1]).ok_or_else(|| bad(a))?;
                let n = args[2].as_int().ok_or_else(|| bad(a))? as usize;
                heads.push((id, p, n));
            }
            ("bind_hvar", 2) => {
                let j = args[0].as_int().ok_or_else(|| bad(a))?;
                hbind.insert(j, var_index(&args[1]).ok_or_else(|| bad(a))?);
            }
            ("use_body_pred", 4) => {
                let (id, k) = lit_id(&args[0]).ok_or_else(|| bad(a))?;
                let p = sym(&args[1]).ok_or_else(|| bad(a))?;
                let pol = args[2]
                    .as_sym()
                    .and_then(Polarity::parse)
                    .ok_or_else(|| bad(a))?;
                let n = args[3].as_int().ok_or_else(|| bad(a))? as usize;
                lits.insert((id, k, pol), (p, n));
            }
            ("bind_bvar", 4) => {
                let (id, k) = lit_id(&args[0]).ok_or_else(|| bad(a))?;
                let pol = args[1]
                    .as_sym()
                    .and_then(Polarity::parse)
                    .ok_or_else(|| bad(a))?;
                let j = args[2].as_int().ok_or_else(|| bad(a))?;
                let v = var_index(&args[3]).ok_or_else(|| bad(a))?;
                bbind.entry((id, k, pol)).or_default().insert(j, v);
            }
            ("inv_type", 3) => {
                let n = sym(&args[0]).ok_or_else(|| bad(a))?;
                let j = args[1].as_int().ok_or_else(|| bad(a))?;
                let t = sym(&args[2]).ok_or_else(|| bad(a))?;
                inv_types.entry(n).or_default().insert(j, t);
            }
            ("cost", 3) => items.push(CostItem {
                name: sym(&args[0]).ok_or_else(|| bad(a))?,
                data: args[1].clone(),
                cost: args[2].as_int().ok_or_else(|| bad(a))?,
            }),
            ("totalcost", 1) => total = Some(args[0].as_int().ok_or_else(|| bad(a))?),
            _ => {}
        }
    }

    if heads.len() != 1 {
        return Err(DecodeError::HeadCount(heads.len()));
    }
    let var = |idx: u32| -> Result<HypVar, DecodeError> {
        var_types
            .get(&idx)
            .map(|t| HypVar::new(idx, t.clone()))
            .ok_or_else(|| DecodeError::UndeclaredVar(format!("V{idx}")))
    };
    let positional = |name: &str, binds: Option<&BTreeMap<i64, u32>>, arity: usize| {
        let binds: Vec<(i64, u32)> = binds
            .map(|b| b.iter().map(|(&j, &v)| (j, v)).collect())
            .unwrap_or_default();
        if binds.len() != arity
            || binds
                .iter()
                .enumerate()
                .any(|(i, (j, _))| *j != i as i64 + 1)
        {
            return Err(DecodeError::Arity(name.to_string(), arity, binds.len()));
        }
        binds
            .into_iter()
            .map(|(_, v)| var(v))
            .collect::<Result<Vec<_>, _>>()
    };

    let (hid, hpred, harity) = heads.pop().expect("one head");
    let head = HypHead {
        args: positional(&hpred, Some(&hbind), harity)?,
        pred_id: hid,
        predicate: hpred,
    };
    let mut body = Vec::new();
    for ((id, slot, pol), (p, n)) in &lits {
        body.push(HypLiteral {
            pred_id: id.clone(),
            predicate: p.clone(),
            polarity: *pol,
            slot: *slot,
            args: positional(p, bbind.get(&(id.clone(), *slot, *pol)), *n)?,
        });
    }
    let mut invented = Vec::new();
    for (name, types) in inv_types {
        let (slot, arity) =
            parse_invented_name(&name).ok_or_else(|| DecodeError::Malformed(name.clone()))?;
        if types.len() != arity {
            return Err(DecodeError::Arity(name, arity, types.len()));
        }
        invented.push(InventedPred {
            slot,
            arg_types: types.into_values().collect(),
        });
    }
    let rule = HypRule::new(head, body, invented);
    let mut cost = CostBreakdown::from_items(items);
    if let Some(t) = total {
        cost.total = t;
    }
    Ok((rule, cost))
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Bias(#[from] BiasError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot decode answer set: {0}")]
    Decode(#[from] DecodeError),
}

/// Enumerates the space through the solver. A timeout yields the rules
/// found so far with `exhaustive` false.
pub fn generate_space_asp(
    lang: &Language,
    cfg: &CostConfig,
    climit: i64,
    invention: bool,
    solver: &Solver,
    time_limit: Option<Duration>,
) -> Result<HypothesisSpace, GenerateError> {
    let bundle = emit_encoding(&lang.bias, &lang.limits, cfg, climit, invention)?;
    let result = solver.solve(&bundle.request(time_limit))?;
    let mut rules = Vec::new();
    for m in &result.models {
        let (rule, cost) = decode_answer_set(&m.atoms)?;
        if is_canonical(&rule, lang) {
            rules.push(SpaceRule::new(rule, cost));
        }
    }
    let exhaustive = result.exhaustive && result.status != Status::Unknown;
    Ok(HypothesisSpace::new(climit, rules, exhaustive))
}

//! Itemized rule cost.
//!
//! Every item is named after the aspect that incurs it and carries a data
//! term identifying the rule element (variable, literal, type, predicate).
//! Items and data terms coincide with the `cost/3` atoms of the ASP cost
//! module, so breakdowns from both backends compare directly.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::atom::Term;
use crate::config::CostConfig;
use crate::rule::{HypRule, Polarity};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CostItem {
    pub name: String,
    pub data: Term,
    pub cost: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CostBreakdown {
    pub items: Vec<CostItem>,
    pub total: i64,
}

impl CostBreakdown {
    pub fn from_items(mut items: Vec<CostItem>) -> Self {
        items.sort();
        let total = items.iter().map(|i| i.cost).sum();
        CostBreakdown { items, total }
    }

    /// Total capped at `climit`, as reported by the generation encoding.
    pub fn clamped(&self, climit: i64) -> i64 {
        self.total.min(climit)
    }

    /// Items with non-zero cost; zero items are an artifact of zero weights.
    pub fn nonzero_items(&self) -> Vec<&CostItem> {
        self.items.iter().filter(|i| i.cost != 0).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CostSummary {
    pub total: i64,
    pub items: Vec<(String, String, i64)>,
}

impl From<&CostBreakdown> for CostSummary {
    fn from(b: &CostBreakdown) -> Self {
        CostSummary {
            total: b.total,
            items: b
                .items
                .iter()
                .map(|i| (i.name.clone(), i.data.to_string(), i.cost))
                .collect(),
        }
    }
}

fn lit_key(id: Term, pol: Polarity) -> Term {
    Term::Tuple(vec![id, Term::sym(pol.as_str())])
}

pub fn rule_cost(rule: &HypRule, cfg: &CostConfig) -> CostBreakdown {
    let mut items = Vec::new();
    let mut push = |name: &str, data: Term, cost: i64| {
        items.push(CostItem {
            name: name.to_string(),
            data,
            cost,
        })
    };

    let nvars = rule.vars.len() as i64;
    if nvars > cfg.free_vars {
        push(
            "vars",
            Term::Int(nvars),
            (nvars - cfg.free_vars) * cfg.cost_vars,
        );
    }

    let mut per_type: BTreeMap<&str, i64> = BTreeMap::new();
    for v in &rule.vars {
        *per_type.entry(v.ty.as_str()).or_default() += 1;
    }
    for (ty, k) in per_type {
        if k > 2 {
            push(
                "vartype_morethantwice",
                Term::sym(ty),
                (k - 2) * cfg.cost_type_usedmorethantwice,
            );
        }
    }

    for l in &rule.body {
        match l.polarity {
            Polarity::Pos => push("posbodyliteral", l.id_term(), cfg.cost_posbodyliteral),
            Polarity::Neg => push("negbodyliteral", l.id_term(), cfg.cost_negbodyliteral),
        }
        // every use beyond the first of a (predicate, polarity) pair
        if l.slot > 1 {
            push(
                "pred_multi",
                lit_key(l.id_term(), l.polarity),
                cfg.cost_pred_multi,
            );
        }
        if l.args.len() == 2 && l.args[0] == l.args[1] {
            push(
                "reflexive",
                lit_key(l.id_term(), l.polarity),
                cfg.cost_reflexive,
            );
        }
    }

    for v in &rule.vars {
        let in_head = rule.head.args.contains(v);
        let body_lits = rule.body.iter().filter(|l| l.args.contains(v)).count();
        if in_head && body_lits == 0 {
            push("varonlyhead", v.term(), cfg.cost_varonlyhead);
        }
        if !in_head && body_lits == 1 {
            push("varonlyoncebody", v.term(), cfg.cost_varonlyoncebody);
        }
        if body_lits + usize::from(in_head) > 2 {
            push(
                "var_boundmorethantwice",
                v.term(),
                cfg.cost_var_boundmorethantwice,
            );
        }
    }

    let used: BTreeSet<String> = rule.invented.iter().map(|p| p.name()).collect();
    if !used.is_empty() {
        push("inv", Term::Int(0), cfg.cost_inv);
    }
    for name in &used {
        push("inv_pred", Term::sym(name.clone()), cfg.cost_inv_pred);
    }
    let body_inv: Vec<&str> = rule
        .body
        .iter()
        .filter(|l| used.contains(&l.pred_id))
        .map(|l| l.pred_id.as_str())
        .collect();
    let head_inv = used
        .contains(&rule.head.pred_id)
        .then_some(rule.head.pred_id.as_str());
    if let Some(h) = head_inv {
        if body_inv.contains(&h) {
            push("inv_headbody", Term::sym(h), cfg.cost_inv_headbody);
        }
        let distinct_body: BTreeSet<&str> = body_inv.iter().copied().collect();
        for b in distinct_body {
            if b != h && h >= b {
                push(
                    "inv_headbodyorder",
                    Term::Tuple(vec![Term::sym(h), Term::sym(b)]),
                    cfg.cost_inv_headbodyorder,
                );
            }
        }
    }
    if body_inv.len() >= 2 {
        push("inv_bodymulti", Term::Int(0), cfg.cost_inv_bodymulti);
    }

    CostBreakdown::from_items(items)
}

//! Direct enumeration of the hypothesis space.
//!
//! Backtracks over invented-predicate signatures, head predicate, number of
//! variables per type and a set of body atoms. Literal slots are derived from
//! variable signatures, so C2 and C4 hold by construction; everything else is
//! checked with [`is_canonical`]. A partial-cost lower bound built from the
//! cost items that can only grow as literals are added cuts branches that
//! already reach the limit.

use std::collections::BTreeMap;

use crate::canonical::{assign_slots, is_canonical};
use crate::config::CostConfig;
use crate::cost::rule_cost;
use crate::rule::{
    invented_name, HypHead, HypLiteral, HypRule, HypVar, InventedPred, Language, Polarity,
};
use crate::space::{HypothesisSpace, SpaceRule};

#[derive(Debug, Clone, Copy)]
pub struct NativeOptions {
    pub invention: bool,
    /// Partial-cost pruning; disabling it only costs time.
    pub prune: bool,
}

impl Default for NativeOptions {
    fn default() -> Self {
        NativeOptions {
            invention: true,
            prune: true,
        }
    }
}

pub fn enumerate_space(lang: &Language, cfg: &CostConfig, climit: i64) -> HypothesisSpace {
    enumerate_with(lang, cfg, climit, NativeOptions::default())
}

#[derive(Clone)]
struct BodyPred {
    id: String,
    name: String,
    arg_types: Vec<String>,
    invented: bool,
}

#[derive(Clone)]
struct Atom {
    pred: usize,
    polarity: Polarity,
    args: Vec<HypVar>,
}

pub fn enumerate_with(
    lang: &Language,
    cfg: &CostConfig,
    climit: i64,
    opts: NativeOptions,
) -> HypothesisSpace {
    let mut out = Vec::new();
    for invented in invention_combos(lang, opts.invention) {
        let mut heads = vec![HeadChoice {
            id: lang.bias.target.id.clone(),
            name: lang.bias.target.name.clone(),
            arg_types: lang.bias.target.arg_types.clone(),
        }];
        heads.extend(invented.iter().map(|p| HeadChoice {
            id: p.name(),
            name: p.name(),
            arg_types: p.arg_types.clone(),
        }));
        for head in &heads {
            enumerate_head(lang, cfg, climit, opts, &invented, head, &mut out);
        }
    }
    HypothesisSpace::new(climit, out, true)
}

struct HeadChoice {
    id: String,
    name: String,
    arg_types: Vec<String>,
}

/// Every assignment of "unused" or a sorted type signature to each
/// invention slot.
fn invention_combos(lang: &Language, enabled: bool) -> Vec<Vec<InventedPred>> {
    let l = &lang.limits;
    let mut combos: Vec<Vec<InventedPred>> = vec![vec![]];
    if !enabled {
        return combos;
    }
    let ntypes = lang.types.len();
    for slot in 1..=l.maxinventpred {
        let mut sigs: Vec<Vec<String>> = Vec::new();
        for arity in l.inv_minarity..=l.inv_maxarity {
            for ids in sorted_tuples(ntypes, arity as usize) {
                sigs.push(
                    ids.iter()
                        .map(|&i| lang.types.name(i).unwrap().to_string())
                        .collect(),
                );
            }
        }
        let mut next = Vec::new();
        for c in &combos {
            next.push(c.clone());
            for s in &sigs {
                let mut c = c.clone();
                c.push(InventedPred {
                    slot,
                    arg_types: s.clone(),
                });
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// Non-decreasing tuples of length `len` over `0..n`.
fn sorted_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, len, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, len, 0, &mut Vec::new(), &mut out);
    out
}

/// Every tuple of length `len` with element `j` drawn from `choices[j]`.
fn tuples(choices: &[Vec<HypVar>]) -> Vec<Vec<HypVar>> {
    let mut out: Vec<Vec<HypVar>> = vec![vec![]];
    for c in choices {
        let mut next = Vec::new();
        for prefix in &out {
            for v in c {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn enumerate_head(
    lang: &Language,
    cfg: &CostConfig,
    climit: i64,
    opts: NativeOptions,
    invented: &[InventedPred],
    head: &HeadChoice,
    out: &mut Vec<SpaceRule>,
) {
    let ntypes = lang.types.len();
    let maxvars = lang.limits.maxvars;

    // Head arguments take the lowest indices of their type, in position order.
    let mut head_count = vec![0u32; ntypes];
    let mut head_args = Vec::new();
    for ty in &head.arg_types {
        let Some(tid) = lang.type_id(ty) else { return };
        if head_count[tid] >= maxvars {
            return;
        }
        head_args.push(lang.var(tid, head_count[tid]));
        head_count[tid] += 1;
    }

    let mut preds: Vec<BodyPred> = lang
        .bias
        .relevant
        .iter()
        .map(|r| BodyPred {
            id: r.id.clone(),
            name: r.name.clone(),
            arg_types: r.arg_types.clone(),
            invented: false,
        })
        .collect();
    preds.extend(invented.iter().map(|p| BodyPred {
        id: p.name(),
        name: p.name(),
        arg_types: p.arg_types.clone(),
        invented: true,
    }));

    let fixed_inv = if invented.is_empty() {
        0
    } else {
        cfg.cost_inv + cfg.cost_inv_pred * invented.len() as i64
    };

    // Per-type variable counts between the head's needs and maxvars.
    let mut counts = vec![head_count.clone()];
    for tid in 0..ntypes {
        let mut next = Vec::new();
        for c in &counts {
            for n in head_count[tid]..=maxvars {
                let mut c = c.clone();
                c[tid] = n;
                next.push(c);
            }
        }
        counts = next;
    }

    for count in counts {
        let nvars: i64 = count.iter().map(|&n| n as i64).sum();
        let mut fixed = fixed_inv;
        if nvars > cfg.free_vars {
            fixed += (nvars - cfg.free_vars) * cfg.cost_vars;
        }
        for &n in &count {
            if n > 2 {
                fixed += (n as i64 - 2) * cfg.cost_type_usedmorethantwice;
            }
        }
        if opts.prune && fixed >= climit {
            continue;
        }

        let vars_of: Vec<Vec<HypVar>> = (0..ntypes)
            .map(|tid| (0..count[tid]).map(|o| lang.var(tid, o)).collect())
            .collect();
        let mut atoms = Vec::new();
        for (pi, p) in preds.iter().enumerate() {
            let choices: Option<Vec<Vec<HypVar>>> = p
                .arg_types
                .iter()
                .map(|t| lang.type_id(t).map(|tid| vars_of[tid].clone()))
                .collect();
            let Some(choices) = choices else { continue };
            for args in tuples(&choices) {
                for (pol, max) in [
                    (Polarity::Pos, lang.limits.maxuseppred),
                    (Polarity::Neg, lang.limits.maxusenpred),
                ] {
                    if max > 0 {
                        atoms.push(Atom {
                            pred: pi,
                            polarity: pol,
                            args: args.clone(),
                        });
                    }
                }
            }
        }

        let all_vars: Vec<HypVar> = vars_of.iter().flatten().cloned().collect();
        let mut search = Search {
            lang,
            cfg,
            climit,
            opts,
            head,
            head_args: &head_args,
            preds: &preds,
            invented,
            atoms: &atoms,
            all_vars: &all_vars,
            fixed,
            chosen: Vec::new(),
            out,
        };
        search.run(0);
    }
}

struct Search<'a> {
    lang: &'a Language,
    cfg: &'a CostConfig,
    climit: i64,
    opts: NativeOptions,
    head: &'a HeadChoice,
    head_args: &'a [HypVar],
    preds: &'a [BodyPred],
    invented: &'a [InventedPred],
    atoms: &'a [Atom],
    all_vars: &'a [HypVar],
    fixed: i64,
    chosen: Vec<usize>,
    out: &'a mut Vec<SpaceRule>,
}

impl Search<'_> {
    fn run(&mut self, start: usize) {
        self.leaf();
        if self.chosen.len() >= self.lang.limits.maxliterals as usize {
            return;
        }
        for i in start..self.atoms.len() {
            if !self.admissible(i) {
                continue;
            }
            self.chosen.push(i);
            if !self.opts.prune || self.lower_bound() < self.climit {
                self.run(i + 1);
            }
            self.chosen.pop();
        }
    }

    fn admissible(&self, i: usize) -> bool {
        let a = &self.atoms[i];
        let max = match a.polarity {
            Polarity::Pos => self.lang.limits.maxuseppred,
            Polarity::Neg => self.lang.limits.maxusenpred,
        };
        let mut same_group = 0;
        for &j in &self.chosen {
            let b = &self.atoms[j];
            if b.pred == a.pred && b.args == a.args {
                return false;
            }
            if b.pred == a.pred && b.polarity == a.polarity {
                same_group += 1;
            }
        }
        same_group < max
    }

    /// Sum of the cost items that adding literals can never decrease.
    fn lower_bound(&self) -> i64 {
        let cfg = self.cfg;
        let mut lb = self.fixed;
        let mut groups: BTreeMap<(usize, Polarity), i64> = BTreeMap::new();
        let mut occ: BTreeMap<u32, i64> = BTreeMap::new();
        for v in self.head_args {
            occ.insert(v.index, 1);
        }
        let mut inv_lits = 0;
        let mut head_in_body = false;
        let mut order_pairs = std::collections::BTreeSet::new();
        for &j in &self.chosen {
            let a = &self.atoms[j];
            lb += match a.polarity {
                Polarity::Pos => cfg.cost_posbodyliteral,
                Polarity::Neg => cfg.cost_negbodyliteral,
            };
            *groups.entry((a.pred, a.polarity)).or_default() += 1;
            if a.args.len() == 2 && a.args[0] == a.args[1] {
                lb += cfg.cost_reflexive;
            }
            let mut seen = std::collections::BTreeSet::new();
            for v in &a.args {
                if seen.insert(v.index) {
                    *occ.entry(v.index).or_default() += 1;
                }
            }
            let p = &self.preds[a.pred];
            if p.invented {
                inv_lits += 1;
                if p.id == self.head.id {
                    head_in_body = true;
                } else if self
                    .preds
                    .iter()
                    .any(|q| q.invented && q.id == self.head.id)
                    && self.head.id.as_str() >= p.id.as_str()
                {
                    order_pairs.insert(p.id.clone());
                }
            }
        }
        for n in groups.values() {
            lb += (n - 1) * cfg.cost_pred_multi;
        }
        lb += occ.values().filter(|&&n| n > 2).count() as i64 * cfg.cost_var_boundmorethantwice;
        if head_in_body {
            lb += cfg.cost_inv_headbody;
        }
        if inv_lits >= 2 {
            lb += cfg.cost_inv_bodymulti;
        }
        lb += order_pairs.len() as i64 * cfg.cost_inv_headbodyorder;
        lb
    }

    fn leaf(&mut self) {
        let covered = |v: &HypVar| {
            self.head_args.contains(v)
                || self.chosen.iter().any(|&j| self.atoms[j].args.contains(v))
        };
        if !self.all_vars.iter().all(covered) {
            return;
        }
        let used = |name: &str| {
            self.head.id == name
                || self
                    .chosen
                    .iter()
                    .any(|&j| self.preds[self.atoms[j].pred].id == name)
        };
        if !self
            .invented
            .iter()
            .all(|p| used(&invented_name(p.slot, p.arity())))
        {
            return;
        }
        let mut body: Vec<HypLiteral> = self
            .chosen
            .iter()
            .map(|&j| {
                let a = &self.atoms[j];
                let p = &self.preds[a.pred];
                HypLiteral {
                    pred_id: p.id.clone(),
                    predicate: p.name.clone(),
                    polarity: a.polarity,
                    slot: 0,
                    args: a.args.clone(),
                }
            })
            .collect();
        assign_slots(&mut body);
        let rule = HypRule::new(
            HypHead {
                pred_id: self.head.id.clone(),
                predicate: self.head.name.clone(),
                args: self.head_args.to_vec(),
            },
            body,
            self.invented.to_vec(),
        );
        let cost = rule_cost(&rule, self.cfg);
        if cost.total >= self.climit {
            return;
        }
        if !is_canonical(&rule, self.lang) {
            return;
        }
        self.out.push(SpaceRule::new(rule, cost));
    }
}

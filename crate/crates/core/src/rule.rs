//! Candidate rules of the hypothesis space.
//!
//! Variables carry a global index `v(Idx)`. Each type owns a contiguous block
//! of `maxvars` indices starting at `(type_id + 1) * (maxvars + 1)`, so with
//! the default limits the first `cell` variable is `V5` and the first `time`
//! variable is `V10`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::atom::Term;
use crate::bias::{ModeBias, PredicateSchema, TypeTable};
use crate::config::HardLimits;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HypVar {
    pub index: u32,
    pub ty: String,
}

impl HypVar {
    pub fn new(index: u32, ty: impl Into<String>) -> Self {
        HypVar {
            index,
            ty: ty.into(),
        }
    }

    pub fn term(&self) -> Term {
        Term::func("v", vec![Term::Int(self.index as i64)])
    }
}

impl fmt::Display for HypVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Pos => "pos",
            Polarity::Neg => "neg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pos" => Some(Polarity::Pos),
            "neg" => Some(Polarity::Neg),
            _ => None,
        }
    }
}

/// An invented predicate `ip_<slot>_<arity>` with its argument types.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InventedPred {
    pub slot: u32,
    pub arg_types: Vec<String>,
}

impl InventedPred {
    pub fn name(&self) -> String {
        invented_name(self.slot, self.arg_types.len())
    }

    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

pub fn invented_name(slot: u32, arity: usize) -> String {
    format!("ip_{slot}_{arity}")
}

/// Parses `ip_<slot>_<arity>`.
pub fn parse_invented_name(name: &str) -> Option<(u32, usize)> {
    let rest = name.strip_prefix("ip_")?;
    let (k, a) = rest.split_once('_')?;
    Some((k.parse().ok()?, a.parse().ok()?))
}

/// Sort key for predicate identifiers: `r<N>` numerically, then invented
/// predicates by slot and arity, then anything else.
pub fn pred_order_key(id: &str) -> (u8, u64, u64, &str) {
    if let Some(n) = id.strip_prefix('r').and_then(|n| n.parse().ok()) {
        return (0, n, 0, id);
    }
    if let Some((k, a)) = parse_invented_name(id) {
        return (1, k as u64, a as u64, id);
    }
    (2, 0, 0, id)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypLiteral {
    pub pred_id: String,
    pub predicate: String,
    pub polarity: Polarity,
    /// Running index among body literals with the same predicate and polarity.
    pub slot: u32,
    pub args: Vec<HypVar>,
}

impl HypLiteral {
    /// The `id_idx(Id,Idx)` literal identifier.
    pub fn id_term(&self) -> Term {
        Term::func(
            "id_idx",
            vec![Term::sym(self.pred_id.clone()), Term::Int(self.slot as i64)],
        )
    }

    fn order(&self, other: &Self) -> Ordering {
        self.polarity
            .cmp(&other.polarity)
            .then_with(|| pred_order_key(&self.pred_id).cmp(&pred_order_key(&other.pred_id)))
            .then_with(|| self.slot.cmp(&other.slot))
            .then_with(|| self.args.cmp(&other.args))
    }
}

impl fmt::Display for HypLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::Neg {
            f.write_str("not ")?;
        }
        write_atom(f, &self.predicate, &self.args)
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, pred: &str, args: &[HypVar]) -> fmt::Result {
    f.write_str(pred)?;
    if !args.is_empty() {
        f.write_str("(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypHead {
    pub pred_id: String,
    pub predicate: String,
    pub args: Vec<HypVar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypRule {
    pub head: HypHead,
    /// Positive literals first, then by predicate and slot.
    pub body: Vec<HypLiteral>,
    /// Variables used anywhere in the rule, ordered by index.
    pub vars: Vec<HypVar>,
    /// Invented predicates the rule refers to, ordered by slot.
    pub invented: Vec<InventedPred>,
}

impl HypRule {
    /// Builds a rule, normalizing body order and collecting variables.
    pub fn new(head: HypHead, mut body: Vec<HypLiteral>, invented: Vec<InventedPred>) -> Self {
        body.sort_by(HypLiteral::order);
        let vars: BTreeSet<HypVar> = head
            .args
            .iter()
            .chain(body.iter().flat_map(|l| l.args.iter()))
            .cloned()
            .collect();
        let mut invented = invented;
        invented.sort();
        invented.dedup();
        HypRule {
            head,
            body,
            vars: vars.into_iter().collect(),
            invented,
        }
    }

    pub fn is_invented(&self, pred_id: &str) -> bool {
        self.invented.iter().any(|p| p.name() == pred_id)
    }

    /// ASP text with one domain literal `type(V)` per variable.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Rendering with an extra body atom appended, e.g. `use(r_...)`.
    pub fn render_with_guard(&self, guard: &str) -> String {
        let mut s = self.to_string();
        s.pop();
        if self.vars.is_empty() && self.body.is_empty() {
            format!("{s} :- {guard}.")
        } else {
            format!("{s}, {guard}.")
        }
    }
}

impl fmt::Display for HypRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_atom(f, &self.head.predicate, &self.head.args)?;
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            let s = if first { " :- " } else { ", " };
            first = false;
            f.write_str(s)
        };
        for v in &self.vars {
            sep(f)?;
            write!(f, "{}({v})", v.ty)?;
        }
        for l in &self.body {
            sep(f)?;
            write!(f, "{l}")?;
        }
        f.write_str(".")
    }
}

/// Bias, type identifiers and hard limits: everything needed to interpret
/// variable indices and predicate identifiers of a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub bias: ModeBias,
    pub types: TypeTable,
    pub limits: HardLimits,
}

impl Language {
    pub fn new(bias: ModeBias, limits: HardLimits) -> Self {
        let types = bias.type_table();
        Language {
            bias,
            types,
            limits,
        }
    }

    fn block(&self) -> u32 {
        self.limits.maxvars + 1
    }

    pub fn var_index(&self, type_id: usize, ordinal: u32) -> u32 {
        (type_id as u32 + 1) * self.block() + ordinal
    }

    /// `(type_id, ordinal)` of a variable index, if it lies in some type's block.
    pub fn var_position(&self, index: u32) -> Option<(usize, u32)> {
        let type_id = (index / self.block()).checked_sub(1)? as usize;
        let ordinal = index % self.block();
        if type_id < self.types.len() && ordinal < self.limits.maxvars {
            Some((type_id, ordinal))
        } else {
            None
        }
    }

    pub fn var(&self, type_id: usize, ordinal: u32) -> HypVar {
        HypVar::new(
            self.var_index(type_id, ordinal),
            self.types.name(type_id).unwrap_or_default(),
        )
    }

    pub fn type_id(&self, ty: &str) -> Option<usize> {
        self.types.id(ty)
    }

    pub fn relevant(&self, pred_id: &str) -> Option<&PredicateSchema> {
        self.bias.relevant.iter().find(|r| r.id == pred_id)
    }

    /// Argument types of a head or body predicate, including invented ones
    /// declared by `rule`.
    pub fn arg_types<'a>(&'a self, rule: &'a HypRule, pred_id: &str) -> Option<&'a [String]> {
        if pred_id == self.bias.target.id {
            return Some(&self.bias.target.arg_types);
        }
        if let Some(r) = self.relevant(pred_id) {
            return Some(&r.arg_types);
        }
        rule.invented
            .iter()
            .find(|p| p.name() == pred_id)
            .map(|p| p.arg_types.as_slice())
    }
}

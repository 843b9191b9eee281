//! Hypothesis spaces: all canonical rules whose cost stays below a limit.
//!
//! Two generators produce the same space. [`asp`] emits the generation
//! encoding and decodes the solver's answer sets; [`native`] enumerates
//! rules directly and serves as the independent oracle for the former.

pub mod asp;
pub mod native;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cost::CostBreakdown;
use crate::rule::HypRule;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceRule {
    pub rule: HypRule,
    pub cost: CostBreakdown,
    /// Rendered rule text, cached.
    pub text: String,
}

impl SpaceRule {
    pub fn new(rule: HypRule, cost: CostBreakdown) -> Self {
        let text = rule.render();
        SpaceRule { rule, cost, text }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisSpace {
    pub climit: i64,
    /// Sorted by cost, then rendered text.
    pub rules: Vec<SpaceRule>,
    /// False when the generator stopped before enumerating everything.
    pub exhaustive: bool,
}

impl HypothesisSpace {
    pub fn new(climit: i64, mut rules: Vec<SpaceRule>, exhaustive: bool) -> Self {
        rules.sort_by(|a, b| (a.cost.total, &a.text).cmp(&(b.cost.total, &b.text)));
        rules.dedup_by(|a, b| a.text == b.text);
        HypothesisSpace {
            climit,
            rules,
            exhaustive,
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// `(rendered rule, cost)` pairs, the unit of backend comparison.
    pub fn pairs(&self) -> BTreeSet<(String, i64)> {
        self.rules
            .iter()
            .map(|r| (r.text.clone(), r.cost.total))
            .collect()
    }

    /// Number of rules per total cost.
    pub fn buckets(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for r in &self.rules {
            *m.entry(r.cost.total).or_default() += 1;
        }
        m
    }

    /// `cost<TAB>rule` lines, the `hypspace` command output.
    pub fn listing(&self) -> String {
        let mut s = String::new();
        for r in &self.rules {
            s.push_str(&format!("{}\t{}\n", r.cost.total, r.text));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Asp,
    Native,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "asp" => Ok(Backend::Asp),
            "native" => Ok(Backend::Native),
            other => Err(format!(
                "unknown backend `{other}` (expected asp or native)"
            )),
        }
    }
}

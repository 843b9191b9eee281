//! Mode bias: the target predicate and the relevant body predicates, their
//! integer type identifiers, and the fact representation consumed by the
//! hypothesis-space encoding.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::atom::{parse_term, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateSchema {
    /// Identifier used in generated facts (`t1`, `r1`, ...).
    pub id: String,
    pub name: String,
    pub arg_types: Vec<String>,
}

impl PredicateSchema {
    pub fn new(id: impl Into<String>, name: impl Into<String>, arg_types: Vec<String>) -> Self {
        PredicateSchema {
            id: id.into(),
            name: name.into(),
            arg_types,
        }
    }

    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }

    /// Parses a schema declaration such as `valid_move(cell,time)`.
    pub fn parse(id: impl Into<String>, text: &str) -> Result<Self, BiasError> {
        let text = text.trim();
        let text = text.strip_suffix('.').unwrap_or(text);
        let bad = || BiasError::MalformedSchema(text.to_string());
        let (name, args) = match parse_term(text).map_err(|_| bad())? {
            Term::Sym(s) => (s, Vec::new()),
            Term::Func(n, args) => (n, args),
            _ => return Err(bad()),
        };
        let arg_types = args
            .into_iter()
            .map(|a| match a {
                Term::Sym(s) => Ok(s),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PredicateSchema::new(id, name, arg_types))
    }
}

impl fmt::Display for PredicateSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.arg_types.is_empty() {
            write!(f, "({})", self.arg_types.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BiasError {
    #[error("malformed predicate schema `{0}`")]
    MalformedSchema(String),
    #[error("type `{0}` has no type identifier")]
    UnknownType(String),
    #[error("predicate identifier `{0}` is used twice")]
    DuplicateId(String),
    #[error("relevant predicate list is empty")]
    NoRelevant,
}

/// Type name to zero-based contiguous type identifier.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeTable {
    order: Vec<String>,
    ids: BTreeMap<String, usize>,
}

impl TypeTable {
    /// Assigns identifiers by first appearance: target arguments left to
    /// right, then relevant predicates in declaration order.
    pub fn assign(target: &PredicateSchema, relevant: &[PredicateSchema]) -> TypeTable {
        let mut table = TypeTable::default();
        for ty in target
            .arg_types
            .iter()
            .chain(relevant.iter().flat_map(|r| r.arg_types.iter()))
        {
            table.intern(ty);
        }
        table
    }

    fn intern(&mut self, ty: &str) -> usize {
        if let Some(&id) = self.ids.get(ty) {
            return id;
        }
        let id = self.order.len();
        self.order.push(ty.to_string());
        self.ids.insert(ty.to_string(), id);
        id
    }

    pub fn id(&self, ty: &str) -> Option<usize> {
        self.ids.get(ty).copied()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.order.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Type names in identifier order.
    pub fn names(&self) -> &[String] {
        &self.order
    }
}

/// Target predicate plus relevant body predicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeBias {
    pub target: PredicateSchema,
    pub relevant: Vec<PredicateSchema>,
}

impl ModeBias {
    /// Builds a bias from bare declarations, assigning ids `t1` and `r1..rN`.
    pub fn from_decls(target: &str, relevant: &[&str]) -> Result<Self, BiasError> {
        let target = PredicateSchema::parse("t1", target)?;
        let relevant = relevant
            .iter()
            .enumerate()
            .map(|(i, r)| PredicateSchema::parse(format!("r{}", i + 1), r))
            .collect::<Result<Vec<_>, _>>()?;
        let bias = ModeBias { target, relevant };
        bias.validate()?;
        Ok(bias)
    }

    pub fn validate(&self) -> Result<(), BiasError> {
        if self.relevant.is_empty() {
            return Err(BiasError::NoRelevant);
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in std::iter::once(&self.target).chain(&self.relevant) {
            if !seen.insert(p.id.as_str()) {
                return Err(BiasError::DuplicateId(p.id.clone()));
            }
        }
        Ok(())
    }

    pub fn type_table(&self) -> TypeTable {
        TypeTable::assign(&self.target, &self.relevant)
    }

    /// A copy without the relevant predicate called `name`, ids renumbered.
    pub fn without(&self, name: &str) -> ModeBias {
        let relevant = self
            .relevant
            .iter()
            .filter(|r| r.name != name)
            .enumerate()
            .map(|(i, r)| PredicateSchema::new(format!("r{}", i + 1), &r.name, r.arg_types.clone()))
            .collect();
        ModeBias {
            target: self.target.clone(),
            relevant,
        }
    }

    pub fn max_relevant_arity(&self) -> usize {
        self.relevant
            .iter()
            .map(PredicateSchema::arity)
            .max()
            .unwrap_or(0)
    }
}

/// Renders `tpred/3`, `targ/3`, `rpred/3`, `rarg/3` and `type_id/2` facts,
/// one per line.
pub fn emit_bias_facts(bias: &ModeBias, table: &TypeTable) -> Result<Vec<String>, BiasError> {
    let check = |ty: &String| {
        table
            .id(ty)
            .map(|_| ())
            .ok_or_else(|| BiasError::UnknownType(ty.clone()))
    };
    let mut facts = Vec::new();
    let t = &bias.target;
    facts.push(format!("tpred({},{},{}).", t.id, t.name, t.arity()));
    for (j, ty) in t.arg_types.iter().enumerate() {
        check(ty)?;
        facts.push(format!("targ({},{},{}).", t.id, j + 1, ty));
    }
    for r in &bias.relevant {
        facts.push(format!("rpred({},{},{}).", r.id, r.name, r.arity()));
        for (j, ty) in r.arg_types.iter().enumerate() {
            check(ty)?;
            facts.push(format!("rarg({},{},{}).", r.id, j + 1, ty));
        }
    }
    for (id, ty) in table.names().iter().enumerate() {
        facts.push(format!("type_id({ty},{id})."));
    }
    Ok(facts)
}

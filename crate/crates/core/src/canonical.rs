//! Redundancy elimination: which member of an alpha-equivalence class is
//! admitted into the hypothesis space.
//!
//! The structural conditions mirror the constraints of the redundancy
//! module of the generation encoding:
//!
//! * C1: per type, the used variables are the lowest indices of that type.
//! * C2: per predicate and polarity, the used slots are `1..k`.
//! * C3: head variables are the lowest used indices of their type, and two
//!   same-type head arguments appear in strictly increasing index order.
//! * C4: literals sharing predicate and polarity are ordered by slot exactly
//!   as their variable signatures are ordered.
//! * C5: no two body literals share predicate and argument tuple, whatever
//!   their polarity.
//! * C6: invented predicates have argument types sorted by type id and are
//!   actually used.
//!
//! These leave a few classes with more than one member (several body-only
//! variables of one type that occur in literals of different predicates).
//! [`is_canonical`] additionally requires the rule to be the least member of
//! its class among those satisfying C1-C6.

use std::collections::{BTreeMap, BTreeSet};

use crate::rule::{pred_order_key, HypLiteral, HypRule, HypVar, Language, Polarity};

/// Hard limits: variable blocks, slot bounds, body size, invention arities.
pub fn within_limits(rule: &HypRule, lang: &Language) -> bool {
    let l = &lang.limits;
    if rule.body.len() > l.maxliterals as usize {
        return false;
    }
    for v in &rule.vars {
        match lang.var_position(v.index) {
            Some((tid, _)) if lang.types.name(tid) == Some(v.ty.as_str()) => {}
            _ => return false,
        }
    }
    for lit in &rule.body {
        let max = match lit.polarity {
            Polarity::Pos => l.maxuseppred,
            Polarity::Neg => l.maxusenpred,
        };
        if lit.slot < 1 || lit.slot > max {
            return false;
        }
        match lang.arg_types(rule, &lit.pred_id) {
            Some(types) if types.len() == lit.args.len() => {
                if types.iter().zip(&lit.args).any(|(t, v)| *t != v.ty) {
                    return false;
                }
            }
            _ => return false,
        }
        if lit.pred_id == lang.bias.target.id {
            return false;
        }
    }
    match lang.arg_types(rule, &rule.head.pred_id) {
        Some(types) if types.len() == rule.head.args.len() => {
            if types.iter().zip(&rule.head.args).any(|(t, v)| *t != v.ty) {
                return false;
            }
        }
        _ => return false,
    }
    if rule.invented.len() > l.maxinventpred as usize {
        return false;
    }
    rule.invented.iter().all(|p| {
        p.slot >= 1
            && p.slot <= l.maxinventpred
            && (l.inv_minarity as usize..=l.inv_maxarity as usize).contains(&p.arity())
    })
}

fn ordinal(lang: &Language, v: &HypVar) -> u32 {
    lang.var_position(v.index)
        .map(|(_, o)| o)
        .unwrap_or(u32::MAX)
}

fn c1_prefix_vars(rule: &HypRule, lang: &Language) -> bool {
    let mut per_type: BTreeMap<&str, BTreeSet<u32>> = BTreeMap::new();
    for v in &rule.vars {
        per_type.entry(&v.ty).or_default().insert(ordinal(lang, v));
    }
    per_type
        .values()
        .all(|ords| ords.iter().enumerate().all(|(i, &o)| o == i as u32))
}

fn c2_prefix_slots(rule: &HypRule) -> bool {
    let mut groups: BTreeMap<(&str, Polarity), BTreeSet<u32>> = BTreeMap::new();
    for l in &rule.body {
        if !groups
            .entry((&l.pred_id, l.polarity))
            .or_default()
            .insert(l.slot)
        {
            return false;
        }
    }
    groups
        .values()
        .all(|s| s.iter().enumerate().all(|(i, &k)| k == i as u32 + 1))
}

fn c3_head(rule: &HypRule) -> bool {
    let head = &rule.head.args;
    for (j1, a) in head.iter().enumerate() {
        for b in &head[j1 + 1..] {
            if a.ty == b.ty && a.index >= b.index {
                return false;
            }
        }
        // lower same-type variables must be in the head as well
        for v in &rule.vars {
            if v.ty == a.ty && v.index < a.index && !head.contains(v) {
                return false;
            }
        }
    }
    true
}

fn signature(l: &HypLiteral) -> Vec<u32> {
    l.args.iter().map(|v| v.index).collect()
}

fn c4_signature_order(rule: &HypRule) -> bool {
    for a in &rule.body {
        for b in &rule.body {
            if a.pred_id == b.pred_id
                && a.polarity == b.polarity
                && a.slot < b.slot
                && signature(a) >= signature(b)
            {
                return false;
            }
        }
    }
    true
}

fn c5_no_duplicate_atoms(rule: &HypRule) -> bool {
    let mut seen = BTreeSet::new();
    rule.body
        .iter()
        .all(|l| seen.insert((l.pred_id.as_str(), signature(l))))
}

fn c6_invention(rule: &HypRule, lang: &Language) -> bool {
    for p in &rule.invented {
        let ids: Option<Vec<usize>> = p.arg_types.iter().map(|t| lang.type_id(t)).collect();
        match ids {
            Some(ids) if ids.windows(2).all(|w| w[0] <= w[1]) => {}
            _ => return false,
        }
        let name = p.name();
        if rule.head.pred_id != name && !rule.body.iter().any(|l| l.pred_id == name) {
            return false;
        }
    }
    let mut slots = BTreeSet::new();
    if !rule.invented.iter().all(|p| slots.insert(p.slot)) {
        return false;
    }
    let declared = |id: &str| {
        id == lang.bias.target.id
            || lang.relevant(id).is_some()
            || rule.invented.iter().any(|p| p.name() == id)
    };
    declared(&rule.head.pred_id) && rule.body.iter().all(|l| declared(&l.pred_id))
}

/// C1-C6 together with the hard limits; the admission test applied by the
/// generation encoding's constraints.
pub fn satisfies_constraints(rule: &HypRule, lang: &Language) -> bool {
    within_limits(rule, lang)
        && c1_prefix_vars(rule, lang)
        && c2_prefix_slots(rule)
        && c3_head(rule)
        && c4_signature_order(rule)
        && c5_no_duplicate_atoms(rule)
        && c6_invention(rule, lang)
}

/// Renames variables by `map` and recomputes literal slots from signatures.
pub(crate) fn rename(rule: &HypRule, map: &BTreeMap<u32, HypVar>) -> HypRule {
    let sub = |v: &HypVar| map.get(&v.index).cloned().unwrap_or_else(|| v.clone());
    let head = crate::rule::HypHead {
        pred_id: rule.head.pred_id.clone(),
        predicate: rule.head.predicate.clone(),
        args: rule.head.args.iter().map(sub).collect(),
    };
    let mut body: Vec<HypLiteral> = rule
        .body
        .iter()
        .map(|l| HypLiteral {
            args: l.args.iter().map(sub).collect(),
            ..l.clone()
        })
        .collect();
    assign_slots(&mut body);
    HypRule::new(head, body, rule.invented.clone())
}

/// Numbers literals `1..k` within each predicate/polarity group in
/// signature order.
pub fn assign_slots(body: &mut [HypLiteral]) {
    body.sort_by(|a, b| {
        (a.polarity, pred_order_key(&a.pred_id), signature(a)).cmp(&(
            b.polarity,
            pred_order_key(&b.pred_id),
            signature(b),
        ))
    });
    let mut counters: BTreeMap<(String, Polarity), u32> = BTreeMap::new();
    for l in body.iter_mut() {
        let c = counters.entry((l.pred_id.clone(), l.polarity)).or_default();
        *c += 1;
        l.slot = *c;
    }
}

type LiteralKey = (Polarity, (u8, u64, u64, String), Vec<u32>);

fn body_key(rule: &HypRule) -> Vec<LiteralKey> {
    let mut k: Vec<_> = rule
        .body
        .iter()
        .map(|l| {
            let (a, b, c, d) = pred_order_key(&l.pred_id);
            (l.polarity, (a, b, c, d.to_string()), signature(l))
        })
        .collect();
    k.sort();
    k
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every combination of per-group permutations.
fn product_of_permutations(groups: &[Vec<HypVar>]) -> Vec<BTreeMap<u32, HypVar>> {
    let mut maps = vec![BTreeMap::new()];
    for g in groups {
        let mut next = Vec::new();
        for p in permutations(g.len()) {
            for m in &maps {
                let mut m: BTreeMap<u32, HypVar> = m.clone();
                for (i, &j) in p.iter().enumerate() {
                    m.insert(g[i].index, g[j].clone());
                }
                next.push(m);
            }
        }
        maps = next;
    }
    maps
}

/// True iff the rule satisfies C1-C6 and no other member of its
/// alpha-equivalence class that also satisfies them has a smaller body key.
pub fn is_canonical(rule: &HypRule, lang: &Language) -> bool {
    if !satisfies_constraints(rule, lang) {
        return false;
    }
    // Under C3 head variables are fixed; only body-only variables of the same
    // type can be exchanged.
    let mut groups: BTreeMap<&str, Vec<HypVar>> = BTreeMap::new();
    for v in &rule.vars {
        if !rule.head.args.contains(v) {
            groups.entry(&v.ty).or_default().push(v.clone());
        }
    }
    let groups: Vec<Vec<HypVar>> = groups.into_values().filter(|g| g.len() > 1).collect();
    if groups.is_empty() {
        return true;
    }
    let own = body_key(rule);
    product_of_permutations(&groups).into_iter().all(|m| {
        let variant = rename(rule, &m);
        !satisfies_constraints(&variant, lang) || own <= body_key(&variant)
    })
}

/// A key shared by exactly the rules of one alpha-equivalence class
/// (type-preserving variable renaming and literal reordering). Computed by
/// brute force over all renamings onto the lowest indices, independent of
/// the C1-C6 machinery.
pub fn alpha_key(rule: &HypRule) -> String {
    let mut groups: BTreeMap<&str, Vec<HypVar>> = BTreeMap::new();
    for v in &rule.vars {
        groups.entry(&v.ty).or_default().push(v.clone());
    }
    let groups: Vec<(&str, Vec<HypVar>)> = groups.into_iter().collect();
    let mut best: Option<String> = None;
    let mut maps: Vec<BTreeMap<u32, String>> = vec![BTreeMap::new()];
    for (ty, g) in &groups {
        let mut next = Vec::new();
        for p in permutations(g.len()) {
            for m in &maps {
                let mut m = m.clone();
                for (i, &j) in p.iter().enumerate() {
                    m.insert(g[j].index, format!("{ty}#{i}"));
                }
                next.push(m);
            }
        }
        maps = next;
    }
    for m in maps {
        let name = |v: &HypVar| m[&v.index].clone();
        let head: Vec<String> = rule.head.args.iter().map(name).collect();
        let mut body: Vec<String> = rule
            .body
            .iter()
            .map(|l| {
                let args: Vec<String> = l.args.iter().map(name).collect();
                format!("{}:{}({})", l.polarity.as_str(), l.pred_id, args.join(","))
            })
            .collect();
        body.sort();
        let inv: Vec<String> = rule
            .invented
            .iter()
            .map(|p| format!("{}[{}]", p.name(), p.arg_types.join(",")))
            .collect();
        let key = format!(
            "{}({})<-{}|{}",
            rule.head.pred_id,
            head.join(","),
            body.join(";"),
            inv.join(";")
        );
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap_or_default()
}

use std::collections::BTreeMap;

use crate::ast::Ast;

use super::scope::{analyze, HOLE_PREFIX};

/// Most assignments tried per candidate; candidates with more are dropped.
pub const MAX_ASSIGNMENTS: usize = 64;

/// Fill holes with visible variables. Returns one program per injective
/// assignment of holes to compatible variables, holes whose own name is
/// visible trying it first and the rest in declaration order.
pub fn align_variables(candidate: &Ast) -> Vec<Ast> {
    align_variables_capped(candidate, MAX_ASSIGNMENTS)
}

/// [`align_variables`] with a custom cap on the number of assignments.
pub fn align_variables_capped(candidate: &Ast, cap: usize) -> Vec<Ast> {
    let du = analyze(&candidate.root);
    if du.holes.is_empty() {
        return vec![candidate.clone()];
    }
    // hole name -> names allowed at every occurrence
    let mut options: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    for h in &du.holes {
        let here: Vec<String> = h
            .visible
            .iter()
            .map(|&k| &du.vars[k])
            .filter(|v| v.satisfies(h.need))
            .map(|v| v.name.clone())
            .collect();
        match options.get_mut(h.name.as_str()) {
            Some(prev) => prev.retain(|n| here.contains(n)),
            None => {
                order.push(&h.name);
                options.insert(&h.name, here);
            }
        }
    }
    for (hole, names) in options.iter_mut() {
        let own = &hole[HOLE_PREFIX.len()..];
        if let Some(i) = names.iter().position(|n| n == own) {
            let n = names.remove(i);
            names.insert(0, n);
        }
    }
    let slots: Vec<&Vec<String>> = order.iter().map(|h| &options[h]).collect();
    let mut picks: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    if !search(&slots, cap, &mut cur, &mut picks) {
        return Vec::new();
    }
    picks
        .into_iter()
        .map(|pick| {
            let mut root = candidate.root.clone();
            for h in &du.holes {
                let slot = order.iter().position(|o| *o == h.name).unwrap();
                root.get_mut(&h.path).unwrap().label = slots[slot][pick[slot]].clone();
            }
            candidate.with_root(root)
        })
        .collect()
}

/// Depth-first over injective choices; false once the cap is exceeded.
fn search(slots: &[&Vec<String>], cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> bool {
    let Some(names) = slots.get(cur.len()) else {
        out.push(cur.clone());
        return out.len() <= cap;
    };
    for (i, n) in names.iter().enumerate() {
        if cur.iter().enumerate().any(|(s, &j)| &slots[s][j] == n) {
            continue;
        }
        cur.push(i);
        let ok = search(slots, cap, cur, out);
        cur.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Keep candidates that introduce neither undeclared uses nor unused locals
/// beyond those already present in `original`.
pub fn filter_spurious(candidates: Vec<Ast>, original: &Ast) -> Vec<Ast> {
    let base = analyze(&original.root);
    let base_unused = base.unused_locals();
    candidates
        .into_iter()
        .filter(|c| {
            let du = analyze(&c.root);
            du.holes.is_empty()
                && du.undeclared.is_subset(&base.undeclared)
                && du.unused_locals().is_subset(&base_unused)
        })
        .collect()
}

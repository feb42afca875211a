//! Structural equality modulo consistent renaming of identifiers.

use std::collections::BTreeMap;

use crate::ast::{Node, NodeKind};

/// A partial bijection between identifier names of two trees.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    fwd: BTreeMap<String, String>,
    back: BTreeMap<String, String>,
}

impl Renaming {
    pub fn new() -> Self {
        Renaming::default()
    }

    /// Record `a ↦ b`; false if it conflicts with an existing binding.
    pub fn bind(&mut self, a: &str, b: &str) -> bool {
        match (self.fwd.get(a), self.back.get(b)) {
            (Some(x), _) if x != b => false,
            (_, Some(y)) if y != a => false,
            (Some(_), Some(_)) => true,
            _ => {
                self.fwd.insert(a.to_string(), b.to_string());
                self.back.insert(b.to_string(), a.to_string());
                true
            }
        }
    }

    pub fn get(&self, a: &str) -> Option<&str> {
        self.fwd.get(a).map(String::as_str)
    }

    pub fn inverse_get(&self, b: &str) -> Option<&str> {
        self.back.get(b).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.fwd.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_identity(&self) -> bool {
        self.fwd.iter().all(|(a, b)| a == b)
    }
}

/// Split a function label `"<type> <name>"` into its parts.
pub fn split_func_label(label: &str) -> (&str, &str) {
    match label.rfind(' ') {
        Some(i) => (&label[..i], &label[i + 1..]),
        None => ("", label),
    }
}

/// Do the node labels agree, binding names into `r` where they are names?
pub fn labels_match(a: &Node, b: &Node, r: &mut Renaming) -> bool {
    if a.kind != b.kind {
        return false;
    }
    match a.kind {
        NodeKind::Identifier => r.bind(&a.label, &b.label),
        NodeKind::FuncDef => {
            let (ta, na) = split_func_label(&a.label);
            let (tb, nb) = split_func_label(&b.label);
            ta == tb && r.bind(na, nb)
        }
        _ => a.label == b.label,
    }
}

/// Structural equality under one renaming, extended in place. On failure
/// `r` may hold partial bindings; callers clone first if that matters.
pub fn alpha_eq_in(a: &Node, b: &Node, r: &mut Renaming) -> bool {
    labels_match(a, b, r)
        && a.children.len() == b.children.len()
        && a.children.iter().zip(&b.children).all(|(x, y)| alpha_eq_in(x, y, r))
}

pub fn alpha_eq(a: &Node, b: &Node) -> bool {
    alpha_eq_in(a, b, &mut Renaming::new())
}

/// Several corresponding parts that must match under one shared renaming.
pub fn alpha_eq_all(pairs: &[(&Node, &Node)]) -> bool {
    let mut r = Renaming::new();
    pairs.iter().all(|(a, b)| alpha_eq_in(a, b, &mut r))
}

/// Rename identifiers to `v0, v1, ...` in first-occurrence pre-order, so
/// alpha-equivalent trees become equal.
pub fn canonical(n: &Node) -> Node {
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let mut out = n.clone();
    canonicalize(&mut out, &mut names);
    out
}

pub(crate) fn canonicalize(n: &mut Node, names: &mut BTreeMap<String, String>) {
    let fresh = |name: &str, names: &mut BTreeMap<String, String>| -> String {
        let k = names.len();
        names.entry(name.to_string()).or_insert_with(|| format!("v{k}")).clone()
    };
    match n.kind {
        NodeKind::Identifier => n.label = fresh(&n.label, names),
        NodeKind::FuncDef => {
            let (ty, name) = split_func_label(&n.label);
            let (ty, name) = (ty.to_string(), name.to_string());
            n.label = format!("{ty} {}", fresh(&name, names));
        }
        _ => {}
    }
    for c in &mut n.children {
        canonicalize(c, names);
    }
}

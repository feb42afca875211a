//! Locating pattern matches in a target program.

use std::collections::BTreeMap;

use crate::alpha::{labels_match, Renaming};
use crate::ast::{Ast, Node, NodeKind};
use crate::merge::{placeholder_id, MergeNode, MergeTreePool};

/// How to build the replacement for a matched subtree.
#[derive(Debug, Clone, PartialEq)]
pub enum Emit {
    /// Keep the target subtree at this path.
    Target(Vec<usize>),
    /// A matched node, rebuilt from the target's kind and label.
    Node { kind: NodeKind, label: String, children: Vec<Emit> },
    /// Content from the pattern's correct side, to be renamed.
    Pattern(Node),
}

/// A place in the target where a pooled pattern applies.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSite {
    /// Path of the matched subtree from the target root.
    pub path: Vec<usize>,
    pub pattern_index: usize,
    /// Pattern identifier ↦ target identifier.
    pub rename: Renaming,
    /// Placeholder correlation id ↦ target subtree path.
    pub bindings: BTreeMap<usize, Vec<usize>>,
    /// Target paths of the nodes consumed by the pattern, in match order.
    pub embedding: Vec<Vec<usize>>,
    /// Replacement nodes for the matched subtree (none for a deletion).
    pub plan: Vec<Emit>,
    /// Digest of the matched subtree at match time.
    pub digest: String,
    pub frequency: u64,
    pub transformation_size: f64,
}

#[derive(Clone, Default)]
struct State {
    rename: Renaming,
    bindings: BTreeMap<usize, Vec<usize>>,
    embedding: Vec<Vec<usize>>,
}

fn child_path(parent: &[usize], i: usize) -> Vec<usize> {
    let mut p = parent.to_vec();
    p.push(i);
    p
}

/// Match a plain payload node (from a marker) against a target subtree.
fn match_node(p: &Node, t: &Node, path: &[usize], st: &mut State) -> bool {
    if let Some(k) = placeholder_id(p) {
        return t.is_control_flow() && bind(st, k, path);
    }
    if !labels_match(p, t, &mut st.rename) || p.children.len() != t.children.len() {
        return false;
    }
    st.embedding.push(path.to_vec());
    p.children.iter().zip(&t.children).enumerate().all(|(i, (pc, tc))| match_node(pc, tc, &child_path(path, i), st))
}

fn bind(st: &mut State, k: usize, path: &[usize]) -> bool {
    match st.bindings.get(&k) {
        Some(p) => p == path,
        None => {
            st.bindings.insert(k, path.to_vec());
            st.embedding.push(path.to_vec());
            true
        }
    }
}

fn match_plain(m: &MergeNode, t: &Node, path: &[usize], mut st: State) -> Option<(State, Emit)> {
    let MergeNode::Plain { kind, label, children } = m else { return None };
    let head = Node::leaf(*kind, label.clone());
    if let Some(k) = placeholder_id(&head) {
        return (t.is_control_flow() && bind(&mut st, k, path)).then(|| (st, Emit::Target(path.to_vec())));
    }
    if !labels_match(&head, t, &mut st.rename) {
        return None;
    }
    st.embedding.push(path.to_vec());
    let (st, kids) = match_seq(children, 0, &t.children, 0, path, st)?;
    Some((st, Emit::Node { kind: t.kind, label: t.label.clone(), children: kids }))
}

/// Match pattern children `ps[pi..]` against target children `ts[ti..]`.
/// Plain children are mandatory; markers may consume target children or not.
fn match_seq(
    ps: &[MergeNode],
    pi: usize,
    ts: &[Node],
    ti: usize,
    parent: &[usize],
    st: State,
) -> Option<(State, Vec<Emit>)> {
    let Some(p) = ps.get(pi) else {
        return (ti == ts.len()).then(|| (st, Vec::new()));
    };
    let prepend = |e: Option<Emit>, rest: Option<(State, Vec<Emit>)>| {
        rest.map(|(s, mut v)| {
            if let Some(e) = e {
                v.insert(0, e);
            }
            (s, v)
        })
    };
    // try consuming `nodes` in order at ts[ti..]
    let consume = |nodes: &[&Node], st: &State| -> Option<State> {
        let mut s = st.clone();
        for (k, n) in nodes.iter().enumerate() {
            let t = ts.get(ti + k)?;
            if !match_node(n, t, &child_path(parent, ti + k), &mut s) {
                return None;
            }
        }
        Some(s)
    };
    match p {
        MergeNode::Plain { .. } => {
            let t = ts.get(ti)?;
            let (s, e) = match_plain(p, t, &child_path(parent, ti), st)?;
            prepend(Some(e), match_seq(ps, pi + 1, ts, ti + 1, parent, s))
        }
        MergeNode::Inserted(n) => prepend(Some(Emit::Pattern(n.clone())), match_seq(ps, pi + 1, ts, ti, parent, st)),
        MergeNode::Deleted(n) => {
            if let Some(s) = consume(&[n], &st) {
                if let Some(r) = match_seq(ps, pi + 1, ts, ti + 1, parent, s) {
                    return Some(r);
                }
            }
            match_seq(ps, pi + 1, ts, ti, parent, st)
        }
        MergeNode::Mutated { from, to } => {
            let options: [&[&Node]; 5] = [&[from, to], &[to, from], &[from], &[to], &[]];
            for opt in options {
                if let Some(s) = consume(opt, &st) {
                    let rest = match_seq(ps, pi + 1, ts, ti + opt.len(), parent, s);
                    if let Some(r) = prepend(Some(Emit::Pattern(to.clone())), rest) {
                        return Some(r);
                    }
                }
            }
            None
        }
    }
}

/// Try one pattern at one target subtree.
fn match_root(m: &MergeNode, t: &Node, path: &[usize]) -> Option<(State, Vec<Emit>)> {
    match m {
        MergeNode::Plain { .. } => match_plain(m, t, path, State::default()).map(|(s, e)| (s, vec![e])),
        MergeNode::Mutated { from, to } => {
            let mut s = State::default();
            match_node(from, t, path, &mut s).then(|| (s, vec![Emit::Pattern(to.clone())]))
        }
        MergeNode::Deleted(n) => {
            let mut s = State::default();
            match_node(n, t, path, &mut s).then(|| (s, Vec::new()))
        }
        MergeNode::Inserted(_) => None,
    }
}

/// Every (subtree, pattern) match. Candidate subtrees are the control-flow
/// rooted ones plus the whole program; at most one site per pair.
pub fn find_matches(target: &Ast, pool: &MergeTreePool) -> Vec<MatchSite> {
    let mut roots: Vec<Vec<usize>> = vec![Vec::new()];
    target.root.walk_with_path(&mut |p, n| {
        if !p.is_empty() && n.is_control_flow() {
            roots.push(p.to_vec());
        }
    });
    let mut out = Vec::new();
    for path in roots {
        let t = target.root.get(&path).unwrap();
        let digest = t.digest();
        for (k, e) in pool.entries().iter().enumerate() {
            if e.tree.root.incorrect_kind() != Some(t.kind) {
                continue;
            }
            if let Some((st, plan)) = match_root(&e.tree.root, t, &path) {
                out.push(MatchSite {
                    path: path.clone(),
                    pattern_index: k,
                    rename: st.rename,
                    bindings: st.bindings,
                    embedding: st.embedding,
                    plan,
                    digest: digest.clone(),
                    frequency: e.frequency,
                    transformation_size: e.tree.transformation_size,
                });
            }
        }
    }
    out
}

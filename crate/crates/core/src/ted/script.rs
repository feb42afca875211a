//! Edit scripts: generation from a node mapping, and replay.

use serde::{Deserialize, Serialize};

use crate::ast::{Node, NodeKind};

use super::CostModel;

/// One edit. Paths are child-index sequences from a virtual root whose
/// children are the top-level trees of the forest being edited, so `[0]`
/// is the root of the tree itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Edit {
    Relabel { path: Vec<usize>, kind: NodeKind, label: String, cost: f64 },
    /// Remove the node; its children take its place in the parent.
    Delete { path: Vec<usize>, cost: f64 },
    /// New node at `parent.children[index]` adopting the `adopt` siblings
    /// that previously started there.
    Insert { parent: Vec<usize>, index: usize, adopt: usize, kind: NodeKind, label: String, cost: f64 },
}

impl Edit {
    pub fn cost(&self) -> f64 {
        match self {
            Edit::Relabel { cost, .. } | Edit::Delete { cost, .. } | Edit::Insert { cost, .. } => *cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScriptError {
    #[error("edit {0}: path does not resolve")]
    BadPath(usize),
    #[error("edit {0}: insertion range out of bounds")]
    BadRange(usize),
    #[error("script leaves {0} top-level trees instead of one")]
    NotATree(usize),
}

/// Ordered edits turning one tree into another, plus the node mapping they
/// were derived from (pre-order index pairs).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EditScript {
    pub edits: Vec<Edit>,
    pub total_cost: f64,
    pub mapping: Vec<(usize, usize)>,
}

impl EditScript {
    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    /// Replay the script on `a`.
    pub fn apply(&self, a: &Node) -> Result<Node, ScriptError> {
        let mut forest = vec![a.clone()];
        for (k, e) in self.edits.iter().enumerate() {
            match e {
                Edit::Relabel { path, kind, label, .. } => {
                    let n = node_mut(&mut forest, path).ok_or(ScriptError::BadPath(k))?;
                    n.kind = *kind;
                    n.label = label.clone();
                }
                Edit::Delete { path, .. } => {
                    let (&i, parent) = path.split_last().ok_or(ScriptError::BadPath(k))?;
                    let siblings = container_mut(&mut forest, parent).ok_or(ScriptError::BadPath(k))?;
                    if i >= siblings.len() {
                        return Err(ScriptError::BadPath(k));
                    }
                    let gone = siblings.remove(i);
                    siblings.splice(i..i, gone.children);
                }
                Edit::Insert { parent, index, adopt, kind, label, .. } => {
                    let siblings = container_mut(&mut forest, parent).ok_or(ScriptError::BadPath(k))?;
                    if index + adopt > siblings.len() {
                        return Err(ScriptError::BadRange(k));
                    }
                    let adopted: Vec<Node> = siblings.drain(*index..index + adopt).collect();
                    siblings.insert(*index, Node::new(*kind, label.clone(), adopted));
                }
            }
        }
        if forest.len() != 1 {
            return Err(ScriptError::NotATree(forest.len()));
        }
        Ok(forest.pop().unwrap())
    }
}

fn node_mut<'a>(forest: &'a mut [Node], path: &[usize]) -> Option<&'a mut Node> {
    let (&first, rest) = path.split_first()?;
    forest.get_mut(first)?.get_mut(rest)
}

fn container_mut<'a>(forest: &'a mut Vec<Node>, parent: &[usize]) -> Option<&'a mut Vec<Node>> {
    if parent.is_empty() {
        Some(forest)
    } else {
        node_mut(forest, parent).map(|n| &mut n.children)
    }
}

/// Pre-order flattening with parent links and subtree extents.
struct Flat<'a> {
    nodes: Vec<&'a Node>,
    parent: Vec<Option<usize>>,
    end: Vec<usize>,
}

impl<'a> Flat<'a> {
    fn new(root: &'a Node) -> Self {
        let mut f = Flat { nodes: Vec::new(), parent: Vec::new(), end: Vec::new() };
        fn go<'a>(n: &'a Node, parent: Option<usize>, f: &mut Flat<'a>) {
            let me = f.nodes.len();
            f.nodes.push(n);
            f.parent.push(parent);
            f.end.push(0);
            for c in &n.children {
                go(c, Some(me), f);
            }
            f.end[me] = f.nodes.len();
        }
        go(root, None, &mut f);
        f
    }
}

struct Work {
    kind: NodeKind,
    label: String,
    parent: usize,
    children: Vec<usize>,
    b: Option<usize>,
}

struct Arena(Vec<Work>);

impl Arena {
    fn path(&self, mut id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while id != 0 {
            let p = self.0[id].parent;
            out.push(self.0[p].children.iter().position(|&c| c == id).unwrap());
            id = p;
        }
        out.reverse();
        out
    }
}

/// Build the edit sequence realising `mapping` (pre-order pairs) from a to b.
pub(crate) fn build(a: &Node, b: &Node, mapping: &[(usize, usize)], cm: &CostModel) -> EditScript {
    let fa = Flat::new(a);
    let fb = Flat::new(b);
    let mut a_to_b = vec![None; fa.nodes.len()];
    let mut b_to_a = vec![None; fb.nodes.len()];
    for &(i, j) in mapping {
        a_to_b[i] = Some(j);
        b_to_a[j] = Some(i);
    }

    // arena id 0 is the virtual root, a's pre-order node k is id k + 1
    let mut arena = Arena(vec![Work { kind: NodeKind::Empty, label: String::new(), parent: 0, children: vec![1], b: None }]);
    for (k, n) in fa.nodes.iter().enumerate() {
        arena.0.push(Work {
            kind: n.kind,
            label: n.label.clone(),
            parent: fa.parent[k].map_or(0, |p| p + 1),
            children: Vec::new(),
            b: a_to_b[k],
        });
    }
    for (k, p) in fa.parent.iter().enumerate() {
        if let Some(p) = p {
            arena.0[p + 1].children.push(k + 1);
        }
    }

    let mut edits = Vec::new();
    for (i, j) in mapping.iter().copied() {
        let (x, y) = (fa.nodes[i], fb.nodes[j]);
        let cost = cm.relabel_nodes(x, y);
        if x.kind != y.kind || x.label != y.label {
            edits.push(Edit::Relabel { path: arena.path(i + 1), kind: y.kind, label: y.label.clone(), cost });
            let w = &mut arena.0[i + 1];
            w.kind = y.kind;
            w.label = y.label.clone();
        }
    }

    for k in (0..fa.nodes.len()).rev() {
        if a_to_b[k].is_some() {
            continue;
        }
        let id = k + 1;
        edits.push(Edit::Delete { path: arena.path(id), cost: cm.delete_cost(fa.nodes[k].kind) });
        let p = arena.0[id].parent;
        let kids = std::mem::take(&mut arena.0[id].children);
        for &c in &kids {
            arena.0[c].parent = p;
        }
        let pos = arena.0[p].children.iter().position(|&c| c == id).unwrap();
        arena.0[p].children.splice(pos..pos + 1, kids);
    }

    let mut id_of_b: Vec<Option<usize>> = b_to_a.iter().map(|m| m.map(|i| i + 1)).collect();
    for q in 0..fb.nodes.len() {
        if b_to_a[q].is_some() {
            continue;
        }
        let p = fb.parent[q].map_or(0, |pq| id_of_b[pq].expect("parents are placed first"));
        let (lo, hi) = (q, fb.end[q]);
        let kids = &arena.0[p].children;
        let inside = |c: &usize| arena.0[*c].b.is_some_and(|bq| bq > lo && bq < hi);
        let first = kids.iter().position(inside);
        let adopt = kids.iter().filter(|c| inside(c)).count();
        let index = first.unwrap_or_else(|| kids.iter().filter(|c| arena.0[**c].b.is_some_and(|bq| bq < lo)).count());
        let n = fb.nodes[q];
        edits.push(Edit::Insert {
            parent: arena.path(p),
            index,
            adopt,
            kind: n.kind,
            label: n.label.clone(),
            cost: cm.insert_cost(n.kind),
        });
        let new_id = arena.0.len();
        let adopted: Vec<usize> = arena.0[p].children.drain(index..index + adopt).collect();
        for &c in &adopted {
            arena.0[c].parent = new_id;
        }
        arena.0[p].children.insert(index, new_id);
        arena.0.push(Work { kind: n.kind, label: n.label.clone(), parent: p, children: adopted, b: Some(q) });
        id_of_b[q] = Some(new_id);
    }

    let total_cost = edits.iter().map(Edit::cost).sum();
    EditScript { edits, total_cost, mapping: mapping.to_vec() }
}

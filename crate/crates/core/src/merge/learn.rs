use std::collections::BTreeMap;

use crate::alpha::alpha_eq;
use crate::ast::{Ast, Node, NodeKind};
use crate::ted::{distance, ted, CostModel, EditScript};

use super::align::control_flow_align;
use super::flatten::{expand, flatten_region, FlatTree, UNMATCHED};
use super::pool::MergeTreePool;
use super::{placeholder_id, MergeNode, MergeTree, Origin, Scope, PLACEHOLDER_PREFIX};

/// Which program of a pair a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Incorrect,
    Correct,
}

/// Settings for learning from one pair.
#[derive(Debug, Clone)]
pub struct LearnOptions {
    pub cost_model: CostModel,
    pub problem_id: String,
    pub pair_id: String,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            cost_model: CostModel::learning(CostModel::DEFAULT_CF_WEIGHT).unwrap(),
            problem_id: String::new(),
            pair_id: String::new(),
        }
    }
}

/// Label marking where an unmatched node of one side still has to be
/// grafted in by [`augment`].
fn pending_label(side: Side, path: &[usize]) -> String {
    let s = if side == Side::Incorrect { 'i' } else { 'c' };
    let p: Vec<String> = path.iter().map(usize::to_string).collect();
    format!("{UNMATCHED}{s}:{}", p.join("."))
}

/// Pre-order index of a flat tree.
struct Indexed<'a> {
    flat: &'a FlatTree,
    side: Side,
    nodes: Vec<&'a Node>,
    children: Vec<Vec<usize>>,
    end: Vec<usize>,
}

impl<'a> Indexed<'a> {
    fn new(flat: &'a FlatTree, side: Side) -> Self {
        let mut ix = Indexed { flat, side, nodes: Vec::new(), children: Vec::new(), end: Vec::new() };
        fn go<'a>(n: &'a Node, ix: &mut Indexed<'a>) -> usize {
            let me = ix.nodes.len();
            ix.nodes.push(n);
            ix.children.push(Vec::new());
            ix.end.push(0);
            for c in &n.children {
                let k = go(c, ix);
                ix.children[me].push(k);
            }
            ix.end[me] = ix.nodes.len();
            me
        }
        go(&flat.root, &mut ix);
        ix
    }

    fn pending(&self, idx: usize) -> bool {
        self.flat.unmatched.contains_key(&idx)
    }

    /// Copy of the subtree at `idx`, with unmatched placeholders relabelled
    /// so that [`augment`] can find them.
    fn materialize(&self, idx: usize) -> Node {
        let n = self.nodes[idx];
        let label = match self.flat.unmatched.get(&idx) {
            Some(path) => pending_label(self.side, path),
            None => n.label.clone(),
        };
        Node::new(n.kind, label, self.children[idx].iter().map(|&c| self.materialize(c)).collect())
    }
}

struct Merger<'a> {
    a: Indexed<'a>,
    b: Indexed<'a>,
    a_to_b: Vec<Option<usize>>,
}

impl Merger<'_> {
    fn pair(&self, x: usize, y: usize) -> MergeNode {
        let (nx, ny) = (self.a.nodes[x], self.b.nodes[y]);
        if nx.kind == ny.kind && nx.label == ny.label && !self.a.pending(x) && !self.b.pending(y) {
            MergeNode::Plain { kind: nx.kind, label: nx.label.clone(), children: self.children(x, y) }
        } else {
            MergeNode::Mutated { from: self.a.materialize(x), to: self.b.materialize(y) }
        }
    }

    fn children(&self, x: usize, y: usize) -> Vec<MergeNode> {
        let (ci, cc) = (&self.a.children[x], &self.b.children[y]);
        let mut out = Vec::new();
        let (mut pi, mut pc) = (0, 0);
        for (p, &cx) in ci.iter().enumerate() {
            let Some(q) = self.a_to_b[cx].and_then(|cy| cc.iter().position(|&c| c == cy)) else {
                continue;
            };
            if q < pc {
                continue;
            }
            out.extend(self.gap(&ci[pi..p], &cc[pc..q]));
            out.push(self.pair(cx, cc[q]));
            pi = p + 1;
            pc = q + 1;
        }
        out.extend(self.gap(&ci[pi..], &cc[pc..]));
        out
    }

    /// Do mapped descendants tie the two subtrees together?
    fn linked(&self, x: usize, y: usize) -> bool {
        (x..self.a.end[x]).any(|d| self.a_to_b[d].is_some_and(|e| e >= y && e < self.b.end[y]))
    }

    /// Children between two anchors: linked pairs and positional
    /// neighbours become mutations, the rest deletions and insertions.
    fn gap(&self, gi: &[usize], gc: &[usize]) -> Vec<MergeNode> {
        for (k, &x) in gi.iter().enumerate() {
            if let Some(l) = gc.iter().position(|&y| self.linked(x, y)) {
                let mut out = self.gap(&gi[..k], &gc[..l]);
                out.push(self.mutation(x, gc[l]));
                out.extend(self.gap(&gi[k + 1..], &gc[l + 1..]));
                return out;
            }
        }
        let common = gi.len().min(gc.len());
        let mut out: Vec<MergeNode> = (0..common).map(|k| self.mutation(gi[k], gc[k])).collect();
        out.extend(gi[common..].iter().map(|&x| MergeNode::Deleted(self.a.materialize(x))));
        out.extend(gc[common..].iter().map(|&y| MergeNode::Inserted(self.b.materialize(y))));
        out
    }

    fn mutation(&self, x: usize, y: usize) -> MergeNode {
        let (from, to) = (self.a.materialize(x), self.b.materialize(y));
        if from == to {
            MergeNode::from_node(&from)
        } else {
            MergeNode::Mutated { from, to }
        }
    }
}

/// Turn the diff of two flat trees into a merge-tree fragment.
pub fn merge(script: &EditScript, f_i: &FlatTree, f_c: &FlatTree) -> MergeNode {
    let a = Indexed::new(f_i, Side::Incorrect);
    let b = Indexed::new(f_c, Side::Correct);
    let mut a_to_b = vec![None; a.nodes.len()];
    for &(i, j) in &script.mapping {
        a_to_b[i] = Some(j);
    }
    let m = Merger { a, b, a_to_b };
    if m.a_to_b[0] == Some(0) {
        m.pair(0, 0)
    } else {
        m.mutation(0, 0)
    }
}

/// Graft the content of an unmatched node into `mt` at the position its
/// placeholder occupies. A no-op when `mt` has no such placeholder.
pub fn augment(mut mt: MergeNode, path: &[usize], content: &Node, side: Side) -> MergeNode {
    let label = pending_label(side, path);
    graft(&mut mt, &label, content, side);
    mt
}

fn graft(m: &mut MergeNode, label: &str, content: &Node, side: Side) -> bool {
    match (m, side) {
        (MergeNode::Plain { children, .. }, _) => children.iter_mut().any(|c| graft(c, label, content, side)),
        (MergeNode::Deleted(n), Side::Incorrect)
        | (MergeNode::Inserted(n), Side::Correct)
        | (MergeNode::Mutated { from: n, .. }, Side::Incorrect)
        | (MergeNode::Mutated { to: n, .. }, Side::Correct) => graft_node(n, label, content),
        _ => false,
    }
}

fn graft_node(n: &mut Node, label: &str, content: &Node) -> bool {
    if n.kind == NodeKind::Empty && n.label == label {
        *n = content.clone();
        return true;
    }
    n.children.iter_mut().any(|c| graft_node(c, label, content))
}

/// Renumber placeholder correlation ids to 0, 1, ... in visiting order.
fn renumber(m: &mut MergeNode) {
    let mut ids = BTreeMap::new();
    fn node(n: &mut Node, ids: &mut BTreeMap<usize, usize>) {
        if let Some(k) = placeholder_id(n) {
            let next = ids.len();
            let new = *ids.entry(k).or_insert(next);
            n.label = format!("{PLACEHOLDER_PREFIX}{new}");
        }
        n.children.iter_mut().for_each(|c| node(c, ids));
    }
    fn go(m: &mut MergeNode, ids: &mut BTreeMap<usize, usize>) {
        match m {
            MergeNode::Plain { kind, label, children } => {
                if *kind == NodeKind::Empty {
                    let mut n = Node::leaf(NodeKind::Empty, label.clone());
                    node(&mut n, ids);
                    *label = n.label;
                }
                children.iter_mut().for_each(|c| go(c, ids));
            }
            MergeNode::Inserted(n) | MergeNode::Deleted(n) => node(n, ids),
            MergeNode::Mutated { from, to } => {
                node(from, ids);
                node(to, ids);
            }
        }
    }
    go(m, &mut ids);
}

/// Edit cost carried by the markers of a fragment.
pub(crate) fn marker_cost(m: &MergeNode, cm: &CostModel) -> f64 {
    match m {
        MergeNode::Plain { children, .. } => children.iter().map(|c| marker_cost(c, cm)).sum(),
        MergeNode::Inserted(n) | MergeNode::Deleted(n) => cm.subtree_cost(n),
        MergeNode::Mutated { from, to } => distance(from, to, cm),
    }
}

fn worth_keeping(m: &MergeNode, size: f64) -> bool {
    if size <= 0.0 || !m.has_edits() {
        return false;
    }
    match (m.incorrect_readout(), m.correct_readout()) {
        (Some(i), Some(c)) => !alpha_eq(&i, &c),
        _ => true,
    }
}

/// Learn the patterns of one pair, in region order; each region's pattern is
/// followed by the standalone patterns of the unmatched clusters inside it.
pub fn learn_pair(p_i: &Ast, p_c: &Ast, opts: &LearnOptions) -> Vec<MergeTree> {
    let cm = &opts.cost_model;
    let al = control_flow_align(p_i, p_c);
    let corr_i = |p: &[usize]| al.pair_of_incorrect(p);
    let corr_c = |p: &[usize]| al.pair_of_correct(p);
    let origin = |scope| Origin { problem_id: opts.problem_id.clone(), pair_id: opts.pair_id.clone(), scope };

    let mut regions = vec![(Vec::new(), Vec::new())];
    regions.extend(al.aligned.iter().cloned());
    let mut out = Vec::new();
    for (ri, rc) in &regions {
        let fi = flatten_region(&p_i.root, ri, &corr_i);
        let fc = flatten_region(&p_c.root, rc, &corr_c);
        if fi.root == fc.root && fi.unmatched.is_empty() && fc.unmatched.is_empty() {
            continue;
        }
        let diff = ted(&fi.root, &fc.root, cm);
        let mut mt = merge(&diff.script, &fi, &fc);
        for path in fi.unmatched.values() {
            mt = augment(mt, path, &expand(&p_i.root, path, &corr_i), Side::Incorrect);
        }
        for path in fc.unmatched.values() {
            mt = augment(mt, path, &expand(&p_c.root, path, &corr_c), Side::Correct);
        }
        let clusters: Vec<MergeNode> = mt
            .markers()
            .into_iter()
            .filter(|m| match m {
                MergeNode::Deleted(n) | MergeNode::Mutated { from: n, .. } => n.is_control_flow(),
                MergeNode::Inserted(_) | MergeNode::Plain { .. } => false,
            })
            .cloned()
            .collect();
        renumber(&mut mt);
        let size = marker_cost(&mt, cm);
        if worth_keeping(&mt, size) {
            out.push(MergeTree { root: mt, origin: origin(Scope::Region), transformation_size: size });
        }
        for mut c in clusters {
            renumber(&mut c);
            let size = marker_cost(&c, cm);
            if worth_keeping(&c, size) {
                out.push(MergeTree { root: c, origin: origin(Scope::Cluster), transformation_size: size });
            }
        }
    }
    out
}

/// Learn a pool from a single pair with default options.
pub fn learn_transformations(p_i: &Ast, p_c: &Ast) -> MergeTreePool {
    let opts = LearnOptions::default();
    let mut pool = MergeTreePool::new(&opts.problem_id);
    for t in learn_pair(p_i, p_c, &opts) {
        pool.add(t, 1);
    }
    pool
}

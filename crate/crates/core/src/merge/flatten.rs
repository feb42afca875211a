use std::collections::BTreeMap;

use crate::ast::{Node, NodeKind};

use super::align::align_nodes;
use super::placeholder;

/// Label of a placeholder for a nested control-flow node with no partner.
pub(crate) const UNMATCHED: &str = "cf?";

/// A subtree whose nested control flow has been replaced by placeholders.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTree {
    pub root: Node,
    /// Number of placeholders inserted.
    pub placeholders: usize,
    /// For unmatched placeholders: pre-order index in `root` → path, from
    /// the original tree's root, of the control-flow node replaced.
    pub(crate) unmatched: BTreeMap<usize, Vec<usize>>,
}

/// Flatten two corresponding subtrees. Nested control-flow nodes that align
/// with each other get placeholders with the same correlation id.
pub fn flatten(t_i: &Node, t_c: &Node) -> (FlatTree, FlatTree) {
    let al = align_nodes(t_i, t_c);
    let fi = flatten_region(t_i, &[], &|p| al.pair_of_incorrect(p));
    let fc = flatten_region(t_c, &[], &|p| al.pair_of_correct(p));
    (fi, fc)
}

/// Flatten the subtree of `tree` at `region`. `corr` gives the correlation
/// id of an aligned node by its path from `tree`'s root.
pub(crate) fn flatten_region(tree: &Node, region: &[usize], corr: &dyn Fn(&[usize]) -> Option<usize>) -> FlatTree {
    let start = tree.get(region).expect("region path resolves");
    let mut flat = FlatTree { root: Node::empty(), placeholders: 0, unmatched: BTreeMap::new() };
    let mut counter = 1;
    let mut path = region.to_vec();
    let children = start.children.iter().enumerate().map(|(i, c)| {
        path.push(i);
        let out = flat_child(c, &mut path, corr, &mut counter, &mut flat);
        path.pop();
        out
    });
    let children: Vec<Node> = children.collect();
    flat.root = Node::new(start.kind, start.label.clone(), children);
    flat
}

fn flat_child(
    n: &Node,
    path: &mut Vec<usize>,
    corr: &dyn Fn(&[usize]) -> Option<usize>,
    counter: &mut usize,
    flat: &mut FlatTree,
) -> Node {
    let me = *counter;
    *counter += 1;
    if n.is_control_flow() {
        flat.placeholders += 1;
        return match corr(path) {
            Some(k) => placeholder(k),
            None => {
                flat.unmatched.insert(me, path.clone());
                Node::leaf(NodeKind::Empty, UNMATCHED)
            }
        };
    }
    let mut kids = Vec::with_capacity(n.children.len());
    for (i, c) in n.children.iter().enumerate() {
        path.push(i);
        kids.push(flat_child(c, path, corr, counter, flat));
        path.pop();
    }
    Node::new(n.kind, n.label.clone(), kids)
}

/// The subtree at `path`, with aligned strict descendants replaced by
/// placeholders and unmatched ones kept in full.
pub(crate) fn expand(tree: &Node, path: &[usize], corr: &dyn Fn(&[usize]) -> Option<usize>) -> Node {
    fn go(n: &Node, path: &mut Vec<usize>, corr: &dyn Fn(&[usize]) -> Option<usize>) -> Node {
        let mut kids = Vec::with_capacity(n.children.len());
        for (i, c) in n.children.iter().enumerate() {
            path.push(i);
            let k = if c.is_control_flow() { corr(path) } else { None };
            kids.push(match k {
                Some(k) => placeholder(k),
                None => go(c, path, corr),
            });
            path.pop();
        }
        Node::new(n.kind, n.label.clone(), kids)
    }
    go(tree.get(path).expect("path resolves"), &mut path.to_vec(), corr)
}

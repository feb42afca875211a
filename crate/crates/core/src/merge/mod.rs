//! Merge trees: transformation patterns learned from (incorrect, correct)
//! program pairs.
//!
//! A pair is processed in three steps. [`control_flow_align`] pairs up
//! control-flow nodes top-down. Each aligned region is [`flatten`]ed so that
//! nested control flow becomes a single placeholder, the flat trees are
//! diffed, and the diff is turned into a [`MergeNode`] by [`merge`].
//! Finally [`augment`] grafts unmatched control flow back in as insertion,
//! deletion or mutation markers. [`learn_transformations`] runs the whole
//! pipeline and returns a [`MergeTreePool`].

mod align;
mod flatten;
mod learn;
mod pool;

use serde::{Deserialize, Serialize};

use crate::ast::{Node, NodeKind};

pub use align::{control_flow_align, AlignmentResult};
pub use flatten::{flatten, FlatTree};
pub use learn::{augment, learn_pair, learn_transformations, merge, LearnOptions, Side};
pub use pool::{pool_merge, MergeTreePool, PoolEntry, PoolError, POOL_VERSION};

/// Prefix of placeholder labels standing for an aligned nested control-flow
/// subtree; the suffix is a correlation id shared by both sides.
pub const PLACEHOLDER_PREFIX: &str = "cf#";

pub fn placeholder(id: usize) -> Node {
    Node::leaf(NodeKind::Empty, format!("{PLACEHOLDER_PREFIX}{id}"))
}

/// Correlation id of a placeholder node.
pub fn placeholder_id(n: &Node) -> Option<usize> {
    if n.kind != NodeKind::Empty {
        return None;
    }
    n.label.strip_prefix(PLACEHOLDER_PREFIX)?.parse().ok()
}

/// One node of a merge tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MergeNode {
    /// Present on both sides.
    Plain { kind: NodeKind, label: String, children: Vec<MergeNode> },
    /// Present only in the correct program.
    Inserted(Node),
    /// Present only in the incorrect program.
    Deleted(Node),
    /// `from` in the incorrect program became `to` in the correct one.
    Mutated { from: Node, to: Node },
}

impl MergeNode {
    /// All-Plain copy of a tree.
    pub fn from_node(n: &Node) -> MergeNode {
        MergeNode::Plain {
            kind: n.kind,
            label: n.label.clone(),
            children: n.children.iter().map(MergeNode::from_node).collect(),
        }
    }

    pub fn is_marker(&self) -> bool {
        !matches!(self, MergeNode::Plain { .. })
    }

    /// True if any marker occurs in the tree.
    pub fn has_edits(&self) -> bool {
        match self {
            MergeNode::Plain { children, .. } => children.iter().any(MergeNode::has_edits),
            _ => true,
        }
    }

    /// The tree as it appears in the incorrect program; `None` when the
    /// root itself is an insertion.
    pub fn incorrect_readout(&self) -> Option<Node> {
        self.readout(Side::Incorrect).pop()
    }

    /// The tree as it appears in the correct program; `None` when the root
    /// itself is a deletion.
    pub fn correct_readout(&self) -> Option<Node> {
        self.readout(Side::Correct).pop()
    }

    pub fn readout(&self, side: Side) -> Vec<Node> {
        match (self, side) {
            (MergeNode::Plain { kind, label, children }, _) => {
                let kids = children.iter().flat_map(|c| c.readout(side)).collect();
                vec![Node::new(*kind, label.clone(), kids)]
            }
            (MergeNode::Inserted(n), Side::Correct) | (MergeNode::Deleted(n), Side::Incorrect) => vec![n.clone()],
            (MergeNode::Inserted(_), Side::Incorrect) | (MergeNode::Deleted(_), Side::Correct) => Vec::new(),
            (MergeNode::Mutated { from, .. }, Side::Incorrect) => vec![from.clone()],
            (MergeNode::Mutated { to, .. }, Side::Correct) => vec![to.clone()],
        }
    }

    /// Kind of the incorrect-side root, if there is one.
    pub fn incorrect_kind(&self) -> Option<NodeKind> {
        match self {
            MergeNode::Plain { kind, .. } => Some(*kind),
            MergeNode::Deleted(n) | MergeNode::Mutated { from: n, .. } => Some(n.kind),
            MergeNode::Inserted(_) => None,
        }
    }

    /// Number of merge-tree nodes, counting every node inside markers.
    pub fn size(&self) -> usize {
        match self {
            MergeNode::Plain { children, .. } => 1 + children.iter().map(MergeNode::size).sum::<usize>(),
            MergeNode::Inserted(n) | MergeNode::Deleted(n) => n.size(),
            MergeNode::Mutated { from, to } => from.size() + to.size(),
        }
    }

    /// Visit every marker.
    pub fn markers(&self) -> Vec<&MergeNode> {
        let mut out = Vec::new();
        fn go<'a>(m: &'a MergeNode, out: &mut Vec<&'a MergeNode>) {
            match m {
                MergeNode::Plain { children, .. } => children.iter().for_each(|c| go(c, out)),
                _ => out.push(m),
            }
        }
        go(self, &mut out);
        out
    }
}

/// Whether a pattern covers a whole aligned region or one unmatched
/// control-flow cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Region,
    Cluster,
}

/// Where a pattern was learned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub problem_id: String,
    pub pair_id: String,
    pub scope: Scope,
}

/// A learned transformation pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeTree {
    pub root: MergeNode,
    pub origin: Origin,
    /// Total edit cost under the learning cost model.
    pub transformation_size: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readouts() {
        let m = MergeNode::Plain {
            kind: NodeKind::Block,
            label: "{}".into(),
            children: vec![
                MergeNode::Deleted(Node::ident("a")),
                MergeNode::Inserted(Node::ident("b")),
                MergeNode::Mutated { from: Node::literal("0"), to: Node::literal("1") },
                MergeNode::from_node(&Node::ident("c")),
            ],
        };
        let i = m.incorrect_readout().unwrap();
        let c = m.correct_readout().unwrap();
        assert_eq!(i.sexp(), "(Block:{} Identifier:a Literal:0 Identifier:c)");
        assert_eq!(c.sexp(), "(Block:{} Identifier:b Literal:1 Identifier:c)");
        assert_eq!(m.markers().len(), 3);
        assert!(MergeNode::Inserted(Node::ident("x")).incorrect_readout().is_none());
    }

    #[test]
    fn placeholders() {
        assert_eq!(placeholder_id(&placeholder(7)), Some(7));
        assert_eq!(placeholder_id(&Node::empty()), None);
    }
}

//! Ordered labeled syntax trees for the supported C subset.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Node kinds. `If`, `While`, `For` and `Call` are the control-flow kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    If,
    While,
    For,
    Call,
    FuncDef,
    Block,
    Assign,
    Return,
    Decl,
    BinOp,
    UnOp,
    Identifier,
    Literal,
    Break,
    Continue,
    Empty,
}

impl NodeKind {
    pub const ALL: [NodeKind; 16] = [
        NodeKind::If,
        NodeKind::While,
        NodeKind::For,
        NodeKind::Call,
        NodeKind::FuncDef,
        NodeKind::Block,
        NodeKind::Assign,
        NodeKind::Return,
        NodeKind::Decl,
        NodeKind::BinOp,
        NodeKind::UnOp,
        NodeKind::Identifier,
        NodeKind::Literal,
        NodeKind::Break,
        NodeKind::Continue,
        NodeKind::Empty,
    ];

    pub fn is_control_flow(self) -> bool {
        matches!(self, NodeKind::If | NodeKind::While | NodeKind::For | NodeKind::Call)
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::If => "If",
            NodeKind::While => "While",
            NodeKind::For => "For",
            NodeKind::Call => "Call",
            NodeKind::FuncDef => "FuncDef",
            NodeKind::Block => "Block",
            NodeKind::Assign => "Assign",
            NodeKind::Return => "Return",
            NodeKind::Decl => "Decl",
            NodeKind::BinOp => "BinOp",
            NodeKind::UnOp => "UnOp",
            NodeKind::Identifier => "Identifier",
            NodeKind::Literal => "Literal",
            NodeKind::Break => "Break",
            NodeKind::Continue => "Continue",
            NodeKind::Empty => "Empty",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Source range, 1-based. Carried for diagnostics only; never compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn point(line: u32, col: u32) -> Self {
        Span { line, col, end_line: line, end_col: col }
    }

    pub fn to(self, end: Span) -> Span {
        Span { line: self.line, col: self.col, end_line: end.end_line, end_col: end.end_col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Label of the `Block` that holds several top-level items.
pub const UNIT_LABEL: &str = "unit";
/// Label of an ordinary `{ ... }` block.
pub const BLOCK_LABEL: &str = "{}";

/// A syntax tree node. Equality and hashing are structural: kind, label and
/// children, ignoring spans.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub label: String,
    pub children: Vec<Node>,
    #[serde(skip)]
    pub span: Span,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.label == other.label && self.children == other.children
    }
}

impl Eq for Node {}

impl Hash for Node {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        self.label.hash(state);
        self.children.hash(state);
    }
}

impl Node {
    pub fn new(kind: NodeKind, label: impl Into<String>, children: Vec<Node>) -> Self {
        Node { kind, label: label.into(), children, span: Span::default() }
    }

    pub fn leaf(kind: NodeKind, label: impl Into<String>) -> Self {
        Node::new(kind, label, Vec::new())
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Node::leaf(NodeKind::Identifier, name)
    }

    pub fn literal(text: impl Into<String>) -> Self {
        Node::leaf(NodeKind::Literal, text)
    }

    pub fn empty() -> Self {
        Node::leaf(NodeKind::Empty, "")
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn is_control_flow(&self) -> bool {
        self.kind.is_control_flow()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Node::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Node::depth).max().unwrap_or(0)
    }

    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }

    /// Visit every node with its path (child indices from `self`).
    pub fn walk_with_path<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a Node)) {
        fn go<'a>(n: &'a Node, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a Node)) {
            f(path, n);
            for (i, c) in n.children.iter().enumerate() {
                path.push(i);
                go(c, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn get(&self, path: &[usize]) -> Option<&Node> {
        let mut cur = self;
        for &i in path {
            cur = cur.children.get(i)?;
        }
        Some(cur)
    }

    pub fn get_mut(&mut self, path: &[usize]) -> Option<&mut Node> {
        let mut cur = self;
        for &i in path {
            cur = cur.children.get_mut(i)?;
        }
        Some(cur)
    }

    /// Drop spans recursively, so that `Debug` output is stable.
    pub fn strip_spans(&mut self) {
        self.span = Span::default();
        for c in &mut self.children {
            c.strip_spans();
        }
    }

    /// Stable content hash over kind, label and children.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        fn feed(n: &Node, h: &mut Sha256) {
            h.update(n.kind.name().as_bytes());
            h.update([0u8]);
            h.update(n.label.as_bytes());
            h.update([0u8]);
            h.update((n.children.len() as u32).to_le_bytes());
            for c in &n.children {
                feed(c, h);
            }
        }
        feed(self, &mut h);
        hex::encode(h.finalize())
    }

    /// Compact s-expression rendering, handy in tests and diagnostics.
    pub fn sexp(&self) -> String {
        let mut out = String::new();
        self.write_sexp(&mut out);
        out
    }

    fn write_sexp(&self, out: &mut String) {
        let head = if self.label.is_empty() {
            self.kind.name().to_string()
        } else {
            format!("{}:{}", self.kind.name(), self.label)
        };
        if self.children.is_empty() {
            out.push_str(&head);
        } else {
            out.push('(');
            out.push_str(&head);
            for c in &self.children {
                out.push(' ');
                c.write_sexp(out);
            }
            out.push(')');
        }
    }
}

pub struct Preorder<'a> {
    stack: Vec<&'a Node>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a Node;

    fn next(&mut self) -> Option<&'a Node> {
        let n = self.stack.pop()?;
        self.stack.extend(n.children.iter().rev());
        Some(n)
    }
}

/// A parsed program: the tree plus the `#include` lines that preceded it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ast {
    pub root: Node,
    pub preamble: Vec<String>,
    pub source_digest: Option<String>,
}

impl Ast {
    pub fn new(root: Node) -> Self {
        Ast { root, preamble: Vec::new(), source_digest: None }
    }

    pub fn with_preamble(mut self, preamble: Vec<String>) -> Self {
        self.preamble = preamble;
        self
    }

    /// Structural equality: preamble and tree, ignoring spans and digests.
    pub fn structurally_eq(&self, other: &Ast) -> bool {
        self.preamble == other.preamble && self.root == other.root
    }

    pub fn node_count(&self) -> usize {
        node_count(self)
    }

    pub fn control_flow_nodes(&self) -> Vec<&Node> {
        control_flow_nodes(self)
    }

    /// Replace the program tree, keeping the preamble.
    pub fn with_root(&self, root: Node) -> Ast {
        Ast { root, preamble: self.preamble.clone(), source_digest: None }
    }
}

/// Number of nodes in the tree, root included.
pub fn node_count(ast: &Ast) -> usize {
    ast.root.size()
}

/// All control-flow nodes in pre-order.
pub fn control_flow_nodes(ast: &Ast) -> Vec<&Node> {
    ast.root.preorder().filter(|n| n.is_control_flow()).collect()
}

/// Paths of all control-flow nodes in pre-order.
pub fn control_flow_paths(root: &Node) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    root.walk_with_path(&mut |p, n| {
        if n.is_control_flow() {
            out.push(p.to_vec());
        }
    });
    out
}

/// True if `ancestor` is a strict prefix of `path`.
pub fn is_strict_prefix(ancestor: &[usize], path: &[usize]) -> bool {
    ancestor.len() < path.len() && path[..ancestor.len()] == *ancestor
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> Node {
        Node::new(
            NodeKind::FuncDef,
            "int main",
            vec![Node::new(
                NodeKind::Block,
                BLOCK_LABEL,
                vec![Node::new(NodeKind::Return, "return", vec![Node::literal("0")])],
            )],
        )
    }

    #[test]
    fn counts_and_order() {
        let ast = Ast::new(minimal());
        assert_eq!(node_count(&ast), 4);
        let kinds: Vec<_> = ast.root.preorder().map(|n| n.kind).collect();
        assert_eq!(
            kinds,
            vec![NodeKind::FuncDef, NodeKind::Block, NodeKind::Return, NodeKind::Literal]
        );
        assert!(control_flow_nodes(&ast).is_empty());
    }

    #[test]
    fn adding_a_child_increments_count() {
        let mut root = minimal();
        let before = root.size();
        root.children[0].children.push(Node::leaf(NodeKind::Break, "break"));
        assert_eq!(root.size(), before + 1);
    }

    #[test]
    fn equality_ignores_spans() {
        let a = Node::ident("x").with_span(Span::point(1, 1));
        let b = Node::ident("x").with_span(Span::point(9, 9));
        assert_eq!(a, b);
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), Node::ident("y").digest());
    }

    #[test]
    fn paths_resolve() {
        let root = minimal();
        assert_eq!(root.get(&[0, 0, 0]).unwrap().label, "0");
        assert!(root.get(&[1]).is_none());
        assert!(is_strict_prefix(&[0], &[0, 1]));
        assert!(!is_strict_prefix(&[0, 1], &[0, 1]));
    }
}

pub mod alpha;
pub mod ast;
pub mod corpus;
pub mod frontend;
pub mod judge;
pub mod merge;
pub mod repair;
pub mod ted;

pub use ast::{control_flow_nodes, node_count, Ast, Node, NodeKind, Span};
pub use frontend::{parse, print, SyntaxError};

//! Tree edit distance between ordered labeled trees.
//!
//! [`ted`] runs the Zhang-Shasha algorithm under a [`CostModel`] and returns
//! the distance together with an [`EditScript`] that realises it.

mod cost;
mod script;
mod zss;

use crate::ast::Node;

pub use cost::{learning_cost_model, unit_cost_model, CostModel, InvalidWeight};
pub use script::{Edit, EditScript, ScriptError};

/// Distance and a script achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeDiff {
    pub distance: f64,
    pub script: EditScript,
}

/// Minimum-cost edit script from `a` to `b`.
pub fn ted(a: &Node, b: &Node, cm: &CostModel) -> TreeDiff {
    let mut z = zss::Zss::run(a, b, *cm);
    let distance = z.distance();
    let mapping = z.mapping();
    let script = script::build(a, b, &mapping, cm);
    debug_assert!((script.total_cost - distance).abs() < 1e-6, "{} vs {}", script.total_cost, distance);
    TreeDiff { distance, script }
}

/// Distance only; skips mapping recovery.
pub fn distance(a: &Node, b: &Node, cm: &CostModel) -> f64 {
    zss::Zss::run(a, b, *cm).distance()
}

/// Optimal node mapping as pre-order index pairs, sorted by the `a` side.
pub fn mapping(a: &Node, b: &Node, cm: &CostModel) -> Vec<(usize, usize)> {
    zss::Zss::run(a, b, *cm).mapping()
}

/// Unit-cost distance, the measure used for reporting.
pub fn unit_distance(a: &Node, b: &Node) -> f64 {
    distance(a, b, &CostModel::unit())
}

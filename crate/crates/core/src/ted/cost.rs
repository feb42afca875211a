use serde::{Deserialize, Serialize};

use crate::ast::{Node, NodeKind};

/// Edit costs over syntax tree nodes.
///
/// Insert and delete cost 1 and a relabel between differing nodes costs 1,
/// except that any edit touching a control-flow node costs `cf_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    cf_weight: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("control-flow weight must be a finite number >= 1, got {0}")]
pub struct InvalidWeight(pub f64);

impl CostModel {
    pub const DEFAULT_CF_WEIGHT: f64 = 10.0;

    pub fn unit() -> Self {
        CostModel { cf_weight: 1.0 }
    }

    pub fn learning(cf_weight: f64) -> Result<Self, InvalidWeight> {
        if !cf_weight.is_finite() || cf_weight < 1.0 {
            return Err(InvalidWeight(cf_weight));
        }
        Ok(CostModel { cf_weight })
    }

    pub fn cf_weight(&self) -> f64 {
        self.cf_weight
    }

    fn base(&self, kind: NodeKind) -> f64 {
        if kind.is_control_flow() {
            self.cf_weight
        } else {
            1.0
        }
    }

    pub fn insert_cost(&self, kind: NodeKind) -> f64 {
        self.base(kind)
    }

    pub fn delete_cost(&self, kind: NodeKind) -> f64 {
        self.base(kind)
    }

    pub fn relabel_cost(&self, a: (NodeKind, &str), b: (NodeKind, &str)) -> f64 {
        if a == b {
            0.0
        } else if a.0.is_control_flow() || b.0.is_control_flow() {
            self.cf_weight
        } else {
            1.0
        }
    }

    pub fn relabel_nodes(&self, a: &Node, b: &Node) -> f64 {
        self.relabel_cost((a.kind, &a.label), (b.kind, &b.label))
    }

    /// Cost of deleting (or inserting) a whole subtree.
    pub fn subtree_cost(&self, n: &Node) -> f64 {
        n.preorder().map(|m| self.base(m.kind)).sum()
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::unit()
    }
}

pub fn unit_cost_model() -> CostModel {
    CostModel::unit()
}

pub fn learning_cost_model(cf_weight: f64) -> Result<CostModel, InvalidWeight> {
    CostModel::learning(cf_weight)
}

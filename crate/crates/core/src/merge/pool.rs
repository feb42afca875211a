use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alpha::canonical;
use crate::ast::{Node, NodeKind};

use super::{MergeNode, MergeTree, Origin};

pub const POOL_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PoolError {
    #[error("cannot merge pools of different problems: {0:?} and {1:?}")]
    MixedProblems(String, String),
    #[error("unsupported pool version {0}")]
    Version(u32),
    #[error("malformed fragment: {0}")]
    Malformed(String),
    #[error("pool json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("pool file: {0}")]
    Io(#[from] std::io::Error),
}

/// A pooled pattern and how many times it was learned.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolEntry {
    pub tree: MergeTree,
    pub frequency: u64,
}

/// Deduplicated patterns of one problem. Patterns that differ only in
/// identifier names count as the same pattern; the first spelling is kept.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MergeTreePool {
    pub version: u32,
    pub problem_id: String,
    entries: Vec<PoolEntry>,
    index: HashMap<String, usize>,
}

/// Key under which alpha-equivalent fragments coincide.
fn dedup_key(m: &MergeNode) -> String {
    fn encode(m: &MergeNode) -> Node {
        match m {
            MergeNode::Plain { kind, label, children } => {
                Node::new(*kind, label.clone(), children.iter().map(encode).collect())
            }
            MergeNode::Inserted(n) => Node::new(NodeKind::Empty, "+ins", vec![n.clone()]),
            MergeNode::Deleted(n) => Node::new(NodeKind::Empty, "+del", vec![n.clone()]),
            MergeNode::Mutated { from, to } => Node::new(NodeKind::Empty, "+mut", vec![from.clone(), to.clone()]),
        }
    }
    canonical(&encode(m)).sexp()
}

impl MergeTreePool {
    pub fn new(problem_id: &str) -> Self {
        MergeTreePool { version: POOL_VERSION, problem_id: problem_id.to_string(), ..Default::default() }
    }

    /// Add a pattern `frequency` times.
    pub fn add(&mut self, tree: MergeTree, frequency: u64) {
        let key = dedup_key(&tree.root);
        match self.index.get(&key) {
            Some(&k) => self.entries[k].frequency += frequency,
            None => {
                self.index.insert(key, self.entries.len());
                self.entries.push(PoolEntry { tree, frequency });
            }
        }
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = PoolDoc {
            version: self.version,
            problem_id: self.problem_id.clone(),
            trees: self
                .entries
                .iter()
                .map(|e| TreeDoc {
                    fragment: Fragment::from_merge(&e.tree.root),
                    frequency: e.frequency,
                    transformation_size: e.tree.transformation_size,
                    origin: e.tree.origin.clone(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("pool serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PoolError> {
        let doc: PoolDoc = serde_json::from_str(text)?;
        if doc.version != POOL_VERSION {
            return Err(PoolError::Version(doc.version));
        }
        let mut pool = MergeTreePool::new(&doc.problem_id);
        for t in doc.trees {
            let tree = MergeTree {
                root: t.fragment.to_merge()?,
                origin: t.origin,
                transformation_size: t.transformation_size,
            };
            pool.add(tree, t.frequency);
        }
        Ok(pool)
    }

    pub fn save(&self, path: &Path) -> Result<(), PoolError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PoolError> {
        MergeTreePool::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Combine pools of one problem, summing frequencies of equal patterns.
pub fn pool_merge(pools: &[MergeTreePool]) -> Result<MergeTreePool, PoolError> {
    let problem = pools.first().map(|p| p.problem_id.clone()).unwrap_or_default();
    let mut out = MergeTreePool::new(&problem);
    for p in pools {
        if p.problem_id != problem {
            return Err(PoolError::MixedProblems(problem, p.problem_id.clone()));
        }
        for e in &p.entries {
            out.add(e.tree.clone(), e.frequency);
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct PoolDoc {
    version: u32,
    problem_id: String,
    trees: Vec<TreeDoc>,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    fragment: Fragment,
    frequency: u64,
    transformation_size: f64,
    origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Marker {
    Plain,
    Inserted,
    Deleted,
    Mutated,
}

#[derive(Debug, Serialize, Deserialize)]
struct Fragment {
    marker: Marker,
    kind: Option<NodeKind>,
    label: Option<String>,
    children: Vec<Fragment>,
}

impl Fragment {
    fn node(marker: Marker, n: &Node) -> Fragment {
        Fragment {
            marker,
            kind: Some(n.kind),
            label: Some(n.label.clone()),
            children: n.children.iter().map(|c| Fragment::node(Marker::Plain, c)).collect(),
        }
    }

    fn from_merge(m: &MergeNode) -> Fragment {
        match m {
            MergeNode::Plain { kind, label, children } => Fragment {
                marker: Marker::Plain,
                kind: Some(*kind),
                label: Some(label.clone()),
                children: children.iter().map(Fragment::from_merge).collect(),
            },
            MergeNode::Inserted(n) => Fragment::node(Marker::Inserted, n),
            MergeNode::Deleted(n) => Fragment::node(Marker::Deleted, n),
            MergeNode::Mutated { from, to } => Fragment {
                marker: Marker::Mutated,
                kind: None,
                label: None,
                children: vec![Fragment::node(Marker::Plain, from), Fragment::node(Marker::Plain, to)],
            },
        }
    }

    fn to_node(&self) -> Result<Node, PoolError> {
        if self.marker != Marker::Plain {
            return Err(PoolError::Malformed("marker inside a marker payload".into()));
        }
        let (kind, label) = self.head()?;
        let children = self.children.iter().map(Fragment::to_node).collect::<Result<_, _>>()?;
        Ok(Node::new(kind, label, children))
    }

    fn head(&self) -> Result<(NodeKind, String), PoolError> {
        match (self.kind, &self.label) {
            (Some(k), Some(l)) => Ok((k, l.clone())),
            _ => Err(PoolError::Malformed("node without kind or label".into())),
        }
    }

    fn payload(&self) -> Result<Node, PoolError> {
        let (kind, label) = self.head()?;
        let children = self.children.iter().map(Fragment::to_node).collect::<Result<_, _>>()?;
        Ok(Node::new(kind, label, children))
    }

    fn to_merge(&self) -> Result<MergeNode, PoolError> {
        Ok(match self.marker {
            Marker::Plain => {
                let (kind, label) = self.head()?;
                let children = self.children.iter().map(Fragment::to_merge).collect::<Result<_, _>>()?;
                MergeNode::Plain { kind, label, children }
            }
            Marker::Inserted => MergeNode::Inserted(self.payload()?),
            Marker::Deleted => MergeNode::Deleted(self.payload()?),
            Marker::Mutated => match self.children.as_slice() {
                [from, to] => MergeNode::Mutated { from: from.to_node()?, to: to.to_node()? },
                _ => return Err(PoolError::Malformed("mutation needs exactly two children".into())),
            },
        })
    }
}

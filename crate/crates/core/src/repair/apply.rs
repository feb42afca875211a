use std::collections::BTreeSet;

use crate::ast::{Ast, Node, NodeKind};
use crate::merge::placeholder_id;

use super::matching::{Emit, MatchSite};
use super::scope::{is_library_name, HOLE_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error("target changed since matching at {0:?}")]
    Stale(Vec<usize>),
    #[error("no subtree at {0:?}")]
    BadPath(Vec<usize>),
    #[error("placeholder cf#{0} has no binding")]
    Unbound(usize),
    #[error("sites overlap at {0:?}")]
    Overlap(Vec<usize>),
}

struct Instantiator<'a> {
    target: &'a Node,
    site: &'a MatchSite,
    taken: BTreeSet<String>,
    fresh: Vec<(String, String)>,
}

impl Instantiator<'_> {
    fn subtree(&self, path: &[usize]) -> Result<Node, ApplyError> {
        self.target.get(path).cloned().ok_or_else(|| ApplyError::BadPath(path.to_vec()))
    }

    fn emit(&mut self, e: &Emit) -> Result<Node, ApplyError> {
        match e {
            Emit::Target(p) => self.subtree(p),
            Emit::Node { kind, label, children } => {
                let kids = children.iter().map(|c| self.emit(c)).collect::<Result<_, _>>()?;
                Ok(Node::new(*kind, label.clone(), kids))
            }
            Emit::Pattern(n) => {
                self.declare_fresh(n);
                self.content(n, false)
            }
        }
    }

    /// Names declared inside inserted content that the rename does not
    /// cover get a name that does not clash with the target.
    fn declare_fresh(&mut self, n: &Node) {
        if n.kind == NodeKind::Decl {
            for d in &n.children {
                let mut d = d;
                while d.kind != NodeKind::Identifier {
                    match d.children.first() {
                        Some(c) => d = c,
                        None => break,
                    }
                }
                if d.kind == NodeKind::Identifier && self.site.rename.get(&d.label).is_none() && self.lookup(&d.label).is_none() {
                    let mut name = d.label.clone();
                    let mut k = 1;
                    while self.taken.contains(&name) {
                        name = format!("{}_{k}", d.label);
                        k += 1;
                    }
                    self.taken.insert(name.clone());
                    self.fresh.push((d.label.clone(), name));
                }
            }
        }
        for c in &n.children {
            self.declare_fresh(c);
        }
    }

    fn lookup(&self, name: &str) -> Option<&str> {
        self.fresh.iter().find(|(a, _)| a == name).map(|(_, b)| b.as_str())
    }

    fn content(&self, n: &Node, callee: bool) -> Result<Node, ApplyError> {
        if let Some(k) = placeholder_id(n) {
            let p = self.site.bindings.get(&k).ok_or(ApplyError::Unbound(k))?;
            return self.subtree(p);
        }
        let mut out = Node::new(n.kind, n.label.clone(), Vec::new()).with_span(n.span);
        if n.kind == NodeKind::Identifier {
            out.label = match (self.site.rename.get(&n.label), self.lookup(&n.label)) {
                (Some(img), _) => img.to_string(),
                (None, Some(f)) => f.to_string(),
                _ if callee || is_library_name(&n.label) => n.label.clone(),
                _ => format!("{HOLE_PREFIX}{}", n.label),
            };
        }
        let is_call = n.kind == NodeKind::Call;
        out.children = n
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| self.content(c, is_call && i == 0 && c.kind == NodeKind::Identifier))
            .collect::<Result<_, _>>()?;
        Ok(out)
    }
}

fn identifiers(n: &Node, out: &mut BTreeSet<String>) {
    if n.kind == NodeKind::Identifier {
        out.insert(n.label.clone());
    }
    for c in &n.children {
        identifiers(c, out);
    }
}

fn apply_in_place(root: &mut Node, site: &MatchSite, taken: &mut BTreeSet<String>) -> Result<(), ApplyError> {
    let current = root.get(&site.path).ok_or_else(|| ApplyError::BadPath(site.path.clone()))?;
    if current.digest() != site.digest {
        return Err(ApplyError::Stale(site.path.clone()));
    }
    let mut inst = Instantiator { target: root, site, taken: std::mem::take(taken), fresh: Vec::new() };
    let result: Result<Vec<Node>, ApplyError> = site.plan.iter().map(|e| inst.emit(e)).collect();
    *taken = inst.taken;
    let mut nodes = result?;
    let Some((&last, parent_path)) = site.path.split_last() else {
        *root = nodes.pop().unwrap_or_else(Node::empty);
        return Ok(());
    };
    let parent = root.get_mut(parent_path).ok_or_else(|| ApplyError::BadPath(site.path.clone()))?;
    if nodes.is_empty() && parent.kind != NodeKind::Block {
        nodes.push(Node::empty());
    }
    parent.children.splice(last..=last, nodes);
    Ok(())
}

/// Rewrite the matched subtree to the pattern's correct side. Identifiers
/// of the pattern without a counterpart in the target become holes
/// (`$name`) for variable alignment.
pub fn apply_pattern(target: &Ast, site: &MatchSite) -> Result<Ast, ApplyError> {
    apply_sites(target, std::slice::from_ref(site))
}

/// Apply several pairwise disjoint sites.
pub fn apply_sites(target: &Ast, sites: &[MatchSite]) -> Result<Ast, ApplyError> {
    let mut order: Vec<&MatchSite> = sites.iter().collect();
    order.sort_by(|a, b| b.path.cmp(&a.path));
    for w in order.windows(2) {
        if w[0].path.starts_with(&w[1].path) {
            return Err(ApplyError::Overlap(w[1].path.clone()));
        }
    }
    let mut root = target.root.clone();
    let mut taken = BTreeSet::new();
    identifiers(&root, &mut taken);
    for s in order {
        apply_in_place(&mut root, s, &mut taken)?;
    }
    Ok(target.with_root(root))
}

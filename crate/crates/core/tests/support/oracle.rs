//! Brute-force reference for unit-cost tree edit distance, plus small tree
//! generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use cfrepair_core::ast::{Node, NodeKind};
use rand::Rng;

pub const ALPHABET: [&str; 2] = ["a", "b"];

pub fn sym(label: &str, children: Vec<Node>) -> Node {
    Node::new(NodeKind::Identifier, label, children)
}

/// Every ordered forest with exactly `n` nodes over `ALPHABET`.
pub fn forests(n: usize) -> Vec<Vec<Node>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // first tree takes k nodes (root + k-1 below it), the rest form a forest
    for k in 1..=n {
        for kids in forests(k - 1) {
            for rest in forests(n - k) {
                for l in ALPHABET {
                    let mut f = vec![sym(l, kids.clone())];
                    f.extend(rest.iter().cloned());
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Every ordered tree with 1..=max nodes.
pub fn trees_up_to(max: usize) -> Vec<Node> {
    let mut out = Vec::new();
    for n in 1..=max {
        for kids in forests(n - 1) {
            for l in ALPHABET {
                out.push(sym(l, kids.clone()));
            }
        }
    }
    out
}

fn key(f: &[Node]) -> String {
    f.iter().map(Node::sexp).collect::<Vec<_>>().join(" ")
}

fn forest_size(f: &[Node]) -> usize {
    f.iter().map(Node::size).sum()
}

fn containers(f: &[Node]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for (i, t) in f.iter().enumerate() {
        t.walk_with_path(&mut |p, _| {
            let mut full = vec![i];
            full.extend_from_slice(p);
            out.push(full);
        });
    }
    out
}

fn siblings_mut<'a>(f: &'a mut Vec<Node>, path: &[usize]) -> &'a mut Vec<Node> {
    match path.split_first() {
        None => f,
        Some((&i, rest)) => &mut f[i].get_mut(rest).unwrap().children,
    }
}

fn neighbours(f: &[Node], cap: usize) -> Vec<Vec<Node>> {
    let mut out = Vec::new();
    let nodes: Vec<Vec<usize>> = containers(f).into_iter().skip(1).collect();
    for p in &nodes {
        let (&last, parent) = p.split_last().unwrap();
        for l in ALPHABET {
            let mut g = f.to_vec();
            let n = &mut siblings_mut(&mut g, parent)[last];
            if n.label != l {
                n.label = l.to_string();
                out.push(g);
            }
        }
        let mut g = f.to_vec();
        let sibs = siblings_mut(&mut g, parent);
        let gone = sibs.remove(last);
        sibs.splice(last..last, gone.children);
        out.push(g);
    }
    if forest_size(f) < cap {
        for c in containers(f) {
            let len = siblings_mut(&mut f.to_vec(), &c).len();
            for i in 0..=len {
                for k in 0..=(len - i) {
                    for l in ALPHABET {
                        let mut g = f.to_vec();
                        let sibs = siblings_mut(&mut g, &c);
                        let adopted: Vec<Node> = sibs.drain(i..i + k).collect();
                        sibs.insert(i, sym(l, adopted));
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// Minimum number of unit edits from `start` to every forest reachable
/// without exceeding `cap` nodes.
pub fn bfs_distances(start: &Node, cap: usize) -> HashMap<String, usize> {
    let mut dist = HashMap::new();
    let first = vec![start.clone()];
    dist.insert(key(&first), 0);
    let mut queue = VecDeque::from([first]);
    while let Some(f) = queue.pop_front() {
        let d = dist[&key(&f)];
        for g in neighbours(&f, cap) {
            let k = key(&g);
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(k) {
                e.insert(d + 1);
                queue.push_back(g);
            }
        }
    }
    dist
}

pub fn tree_key(t: &Node) -> String {
    t.sexp()
}

/// Random tree with exactly `size` nodes; kinds include control flow so
/// weighted models are exercised.
pub fn random_tree(rng: &mut impl Rng, size: usize) -> Node {
    const KINDS: [NodeKind; 5] = [NodeKind::Identifier, NodeKind::BinOp, NodeKind::If, NodeKind::Call, NodeKind::Block];
    const LABELS: [&str; 3] = ["x", "y", "z"];
    let kind = KINDS[rng.gen_range(0..KINDS.len())];
    let label = LABELS[rng.gen_range(0..LABELS.len())];
    let mut left = size - 1;
    let mut children = Vec::new();
    while left > 0 {
        let take = rng.gen_range(1..=left);
        children.push(random_tree(rng, take));
        left -= take;
    }
    Node::new(kind, label, children)
}

//! Zhang-Shasha dynamic program with keyroots and mapping recovery.

use crate::ast::Node;

use super::CostModel;

const EPS: f64 = 1e-9;

/// Post-order view of a tree, 1-based so that index 0 can stand for "empty".
pub(crate) struct Indexed<'a> {
    /// nodes[k] for k in 1..=n, post-order.
    pub nodes: Vec<&'a Node>,
    /// Leftmost leaf descendant, post-order index.
    pub lmd: Vec<usize>,
    pub keyroots: Vec<usize>,
    /// Pre-order index of each post-order node.
    pub pre: Vec<usize>,
}

impl<'a> Indexed<'a> {
    pub fn new(root: &'a Node) -> Self {
        let mut nodes = vec![root];
        let mut lmd = vec![0];
        let mut pre = vec![0];
        let mut counter = 0usize;
        fn go<'a>(
            n: &'a Node,
            nodes: &mut Vec<&'a Node>,
            lmd: &mut Vec<usize>,
            pre: &mut Vec<usize>,
            counter: &mut usize,
        ) -> usize {
            let my_pre = *counter;
            *counter += 1;
            let mut first_leaf = None;
            for c in &n.children {
                let l = go(c, nodes, lmd, pre, counter);
                first_leaf.get_or_insert(l);
            }
            nodes.push(n);
            pre.push(my_pre);
            let idx = nodes.len() - 1;
            let l = first_leaf.unwrap_or(idx);
            lmd.push(l);
            l
        }
        go(root, &mut nodes, &mut lmd, &mut pre, &mut counter);
        let n = nodes.len() - 1;
        // keyroots: highest node for each distinct leftmost leaf
        let mut seen = vec![false; n + 1];
        let mut keyroots = Vec::new();
        for k in (1..=n).rev() {
            if !seen[lmd[k]] {
                seen[lmd[k]] = true;
                keyroots.push(k);
            }
        }
        keyroots.sort_unstable();
        Indexed { nodes, lmd, keyroots, pre }
    }

    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }
}

pub(crate) struct Zss<'a> {
    pub a: Indexed<'a>,
    pub b: Indexed<'a>,
    cm: CostModel,
    /// treedist[i][j], row-major, (n+1)*(m+1).
    td: Vec<f64>,
    del: Vec<f64>,
    ins: Vec<f64>,
}

impl<'a> Zss<'a> {
    pub fn run(a: &'a Node, b: &'a Node, cm: CostModel) -> Self {
        let a = Indexed::new(a);
        let b = Indexed::new(b);
        let del = (0..=a.len()).map(|i| if i == 0 { 0.0 } else { cm.delete_cost(a.nodes[i].kind) }).collect();
        let ins = (0..=b.len()).map(|j| if j == 0 { 0.0 } else { cm.insert_cost(b.nodes[j].kind) }).collect();
        let mut z = Zss { td: vec![0.0; (a.len() + 1) * (b.len() + 1)], a, b, cm, del, ins };
        let mut fd = Vec::new();
        for ii in 0..z.a.keyroots.len() {
            for jj in 0..z.b.keyroots.len() {
                let (i, j) = (z.a.keyroots[ii], z.b.keyroots[jj]);
                z.forest(i, j, &mut fd, true);
            }
        }
        z
    }

    pub fn distance(&self) -> f64 {
        self.treedist(self.a.len(), self.b.len())
    }

    fn treedist(&self, i: usize, j: usize) -> f64 {
        self.td[i * (self.b.len() + 1) + j]
    }

    fn relabel(&self, i: usize, j: usize) -> f64 {
        self.cm.relabel_nodes(self.a.nodes[i], self.b.nodes[j])
    }

    /// Fill the forest-distance table for subtrees rooted at i and j.
    /// `fd` is laid out over x in lmd(i)-1..=i and y in lmd(j)-1..=j.
    fn forest(&mut self, i: usize, j: usize, fd: &mut Vec<f64>, record: bool) {
        let (li, lj) = (self.a.lmd[i], self.b.lmd[j]);
        let rows = i - li + 2;
        let cols = j - lj + 2;
        fd.clear();
        fd.resize(rows * cols, 0.0);
        let at = |x: usize, y: usize| (x + 1 - li) * cols + (y + 1 - lj);
        for x in li..=i {
            fd[at(x, lj - 1)] = fd[at(x - 1, lj - 1)] + self.del[x];
        }
        for y in lj..=j {
            fd[at(li - 1, y)] = fd[at(li - 1, y - 1)] + self.ins[y];
        }
        let w = self.b.len() + 1;
        for x in li..=i {
            for y in lj..=j {
                let d = fd[at(x - 1, y)] + self.del[x];
                let n = fd[at(x, y - 1)] + self.ins[y];
                if self.a.lmd[x] == li && self.b.lmd[y] == lj {
                    let r = fd[at(x - 1, y - 1)] + self.relabel(x, y);
                    let v = d.min(n).min(r);
                    fd[at(x, y)] = v;
                    if record {
                        self.td[x * w + y] = v;
                    }
                } else {
                    let r = fd[at(self.a.lmd[x] - 1, self.b.lmd[y] - 1)] + self.td[x * w + y];
                    fd[at(x, y)] = d.min(n).min(r);
                }
            }
        }
    }

    /// Optimal mapping as (pre-order index in a, pre-order index in b),
    /// sorted by the a side.
    pub fn mapping(&mut self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if self.a.len() == 0 || self.b.len() == 0 {
            return out;
        }
        let mut stack = vec![(self.a.len(), self.b.len())];
        let mut fd = Vec::new();
        while let Some((i, j)) = stack.pop() {
            self.forest(i, j, &mut fd, false);
            let (li, lj) = (self.a.lmd[i], self.b.lmd[j]);
            let cols = j - lj + 2;
            let at = |x: usize, y: usize| (x + 1 - li) * cols + (y + 1 - lj);
            let (mut x, mut y) = (i, j);
            while x >= li || y >= lj {
                let cur = fd[at(x, y)];
                if x >= li && y >= lj {
                    let tree_part = self.a.lmd[x] == li && self.b.lmd[y] == lj;
                    let diag = if tree_part {
                        fd[at(x - 1, y - 1)] + self.relabel(x, y)
                    } else {
                        fd[at(self.a.lmd[x] - 1, self.b.lmd[y] - 1)] + self.treedist(x, y)
                    };
                    if (cur - diag).abs() < EPS {
                        if tree_part {
                            out.push((self.a.pre[x], self.b.pre[y]));
                            x -= 1;
                            y -= 1;
                        } else {
                            stack.push((x, y));
                            x = self.a.lmd[x] - 1;
                            y = self.b.lmd[y] - 1;
                        }
                        continue;
                    }
                }
                if x >= li && (cur - (fd[at(x - 1, y)] + self.del[x])).abs() < EPS {
                    x -= 1;
                } else {
                    debug_assert!(y >= lj);
                    y -= 1;
                }
            }
        }
        out.sort_unstable();
        out
    }
}

use crate::alpha::{alpha_eq, alpha_eq_all};
use crate::ast::{control_flow_paths, is_strict_prefix, Ast, Node, NodeKind};

/// Control-flow correspondence between an incorrect and a correct tree.
/// Nodes are identified by their paths from the respective roots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentResult {
    pub aligned: Vec<(Vec<usize>, Vec<usize>)>,
    pub unmatched_incorrect: Vec<Vec<usize>>,
    pub unmatched_correct: Vec<Vec<usize>>,
}

impl AlignmentResult {
    /// Index of the aligned pair whose incorrect-side node is at `path`.
    pub fn pair_of_incorrect(&self, path: &[usize]) -> Option<usize> {
        self.aligned.iter().position(|(p, _)| p == path)
    }

    pub fn pair_of_correct(&self, path: &[usize]) -> Option<usize> {
        self.aligned.iter().position(|(_, q)| q == path)
    }
}

/// Align the control-flow nodes of two programs.
pub fn control_flow_align(p_i: &Ast, p_c: &Ast) -> AlignmentResult {
    align_nodes(&p_i.root, &p_c.root)
}

/// Alignment over the strict descendants of `a` and `b`; the two roots are
/// taken to correspond to each other.
pub(crate) fn align_nodes(a: &Node, b: &Node) -> AlignmentResult {
    let cf_a: Vec<Vec<usize>> = control_flow_paths(a).into_iter().filter(|p| !p.is_empty()).collect();
    let cf_b: Vec<Vec<usize>> = control_flow_paths(b).into_iter().filter(|p| !p.is_empty()).collect();
    let mut aligned: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut used = vec![false; cf_b.len()];

    for u in &cf_a {
        let nu = a.get(u).unwrap();
        let anc_u = nearest(&aligned, u, |p| &p.0);
        for (k, v) in cf_b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let nv = b.get(v).unwrap();
            if nv.kind != nu.kind || nearest(&aligned, v, |p| &p.1) != anc_u {
                continue;
            }
            let crossing = aligned.iter().any(|(x, y)| is_strict_prefix(x, u) != is_strict_prefix(y, v));
            if crossing || !rule_holds(nu, nv) {
                continue;
            }
            used[k] = true;
            aligned.push((u.clone(), v.clone()));
            break;
        }
    }

    let unmatched_incorrect = cf_a.iter().filter(|u| !aligned.iter().any(|(x, _)| x == *u)).cloned().collect();
    let unmatched_correct = cf_b.iter().enumerate().filter(|(k, _)| !used[*k]).map(|(_, v)| v.clone()).collect();
    AlignmentResult { aligned, unmatched_incorrect, unmatched_correct }
}

/// Index of the aligned pair nearest above `path` on one side.
fn nearest<'a>(
    aligned: &'a [(Vec<usize>, Vec<usize>)],
    path: &[usize],
    side: impl Fn(&'a (Vec<usize>, Vec<usize>)) -> &'a Vec<usize>,
) -> Option<usize> {
    aligned
        .iter()
        .enumerate()
        .filter(|(_, p)| is_strict_prefix(side(p), path))
        .max_by_key(|(_, p)| side(p).len())
        .map(|(k, _)| k)
}

fn rule_holds(a: &Node, b: &Node) -> bool {
    let ch = |n: &Node, i: usize| n.children.get(i).cloned().unwrap_or_else(Node::empty);
    match a.kind {
        NodeKind::If => {
            if alpha_eq(&ch(a, 0), &ch(b, 0)) {
                return true;
            }
            match (a.children.get(2), b.children.get(2)) {
                (None, None) => alpha_eq(&ch(a, 1), &ch(b, 1)),
                (Some(x), Some(y)) => alpha_eq_all(&[(&ch(a, 1), &ch(b, 1)), (x, y)]),
                _ => false,
            }
        }
        NodeKind::While => alpha_eq(&ch(a, 0), &ch(b, 0)) || alpha_eq(&ch(a, 1), &ch(b, 1)),
        NodeKind::For => {
            let (ai, ac, as_) = (ch(a, 0), ch(a, 1), ch(a, 2));
            let (bi, bc, bs) = (ch(b, 0), ch(b, 1), ch(b, 2));
            alpha_eq_all(&[(&ai, &bi), (&ac, &bc), (&as_, &bs)]) || alpha_eq(&ch(a, 3), &ch(b, 3))
        }
        NodeKind::Call => {
            a.children.len() == b.children.len() && {
                let pairs: Vec<(&Node, &Node)> = a.children.iter().zip(&b.children).skip(1).collect();
                alpha_eq_all(&pairs)
            }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    #[test]
    fn identity_aligns_everything() {
        let p = parse("int main(){ int i, s = 0; for (i = 0; i < 3; i++) if (i) s += f(i); printf(\"%d\", s); }").unwrap();
        let r = control_flow_align(&p, &p);
        assert_eq!(r.aligned.len(), 4);
        assert!(r.unmatched_incorrect.is_empty() && r.unmatched_correct.is_empty());
        for (x, y) in &r.aligned {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn kinds_must_agree() {
        let a = parse("int main(){ int x; if (x) x--; }").unwrap();
        let b = parse("int main(){ int x; while (x) x--; }").unwrap();
        let r = control_flow_align(&a, &b);
        assert!(r.aligned.is_empty());
        assert_eq!(r.unmatched_incorrect.len(), 1);
        assert_eq!(r.unmatched_correct.len(), 1);
    }

    #[test]
    fn calls_need_matching_arguments() {
        let a = parse("int main(){ f(1, x); g(2); }").unwrap();
        let b = parse("int main(){ h(1, y); g(3); }").unwrap();
        let r = control_flow_align(&a, &b);
        assert_eq!(r.aligned.len(), 1);
        assert_eq!(r.unmatched_incorrect.len(), 1);
    }

    #[test]
    fn leftmost_candidate_wins() {
        let a = parse("int main(){ while (x) x--; }").unwrap();
        let b = parse("int main(){ while (y) x--; while (z) x--; }").unwrap();
        let r = control_flow_align(&a, &b);
        assert_eq!(r.aligned, vec![(vec![0, 0], vec![0, 0])]);
    }
}

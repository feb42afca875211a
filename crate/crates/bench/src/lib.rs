//! Synthetic inputs shared by the benchmarks and the acceptance suite.

use cfrepair_core::ast::{Node, NodeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A program with `regions` sibling control-flow statements. The fixed
/// variant turns every even region into a loop and relaxes every odd guard,
/// so each region differs between the two.
pub fn synthetic_program(regions: usize, fixed: bool) -> String {
    let mut body = String::new();
    for k in 0..regions {
        let (kw, op) = match (fixed, k % 2) {
            (true, 0) => ("while", ">"),
            (true, _) => ("if", ">="),
            (false, _) => ("if", ">"),
        };
        body.push_str(&format!("    {kw} (a {op} {k}) {{\n        b = b + {k};\n        a = a - 1;\n    }}\n"));
    }
    format!(
        "#include <stdio.h>\n\nint main()\n{{\n    int a, b = 0;\n    scanf(\"%d\", &a);\n{body}    printf(\"%d\\n\", b);\n    return 0;\n}}\n"
    )
}

/// `(incorrect, correct)` sources of [`synthetic_program`].
pub fn synthetic_pair(regions: usize) -> (String, String) {
    (synthetic_program(regions, false), synthetic_program(regions, true))
}

/// Seeded random tree with exactly `size` nodes over a few kinds and labels.
pub fn random_tree(seed: u64, size: usize) -> Node {
    fn go(rng: &mut ChaCha8Rng, size: usize) -> Node {
        const KINDS: [NodeKind; 5] = [NodeKind::Identifier, NodeKind::BinOp, NodeKind::If, NodeKind::Call, NodeKind::Block];
        const LABELS: [&str; 4] = ["x", "y", "z", "+"];
        let kind = KINDS[rng.gen_range(0..KINDS.len())];
        let label = LABELS[rng.gen_range(0..LABELS.len())];
        let mut left = size - 1;
        let mut children = Vec::new();
        while left > 0 {
            let take = rng.gen_range(1..=left.min(size / 3 + 1));
            children.push(go(rng, take));
            left -= take;
        }
        Node::new(kind, label, children)
    }
    go(&mut ChaCha8Rng::seed_from_u64(seed), size)
}

use std::path::PathBuf;

use cfrepair_core::ted::{distance, learning_cost_model, unit_distance};
use cfrepair_core::{control_flow_nodes, node_count, parse, print, Ast, NodeKind};

fn fixture(name: &str) -> Ast {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/579A").join(name);
    let src = std::fs::read_to_string(&path).unwrap();
    parse(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn kinds(ast: &Ast) -> Vec<NodeKind> {
    control_flow_nodes(ast).iter().map(|n| n.kind).collect()
}

#[test]
fn if_to_while_distances() {
    let a = fixture("fig2_incorrect.c");
    let b = fixture("fig2_repair.c");
    let c = fixture("fig2_user_fix.c");
    assert_eq!(unit_distance(&a.root, &b.root), 1.0);
    assert_eq!(unit_distance(&a.root, &c.root), 6.0);
    assert_eq!(distance(&a.root, &b.root, &learning_cost_model(10.0).unwrap()), 10.0);
    assert_eq!(node_count(&a), node_count(&b));
    assert!(print(&b).contains("while ((x/2)!=0)"));
}

#[test]
fn guard_fix_distances() {
    let a = fixture("fig3_incorrect.c");
    let b = fixture("fig3_repair.c");
    let c = fixture("fig3_user_fix.c");
    assert_eq!(unit_distance(&a.root, &b.root), 2.0);
    assert!(unit_distance(&a.root, &c.root) > 2.0);
}

#[test]
fn control_flow_listing() {
    use NodeKind::*;
    assert_eq!(kinds(&fixture("fig2_fragment.c")), vec![If, If, Call]);
    assert_eq!(kinds(&fixture("fig3_fragment.c")), vec![While, If, Call]);
    let a = fixture("fig2_incorrect.c");
    let outer = control_flow_nodes(&a).into_iter().find(|n| n.kind == If).unwrap();
    assert_eq!(cfrepair_core::frontend::print_expr(&outer.children[0]), "(x/2)!=0");
}

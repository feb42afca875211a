mod support;

use cfrepair_core::ted::{distance, learning_cost_model, ted, unit_cost_model, CostModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle;

#[test]
fn unit_distance_matches_exhaustive_search() {
    let trees = oracle::trees_up_to(4);
    assert_eq!(trees.len(), 102);
    let cm = unit_cost_model();
    for a in &trees {
        let reach = oracle::bfs_distances(a, 5);
        for b in &trees {
            let want = reach[&oracle::tree_key(b)] as f64;
            assert_eq!(distance(a, b, &cm), want, "{} -> {}", a.sexp(), b.sexp());
        }
    }
}

#[test]
fn metric_axioms_and_script_validity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for cm in [unit_cost_model(), learning_cost_model(4.0).unwrap()] {
        for _ in 0..150 {
            let (na, nb, nc) = (rng.gen_range(1..=18), rng.gen_range(1..=18), rng.gen_range(1..=18));
            let a = oracle::random_tree(&mut rng, na);
            let b = oracle::random_tree(&mut rng, nb);
            let c = oracle::random_tree(&mut rng, nc);
            let ab = ted(&a, &b, &cm);
            assert_eq!(ab.distance, distance(&b, &a, &cm));
            assert_eq!(distance(&a, &a, &cm), 0.0);
            assert!(distance(&a, &c, &cm) <= ab.distance + distance(&b, &c, &cm) + 1e-9);
            assert!(ab.distance >= (na as f64 - nb as f64).abs());
            assert_eq!(ab.script.apply(&a).unwrap(), b);
            let sum: f64 = ab.script.edits.iter().map(|e| e.cost()).sum();
            assert!((sum - ab.distance).abs() < 1e-9);
            assert_eq!(ab.script.total_cost, sum);
        }
    }
}

#[test]
fn weight_one_equals_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let one = learning_cost_model(1.0).unwrap();
    let unit = CostModel::unit();
    for _ in 0..100 {
        let a = oracle::random_tree(&mut rng, 12);
        let b = oracle::random_tree(&mut rng, 9);
        assert_eq!(distance(&a, &b, &one), distance(&a, &b, &unit));
    }
}

mod common;

use std::collections::BTreeSet;

use common::{census, orbit, raw_edges};
use dqgraph::{canonical_form, enumerate_graphs, DirectedGraph, GraphFilter};

#[test]
fn oracle_census_small_cases() {
    let c = census(1, 2);
    assert_eq!((c.labeled, c.classes.len(), c.zero_classes.len()), (2, 1, 0));
    let c = census(2, 2);
    assert_eq!((c.labeled, c.labeled_with_wheel), (28, 8));
    assert_eq!(census(1, 1).labeled, 0);
}

#[test]
fn enumerator_matches_oracle() {
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (2, 3), (3, 1), (3, 2)] {
        let oracle = census(n, m);
        let all = enumerate_graphs(n, m, GraphFilter::All).unwrap();
        assert_eq!(all.labeled_count, oracle.labeled, "K_{n},{m} labeled");
        let keys: BTreeSet<_> = all.classes.iter().map(|g| orbit(&raw_edges(g), m).0).collect();
        assert_eq!(keys.len(), all.classes.len(), "K_{n},{m}: classes are distinct orbits");
        assert_eq!(keys, oracle.classes, "K_{n},{m} classes");
        let wheels = enumerate_graphs(n, m, GraphFilter::WheelsOnly).unwrap();
        assert_eq!(wheels.labeled_count, oracle.labeled_with_wheel, "K_{n},{m} wheels");
    }
}

#[test]
fn zero_classes_agree_with_canonical_sign() {
    for (n, m) in [(2, 1), (2, 2), (3, 2)] {
        for g in common::labeled_graphs(n, m) {
            let (_, zero) = orbit(&g, m);
            let class = canonical_form(&DirectedGraph::new(m, g).unwrap());
            assert_eq!(class.is_zero(), zero);
        }
    }
}

#[test]
fn wheel_free_filters_partition_the_census() {
    for n in 1..=3 {
        let all = enumerate_graphs(n, 2, GraphFilter::All).unwrap();
        let free = enumerate_graphs(n, 2, GraphFilter::WheelFree).unwrap();
        let wheels = enumerate_graphs(n, 2, GraphFilter::WheelsOnly).unwrap();
        assert_eq!(free.labeled_count + wheels.labeled_count, all.labeled_count);
        assert_eq!(free.classes.len() + wheels.classes.len(), all.classes.len());
        assert!(free.classes.iter().all(|g| !g.has_wheel()));
    }
}

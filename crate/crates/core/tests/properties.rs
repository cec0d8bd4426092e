mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{act, all_classes, labeled_graphs, random_sum};
use dqgraph::eval::{apply_graph, apply_labeled};
use dqgraph::homological::{graph_compose, graph_delta, graph_gerstenhaber};
use dqgraph::poisson::parse_preset;
use dqgraph::rational::{int, ratio};
use dqgraph::{canonical_form, DirectedGraph, GraphSum, Poly};

fn poly2() -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u32..3, 0u32..3, -5i64..=5), 0..5).prop_map(|terms| {
        let mut p = Poly::zero(2);
        for (a, b, c) in terms {
            p += &Poly::monomial(vec![a, b], int(c));
        }
        p
    })
}

fn monomial3(rng: &mut ChaCha8Rng, max_degree: u32) -> Poly {
    loop {
        let e: Vec<u32> = (0..3).map(|_| rng.gen_range(0..=max_degree)).collect();
        if e.iter().sum::<u32>() <= max_degree {
            return Poly::monomial(e, int(rng.gen_range(1..=3)));
        }
    }
}

proptest! {
    #[test]
    fn polynomial_ring_axioms(a in poly2(), b in poly2(), c in poly2()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a - &a), &Poly::zero(2));
        for v in 0..2 {
            let lhs = (&a * &b).derive(v).unwrap();
            let rhs = &(&a.derive(v).unwrap() * &b) + &(&a * &b.derive(v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn canonical_form_is_a_class_function(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = labeled_graphs(n, 2);
        let raw = pool[rng.gen_range(0..pool.len())].clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let flips: u32 = rng.gen_range(0..(1u32 << n));
        let g = DirectedGraph::new(2, raw.clone()).unwrap();
        let h = DirectedGraph::new(2, act(&raw, 2, &perm, flips)).unwrap();
        let (cg, ch) = (canonical_form(&g), canonical_form(&h));
        prop_assert_eq!(&cg.rep, &ch.rep);
        let parity = if flips.count_ones() % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(ch.sign, cg.sign * parity);
    }

    #[test]
    fn evaluation_respects_canonical_sign(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = labeled_graphs(n, 2);
        let g = DirectedGraph::new(2, pool[rng.gen_range(0..pool.len())].clone()).unwrap();
        let p = parse_preset("so3").unwrap();
        let args = [monomial3(&mut rng, 3), monomial3(&mut rng, 3)];
        let value = apply_labeled(&g, &p, &args).unwrap();
        let k = rng.gen_range(0..n);
        prop_assert_eq!(apply_labeled(&g.swap_edges(k), &p, &args).unwrap(), -&value);
        let class = canonical_form(&g);
        let through_class = apply_graph(&GraphSum::from_graph(&g), &p, &args).unwrap();
        prop_assert_eq!(&through_class, &value);
        if class.is_zero() {
            prop_assert!(value.is_zero());
        }
    }

    #[test]
    fn graph_operators_are_multilinear(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sum(&mut rng, &all_classes(3, 2));
        let p = parse_preset("jacobian(x1*x2*x3)").unwrap();
        let (f, f2, g) = (monomial3(&mut rng, 3), monomial3(&mut rng, 3), monomial3(&mut rng, 3));
        let c = ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        let mut combo = f.clone();
        combo.add_scaled(&f2, &c);
        for slot in 0..2 {
            let place = |x: &Poly| if slot == 0 { vec![x.clone(), g.clone()] } else { vec![g.clone(), x.clone()] };
            let lhs = apply_graph(&s, &p, &place(&combo)).unwrap();
            let mut rhs = apply_graph(&s, &p, &place(&f)).unwrap();
            rhs.add_scaled(&apply_graph(&s, &p, &place(&f2)).unwrap(), &c);
            prop_assert_eq!(lhs, rhs);
        }
        // vanishing on constants
        let one = Poly::one(3);
        prop_assert!(apply_graph(&s, &p, &[one.clone(), g.clone()]).unwrap().is_zero());
    }

    #[test]
    fn delta_squares_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sum(&mut rng, &all_classes(3, 2));
        prop_assert!(graph_delta(&graph_delta(&s)).is_empty());
        let t = random_sum(&mut rng, &all_classes(2, 3));
        prop_assert!(graph_delta(&graph_delta(&t)).is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gerstenhaber_bracket_is_graded_lie(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = all_classes(2, 2);
        let (a, b, c) = (random_sum(&mut rng, &pool), random_sum(&mut rng, &pool), random_sum(&mut rng, &pool));
        // degree 1 each: [a,b] = [b,a] and [a,b] = a∘b + b∘a
        prop_assert_eq!(graph_gerstenhaber(&a, &b), graph_gerstenhaber(&b, &a));
        prop_assert_eq!(graph_gerstenhaber(&a, &b), graph_compose(&a, &b).add(&graph_compose(&b, &a)));
        let lhs = graph_gerstenhaber(&a, &graph_gerstenhaber(&b, &c));
        let rhs = graph_gerstenhaber(&graph_gerstenhaber(&a, &b), &c)
            .sub(&graph_gerstenhaber(&b, &graph_gerstenhaber(&a, &c)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn delta_is_a_derivation_of_the_bracket(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = all_classes(2, 2);
        let (a, b) = (random_sum(&mut rng, &pool), random_sum(&mut rng, &pool));
        // δ[a,b] = [δa,b] + (-1)^{|a|} [a,δb] with |a| = 1
        let lhs = graph_delta(&graph_gerstenhaber(&a, &b));
        let rhs = graph_gerstenhaber(&graph_delta(&a), &b).sub(&graph_gerstenhaber(&a, &graph_delta(&b)));
        prop_assert_eq!(lhs, rhs);
    }
}

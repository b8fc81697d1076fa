mod common;

use common::*;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;
use retraction_core::blocked::count_blocked;
use retraction_core::count::count_list_hom;
use retraction_core::gadget::{
    analyze_cuts, build_cut_instance, build_fixed_graph, build_largecut_instance, choose_pq,
    count_large_cuts_bruteforce, count_multiterminal_cuts_bruteforce, dirichlet_approx, dirichlet_bound,
    edge_gadget_count, estimate_multiterminal_cuts, exact_blocked_oracle, find_j3_labels, hk, hk_prime, j3, jq,
    min_multiterminal_cut, pin_neighborhood_instance, wr, FixedGraph, LargeCutOverrides,
};
use retraction_core::count::count_hom;
use retraction_core::Graph;

fn star3() -> Graph {
    graph(
        &[("c", false), ("a", false), ("b", false), ("d", false)],
        &[("c", "a"), ("c", "b"), ("c", "d")],
    )
}

#[test]
fn fixed_graph_shapes() {
    let h1 = hk(1).unwrap();
    assert_eq!((h1.n(), h1.loop_count(), h1.non_loop_edges().len()), (9, 6, 16));
    assert_eq!(2 * h1.edge_count(), 32 + 12);
    for k in 2..=4 {
        assert_eq!(2 * hk(k).unwrap().edge_count(), 32 + 12 * k);
    }
    let hp = hk_prime(1).unwrap();
    assert_eq!((hp.n(), hp.non_loop_edges().len()), (5, 4));
    assert_eq!(jq(3).unwrap().n(), 7);
    assert_eq!(wr(4).unwrap().loop_count(), 5);
    assert!(FixedGraph::parse("pbrp:4:1,3,4").is_ok());
    assert!(build_fixed_graph(&FixedGraph::Jq(2)).is_err());
    assert!(FixedGraph::parse("nonsense").is_err());
}

#[test]
fn j3_labelling() {
    let l = find_j3_labels(&j3()).unwrap();
    let names = j3();
    assert!(l.vertices().iter().all(|v| names.index_of(v).is_some()));
    assert_eq!(names.degree(names.index_of(&l.w).unwrap()), 3);
    assert!(find_j3_labels(&cycle(6, false)).is_err());
    let two = j3().disjoint_union(&j3(), "z").unwrap();
    assert_eq!(find_j3_labels(&two).unwrap(), find_j3_labels(&two).unwrap());
}

#[test]
fn dirichlet_examples() {
    assert_eq!(dirichlet_approx(&[0.5], 4).unwrap(), (vec![1], 2));
    assert_eq!(dirichlet_approx(&[1.5], 2).unwrap(), (vec![3], 2));
    assert!((dirichlet_bound(3, 1000) - 0.1).abs() < 1e-12);
}

#[test]
fn pq_choice() {
    assert_eq!(choose_pq(1), (44, 52));
    let (p, q) = choose_pq(2);
    assert_eq!(p, 56);
    let (lo, hi) = (6f64.ln() / 4f64.ln(), 6f64.ln() / 2.25f64.ln());
    assert!(q as f64 > lo * p as f64 && (q as f64) < hi * p as f64 && q as f64 - 1.0 <= lo * p as f64);
}

#[test]
fn cut_plan_formulas() {
    let g = path(3, false);
    let plan = build_cut_instance(&g, ["p0", "p1", "p2"], 2, &j3(), 0.05).unwrap();
    assert_eq!(plan.s, 2 + 2 + 3 * 3);
    assert_eq!(plan.z_star_exponent(), (plan.s * plan.r * (2 - 2)) as i128);
    assert!(build_cut_instance(&g, ["p0", "p0", "p2"], 2, &j3(), 0.05).is_err());
    assert!(build_cut_instance(&g, ["p0", "p1", "p2"], 2, &cycle(4, false), 0.05).is_err());
}

#[test]
fn multiterminal_cut_counts() {
    // in a star every pair of leaf edges leaves a leaf attached: three
    // terminal leaves need all three... any two edges suffice to separate.
    let s = star3();
    let terms = ["a", "b", "d"];
    let two = count_multiterminal_cuts_bruteforce(&s, terms, 2).unwrap();
    assert_eq!(two, BigUint::from(3u32));
    assert_eq!(min_multiterminal_cut(&s, terms).unwrap(), 2);
    let tri = cycle(3, false);
    assert_eq!(count_multiterminal_cuts_bruteforce(&tri, ["c0", "c1", "c2"], 3).unwrap(), BigUint::one());
    assert_eq!(count_multiterminal_cuts_bruteforce(&tri, ["c0", "c1", "c2"], 0).unwrap(), BigUint::zero());
}

#[test]
fn star_estimate_is_exact() {
    let s = star3();
    let terms = ["a", "b", "d"];
    let b = min_multiterminal_cut(&s, terms).unwrap();
    let plan = build_cut_instance(&s, terms, b, &j3(), 0.02).unwrap();
    let t = count_multiterminal_cuts_bruteforce(&s, terms, b).unwrap();
    let est = estimate_multiterminal_cuts(&plan, 0.5, exact_blocked_oracle(&j3())).unwrap();
    assert_eq!(est, t);
    assert_eq!(est, estimate_multiterminal_cuts(&plan, 0.5, exact_blocked_oracle(&j3())).unwrap());
    let over = build_cut_instance(&s, terms, 4, &j3(), 0.02).unwrap();
    assert!(estimate_multiterminal_cuts(&over, 0.5, exact_blocked_oracle(&j3())).unwrap().is_zero());
}

#[test]
fn psi_sizes_and_forced_gadgets() {
    let h = j3();
    for (g, terms) in [(star3(), ["a", "b", "d"]), (cycle(4, false), ["c0", "c1", "c2"])] {
        let b = min_multiterminal_cut(&g, terms).unwrap();
        let plan = build_cut_instance(&g, terms, b, &h, 0.05).unwrap();
        let a = analyze_cuts(&plan, &h).unwrap();
        assert_eq!(a.exact_total(), count_blocked(&plan.blocked, &h).unwrap());
        let dw = plan.degrees[3];
        for r in &a.records {
            assert!(r.kappa >= 3);
            assert!(r.psi.len() <= dw.pow(r.kappa as u32 - 3));
        }
        let (u, v) = plan.g.non_loop_edges()[0];
        let (u, v) = (plan.g.name(u), plan.g.name(v));
        let l = &plan.labels;
        for (cu, cv) in [(&l.x0, &l.y0), (&l.y0, &l.z0), (&l.z0, &l.x0)] {
            assert_eq!(edge_gadget_count(&plan, &h, (u, v), cu, cv).unwrap(), BigUint::one());
        }
    }
}

#[test]
fn largecut_plans() {
    let ones = LargeCutOverrides { p: Some(1), q: Some(1), t: Some(1), s: Some(1) };
    let plan = build_largecut_instance(&path(2, false), 1, 1, ones).unwrap();
    let h = hk(1).unwrap();
    let inst = plan.blocked.expand(&h, 1000).unwrap();
    assert_eq!(inst.pattern.n(), 2 * 6 + 2 + 3);
    assert_eq!(count_list_hom(&inst, &h).unwrap(), count_blocked(&plan.blocked, &h).unwrap());
    let p3 = build_largecut_instance(&path(3, false), 2, 1, LargeCutOverrides::default()).unwrap();
    assert_eq!((p3.t, p3.s, p3.p, p3.q), (81, 4, 44, 52));
    assert!(p3.blocked.vertex_count() > 10_000 && p3.blocked.expand(&h, 10_000).is_err());
    assert_eq!(count_large_cuts_bruteforce(&path(2, false), 1).unwrap(), BigUint::one());
    assert_eq!(count_large_cuts_bruteforce(&path(2, false), 2).unwrap(), BigUint::zero());
    assert_eq!(count_large_cuts_bruteforce(&cycle(4, false), 4).unwrap(), BigUint::one());
}

#[test]
fn neighbourhood_pinning_examples() {
    let h = hk(1).unwrap();
    let b = h.index_of("b").unwrap();
    let local = h.induced(&h.gamma(b).into_iter().collect::<Vec<_>>());
    let k2 = path(2, false);
    let inst = pin_neighborhood_instance(&k2, &h, "b").unwrap();
    assert_eq!(count_list_hom(&inst, &h).unwrap(), count_hom(&k2, &local).unwrap());
    let one = graph(&[("a", false)], &[]);
    let inst = pin_neighborhood_instance(&one, &h, "b").unwrap();
    assert_eq!(count_list_hom(&inst, &h).unwrap(), BigUint::from(h.gamma(b).len()));
    let inst = pin_neighborhood_instance(&Graph::empty(), &h, "b").unwrap();
    assert_eq!(count_list_hom(&inst, &h).unwrap(), BigUint::one());
}

proptest! {
    #[test]
    fn dirichlet_bound_holds(
        lambdas in proptest::collection::vec(0.01f64..4.0, 1..=3),
        n in prop_oneof![Just(10u64), Just(100), Just(1000), 1u64..50],
    ) {
        let (p, r) = dirichlet_approx(&lambdas, n).unwrap();
        prop_assert!(r >= 1 && r <= n);
        let bound = dirichlet_bound(lambdas.len(), n);
        for (l, pi) in lambdas.iter().zip(&p) {
            prop_assert!((r as f64 * l - *pi as f64).abs() <= bound * (1.0 + 1e-12));
        }
        // smallest qualifying r
        for rr in 1..r {
            prop_assert!(lambdas.iter().any(|l| (rr as f64 * l - (rr as f64 * l).round()).abs() > bound * (1.0 + 1e-12)));
        }
    }
}

mod common;

use std::collections::BTreeSet;

use common::*;
use num_bigint::BigUint;
use proptest::prelude::*;
use retraction_core::count::count_retraction;
use retraction_core::csp::{
    build_digraph_from_csp, build_graph_from_csp, count_csp, imp_instance, pbrp_csp, strip_trivial_components,
    subtract_wrapper, translate_ret_to_csp, CspInstance,
};
use retraction_core::gadget::{pbrp_graph, twrench};
use retraction_core::{Graph, ListedInstance};

/// Backtracking isomorphism test respecting loops.
fn isomorphic(a: &Graph, b: &Graph) -> bool {
    fn extend(a: &Graph, b: &Graph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == a.n() {
            return true;
        }
        for j in 0..b.n() {
            if used[j] || a.is_looped(i) != b.is_looped(j) || a.degree(i) != b.degree(j) {
                continue;
            }
            if (0..i).all(|k| a.adjacent(i, k) == b.adjacent(j, map[k])) {
                map.push(j);
                used[j] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    a.n() == b.n() && a.edges().len() == b.edges().len() && extend(a, b, &mut vec![], &mut vec![false; b.n()])
}

/// Satisfying assignments counted by trying all 2^n assignments.
fn brute_csp(vars: usize, imps: &[(usize, usize)], pins: &[(usize, bool)]) -> u64 {
    (0u32..1 << vars)
        .filter(|m| {
            let v = |i: usize| m >> i & 1 == 1;
            imps.iter().all(|&(x, y)| !v(x) || v(y)) && pins.iter().all(|&(x, b)| v(x) == b)
        })
        .count() as u64
}

fn csp_from(vars: usize, imps: &[(usize, usize)], pins: &[(usize, bool)]) -> CspInstance {
    let name = |i: usize| format!("x{i}");
    CspInstance::new(
        (0..vars).map(name).collect(),
        imps.iter().map(|&(a, b)| (name(a), name(b))).collect(),
        pins.iter().map(|&(a, v)| (name(a), v)).collect(),
    )
    .unwrap()
}

#[test]
fn small_csp_counts() {
    assert_eq!(count_csp(&imp_instance(&["x"], &[]).unwrap()).unwrap(), BigUint::from(2u32));
    assert_eq!(count_csp(&imp_instance(&["x", "y"], &[("x", "y")]).unwrap()).unwrap(), BigUint::from(3u32));
    let pinned = CspInstance::new(
        vec!["x".into(), "y".into()],
        vec![("x".into(), "y".into())],
        vec![("x".into(), true)],
    )
    .unwrap();
    assert_eq!(count_csp(&pinned).unwrap(), BigUint::from(1u32));
}

#[test]
fn graph_construction_examples() {
    let (iv, ie) = pbrp_csp(1, &[1].into()).unwrap();
    assert!(iv.imps().is_empty());
    assert_eq!(ie.imps().len(), 1);
    let h = build_graph_from_csp(&iv, &ie).unwrap();
    assert!(isomorphic(&h, &twrench()));

    let iv = imp_instance(&["x"], &[]).unwrap();
    let ie = imp_instance(&["x"], &[("x", "x")]).unwrap();
    let h = build_graph_from_csp(&iv, &ie).unwrap();
    assert_eq!((h.n(), h.loop_count(), h.non_loop_edges().len()), (2, 2, 0));

    let free = imp_instance(&["x", "y"], &[]).unwrap();
    let k = build_graph_from_csp(&free, &free).unwrap();
    assert_eq!((k.n(), k.loop_count(), k.non_loop_edges().len()), (4, 4, 6));

    let d = build_digraph_from_csp(&iv, &ie, &imp_instance(&["x"], &[]).unwrap()).unwrap();
    let arcs: BTreeSet<(String, String)> =
        d.arcs().into_iter().map(|(a, b)| (d.names()[a].clone(), d.names()[b].clone())).collect();
    let expected: BTreeSet<(String, String)> =
        [("0", "0"), ("0", "1"), ("1", "1")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(arcs, expected);
}

#[test]
fn pbrp_construction_components() {
    let (iv, ie) = pbrp_csp(2, &[1].into()).unwrap();
    assert_eq!((iv.imps().len(), ie.imps().len()), (1, 3));
    for q in 1..=4usize {
        for mask in 1u32..(1 << q) {
            let s: BTreeSet<usize> = (1..=q).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            let (iv, ie) = pbrp_csp(q, &s).unwrap();
            let h = build_graph_from_csp(&iv, &ie).unwrap();
            let comps = h.component_graphs();
            let big: Vec<&Graph> = comps.iter().filter(|c| c.n() > 1).collect();
            assert_eq!(big.len(), 1, "Q={q} S={s:?}");
            assert!(isomorphic(big[0], &pbrp_graph(q, &s).unwrap()), "Q={q} S={s:?}");
            assert!(comps.iter().filter(|c| c.n() == 1).all(|c| c.loop_count() == 0));
        }
    }
}

#[test]
fn stripping_and_subtraction() {
    let h = twrench().disjoint_union(&graph(&[("z", false)], &[]), "s:").unwrap();
    let (core, spec) = strip_trivial_components(&h).unwrap();
    assert!(isomorphic(&core, &twrench()));
    assert_eq!(spec.components.len(), 1);
    // an edgeless pattern maps into an unlooped singleton once
    assert_eq!(spec.eval(&graph(&[("a", false)], &[])).unwrap(), BigUint::from(1u32));
    assert_eq!(spec.eval(&path(2, false)).unwrap(), BigUint::from(0u32));
    assert_eq!(subtract_wrapper(&9u32.into(), &1u32.into()).unwrap(), BigUint::from(8u32));
    assert_eq!(subtract_wrapper(&5u32.into(), &5u32.into()).unwrap(), BigUint::from(0u32));
    assert!(subtract_wrapper(&0u32.into(), &1u32.into()).is_err());
    let two = twrench().disjoint_union(&twrench(), "s:").unwrap();
    assert!(strip_trivial_components(&two).is_err());
}

#[test]
fn single_vertex_translation_counts_vertices() {
    let iv = imp_instance(&["x", "y"], &[("x", "y")]).unwrap();
    let ie = imp_instance(&["x", "y"], &[("y", "x")]).unwrap();
    let h = build_graph_from_csp(&iv, &ie).unwrap();
    let inst = ListedInstance::full(graph(&[("v", false)], &[]), &h).unwrap();
    let c = translate_ret_to_csp(&inst, &iv, &ie).unwrap();
    assert_eq!(count_csp(&c).unwrap(), BigUint::from(h.n()));
}

proptest! {
    #[test]
    fn csp_count_matches_enumeration(
        vars in 1usize..=6,
        imps in proptest::collection::vec((0usize..6, 0usize..6), 0..8),
        pins in proptest::collection::btree_map(0usize..6, any::<bool>(), 0..3),
    ) {
        let imps: Vec<(usize, usize)> = imps.into_iter().map(|(a, b)| (a % vars, b % vars)).collect();
        let pins: Vec<(usize, bool)> = pins.into_iter().filter(|(a, _)| *a < vars).collect();
        let c = csp_from(vars, &imps, &pins);
        prop_assert_eq!(count_csp(&c).unwrap(), BigUint::from(brute_csp(vars, &imps, &pins)));
    }

    #[test]
    fn constant_assignments_are_looped(
        vars in 1usize..=4,
        iv in proptest::collection::vec((0usize..4, 0usize..4), 0..5),
        ie in proptest::collection::vec((0usize..4, 0usize..4), 0..5),
    ) {
        let fix = |v: Vec<(usize, usize)>| v.into_iter().map(|(a, b)| (a % vars, b % vars)).collect::<Vec<_>>();
        let (iv, ie) = (csp_from(vars, &fix(iv), &[]), csp_from(vars, &fix(ie), &[]));
        let h = build_graph_from_csp(&iv, &ie).unwrap();
        for name in ["0".repeat(vars), "1".repeat(vars)] {
            let i = h.index_of(&name).expect("constant assignments satisfy Imp constraints");
            prop_assert!(h.is_looped(i));
        }
    }

    #[test]
    fn parsimonious_translation(
        vars in 1usize..=3,
        iv in proptest::collection::vec((0usize..3, 0usize..3), 0..4),
        ie in proptest::collection::vec((0usize..3, 0usize..3), 0..4),
        g in arb_graph("v", 4, false),
        pins in proptest::collection::vec(proptest::option::of(0usize..8), 4),
    ) {
        let fix = |v: Vec<(usize, usize)>| v.into_iter().map(|(a, b)| (a % vars, b % vars)).collect::<Vec<_>>();
        let (iv, ie) = (csp_from(vars, &fix(iv), &[]), csp_from(vars, &fix(ie), &[]));
        let h = build_graph_from_csp(&iv, &ie).unwrap();
        let lists = g
            .names()
            .iter()
            .zip(&pins)
            .filter_map(|(v, p)| p.map(|t| (v.clone(), [h.name(t % h.n()).to_string()].into())))
            .collect();
        let inst = ListedInstance::new(g, &lists, &h).unwrap();
        let c = translate_ret_to_csp(&inst, &iv, &ie).unwrap();
        prop_assert_eq!(count_csp(&c).unwrap(), count_retraction(&inst, &h).unwrap());
    }
}

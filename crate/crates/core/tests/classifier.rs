mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use retraction_core::classify::{
    classify, has_induced_j3, is_caterpillar, is_pbrp, Class, CASE_DISTANCE2, CASE_FALLBACK, CASE_NOT_WRENCH,
    CASE_REFLEXIVE_CYCLE, CASE_WR,
};
use retraction_core::gadget::{pbrp_graph, twrench, wr};
use retraction_core::verify::classifier_fixtures;
use retraction_core::{Graph, GraphBuilder};

/// Tree from a parent choice per vertex (vertex i > 0 hangs off parents[i] mod i).
fn tree(parents: &[usize], loops: u64) -> Graph {
    let mut b = GraphBuilder::new();
    for i in 0..=parents.len() {
        b.vertex(format!("t{i}"), loops >> i & 1 == 1);
    }
    for (i, p) in parents.iter().enumerate() {
        b.edge(format!("t{}", p % (i + 1)), format!("t{}", i + 1));
    }
    b.build().unwrap()
}

fn with_extra_edge(g: &Graph, a: usize, b: usize) -> Graph {
    let (a, b) = (a % g.n(), b % g.n());
    let mut bld = g.to_builder();
    if a != b {
        bld.edge(g.name(a), g.name(b));
    }
    bld.build().unwrap()
}

/// A tree is a caterpillar when deleting its leaves leaves a path.
fn caterpillar_by_spine(g: &Graph) -> bool {
    let inner: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) >= 2).collect();
    if inner.is_empty() {
        return true;
    }
    let spine = g.induced(&inner);
    spine.is_connected() && (0..spine.n()).all(|v| spine.degree(v) <= 2)
}

#[test]
fn fixture_table() {
    for (name, h, class, clause, _) in classifier_fixtures() {
        let v = classify(&h).unwrap();
        assert_eq!((v.class, v.clause.as_str()), (class, clause), "{name}");
    }
}

#[test]
fn neighbourhood_witnesses_on_reflexive_stars() {
    let v = classify(&wr(3).unwrap()).unwrap();
    assert_eq!(v.class, Class::SatEquivalent);
    assert!(v.witnesses.iter().any(|w| w.case == CASE_WR));
    // two looped leaves are a reflexive path
    assert_eq!(classify(&wr(2).unwrap()).unwrap().class, Class::BisEquivalent);
}

#[test]
fn disconnected_targets_take_the_hardest_component() {
    let h = twrench().disjoint_union(&cycle(5, false), "x:").unwrap();
    assert_eq!(classify(&h).unwrap().class, Class::SatEquivalent);
    let h = twrench().disjoint_union(&graph(&[("a", true)], &[]), "x:").unwrap();
    let v = classify(&h).unwrap();
    assert_eq!((v.class, v.components.len()), (Class::BisEquivalent, 2));
    assert_eq!(classify(&Graph::empty()).unwrap().class, Class::Fp);
}

#[test]
fn pbrp_examples_are_bis() {
    for q in 1..=4usize {
        for mask in 0u32..(1 << q) {
            let s: BTreeSet<usize> = (1..=q).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            let h = pbrp_graph(q, &s).unwrap();
            let shape = is_pbrp(&h).unwrap();
            assert!(shape.is_some(), "Q={q} S={s:?}");
            let expected = if h.n() <= 2 && h.non_loop_edges().len() <= 1 && h.is_reflexive() { Class::Fp } else { Class::BisEquivalent };
            assert_eq!(classify(&h).unwrap().class, expected, "Q={q} S={s:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn harary_criterion(parents in proptest::collection::vec(0usize..16, 0..9)) {
        let t = tree(&parents, 0);
        let cat = is_caterpillar(&t).unwrap();
        prop_assert_eq!(cat, caterpillar_by_spine(&t));
        prop_assert_eq!(cat, has_induced_j3(&t).is_none());
    }

    #[test]
    fn classification_is_deterministic_and_order_free(
        a in proptest::collection::vec(0usize..8, 0..5), la in any::<u64>(),
        b in proptest::collection::vec(0usize..8, 0..5), lb in any::<u64>(),
    ) {
        let (x, y) = (tree(&a, la), tree(&b, lb));
        let xy = x.disjoint_union(&y, "r:").unwrap();
        let yx = y.disjoint_union(&x, "r:").unwrap();
        let (v1, v2) = (classify(&xy).unwrap(), classify(&yx).unwrap());
        prop_assert_eq!((v1.class, &v1.clause), (v2.class, &v2.clause));
        prop_assert_eq!(classify(&xy).unwrap(), v1);
    }

    #[test]
    fn girth_five_targets_always_classified(
        parents in proptest::collection::vec(0usize..16, 0..8),
        loops in any::<u64>(),
        extra in proptest::option::of((0usize..9, 0usize..9)),
    ) {
        let mut h = tree(&parents, loops);
        if let Some((a, b)) = extra {
            h = with_extra_edge(&h, a, b);
        }
        prop_assume!(h.girth().map_or(true, |g| g >= 5));
        let v = classify(&h).unwrap();
        prop_assert_ne!(v.class, Class::Unclassified);
        if is_pbrp(&h).unwrap().is_some() {
            prop_assert_ne!(v.class, Class::SatEquivalent);
        }
        if v.class == Class::SatEquivalent && !h.is_irreflexive() {
            prop_assert!(!v.witnesses.is_empty());
            prop_assert!(v.witnesses.iter().all(|w| w.case != CASE_FALLBACK));
            let neighbourhood = [CASE_WR, CASE_NOT_WRENCH, CASE_DISTANCE2];
            let bad_unlooped = (0..h.n()).any(|u| !h.is_looped(u) && h.degree(u) >= 2);
            if bad_unlooped {
                prop_assert!(v.witnesses.iter().any(|w| neighbourhood.contains(&w.case.as_str())));
            } else {
                prop_assert!(v.witnesses.iter().all(|w| neighbourhood.contains(&w.case.as_str()) || w.case == CASE_REFLEXIVE_CYCLE));
            }
        }
    }
}

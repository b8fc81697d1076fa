mod common;

use common::*;
use num_bigint::BigUint;
use proptest::prelude::*;
use retraction_core::blocked::count_blocked;
use retraction_core::count::{
    count_compaction, count_hom, count_list_hom, count_mode, count_naive, count_retraction, count_surjective,
    decompose_and_count, stirling_surjections, CountMode,
};
use retraction_core::{BlockedInstance, Coupling, Graph, ListedInstance};

fn complete(q: usize) -> Graph {
    let mut b = Graph::builder();
    for i in 0..q {
        b.vertex(format!("k{i}"), false);
        for j in 0..i {
            b.edge(format!("k{j}"), format!("k{i}"));
        }
    }
    b.build().unwrap()
}

#[test]
fn chromatic_polynomial_of_cycles() {
    for n in 3..=7usize {
        for q in 2..=4i64 {
            let expected = (q - 1).pow(n as u32) + if n % 2 == 0 { q - 1 } else { 1 - q };
            assert_eq!(count_hom(&cycle(n, false), &complete(q as usize)).unwrap(), BigUint::from(expected as u64));
        }
    }
}

#[test]
fn small_known_counts() {
    let k2 = complete(2);
    assert_eq!(count_hom(&k2, &k2).unwrap(), BigUint::from(2u32));
    assert_eq!(count_hom(&path(5, false), &k2).unwrap(), BigUint::from(2u32));
    // every map into a looped vertex is a homomorphism
    assert_eq!(count_hom(&cycle(5, false), &graph(&[("a", true)], &[])).unwrap(), BigUint::from(1u32));
    assert_eq!(count_hom(&Graph::empty(), &k2).unwrap(), BigUint::from(1u32));
    // surjections of a 4-vertex independent set onto two looped vertices
    let indep = graph(&[("a", false), ("b", false), ("c", false), ("d", false)], &[]);
    let two = graph(&[("x", true), ("y", true)], &[]);
    assert_eq!(count_surjective(&ListedInstance::full(indep, &two).unwrap(), &two).unwrap(), BigUint::from(14u32));
}

#[test]
fn stirling_values() {
    assert_eq!(stirling_surjections(4, 2), BigUint::from(14u32));
    assert_eq!(stirling_surjections(5, 3), BigUint::from(150u32));
    assert_eq!(stirling_surjections(3, 4), BigUint::from(0u32));
    assert_eq!(stirling_surjections(0, 0), BigUint::from(1u32));
}

#[test]
fn surjection_bounds_for_many_points() {
    for b in 1..=10u64 {
        let lo_a = (2.0 * b as f64 * (b as f64).ln()).ceil() as u64;
        for a in lo_a.max(1)..=200 {
            let s = stirling_surjections(a, b);
            let ba = BigUint::from(b).pow(a as u32);
            assert!(s <= ba);
            // b^a (1 - e^{-a/2b}) <= S, compared in logs
            let lhs = a as f64 * (b as f64).ln() + (1.0 - (-(a as f64) / (2.0 * b as f64)).exp()).ln();
            let rhs = retraction_core::gadget::ln_big(&s);
            assert!(lhs <= rhs + 1e-9, "a={a} b={b}");
        }
    }
}

#[test]
fn retraction_mode_needs_retraction_lists() {
    let h = path(3, false);
    let g = path(2, false);
    let lists = [("p0".to_string(), ["p0".to_string(), "p1".to_string()].into())].into();
    let inst = ListedInstance::new(g, &lists, &h).unwrap();
    assert!(count_retraction(&inst, &h).is_err());
}

fn random_blocked(mults: &[u64], couplings: &[(usize, usize, u8)], pin: Option<usize>, h: &Graph) -> BlockedInstance {
    let mut b = BlockedInstance::default();
    b.add_block("w", 1);
    for (i, &m) in mults.iter().enumerate() {
        b.add_block(format!("B{i}"), m);
    }
    let mut used = std::collections::BTreeSet::new();
    for &(x, y, c) in couplings {
        let (x, y) = (x % mults.len(), y % mults.len());
        match c % 3 {
            0 if x != y && used.insert((x.min(y), x.max(y))) => {
                b.couple(format!("B{}", x.min(y)), format!("B{}", x.max(y)), Coupling::CompleteBipartite);
            }
            1 if x != y && mults[x] == mults[y] && used.insert((x.min(y), x.max(y))) => {
                b.couple(format!("B{}", x.min(y)), format!("B{}", x.max(y)), Coupling::PerfectMatching);
            }
            2 if used.insert((usize::MAX, x)) => {
                b.couple("w", format!("B{x}"), Coupling::Apex);
            }
            _ => {}
        }
    }
    if let Some(t) = pin {
        b.pin("w", h.name(t % h.n()).to_string());
    }
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shrinking_a_list_never_increases_counts(
        g in arb_graph("v", 5, false),
        h in arb_graph("h", 4, true),
        masks in proptest::collection::vec(proptest::option::of(0u8..16), 5),
        victim in 0usize..5,
        drop in 0usize..4,
    ) {
        let lists = lists_from_masks(&g, &h, &masks);
        let mut smaller = lists.clone();
        let v = g.name(victim % g.n()).to_string();
        let full: std::collections::BTreeSet<String> = h.names().iter().cloned().collect();
        let mut l = smaller.get(&v).cloned().unwrap_or(full);
        let gone = h.name(drop % h.n()).to_string();
        l.remove(&gone);
        smaller.insert(v, l);
        let a = ListedInstance::new(g.clone(), &lists, &h).unwrap();
        let b = ListedInstance::new(g, &smaller, &h).unwrap();
        for mode in [CountMode::ListHom, CountMode::Surjective, CountMode::Compaction] {
            prop_assert!(count_mode(&b, &h, mode).unwrap() <= count_mode(&a, &h, mode).unwrap());
        }
    }

    #[test]
    fn decomposition_agrees_with_direct_counting(
        g in arb_graph("v", 6, false),
        h in arb_graph("h", 4, true),
        masks in proptest::collection::vec(proptest::option::of(0u8..16), 6),
    ) {
        let lists = lists_from_masks(&g, &h, &masks);
        let inst = ListedInstance::new(g, &lists, &h).unwrap();
        prop_assert_eq!(
            decompose_and_count(&inst, &h, CountMode::ListHom).unwrap(),
            count_naive(&inst, &h, CountMode::ListHom).unwrap()
        );
    }

    #[test]
    fn compactions_are_surjective(g in arb_graph("v", 5, false), h in arb_graph("h", 3, true)) {
        let inst = ListedInstance::full(g, &h).unwrap();
        prop_assert!(count_compaction(&inst, &h).unwrap() <= count_surjective(&inst, &h).unwrap());
        prop_assert!(count_surjective(&inst, &h).unwrap() <= count_list_hom(&inst, &h).unwrap());
    }

    #[test]
    fn blocked_count_matches_expansion(
        mults in proptest::collection::vec(1u64..=3, 2..=4),
        couplings in proptest::collection::vec((0usize..4, 0usize..4, any::<u8>()), 0..5),
        pin in proptest::option::of(0usize..4),
        h in arb_graph("h", 3, true),
    ) {
        let b = random_blocked(&mults, &couplings, pin, &h);
        prop_assume!(b.validate().is_ok());
        let inst = b.expand(&h, 10_000).unwrap();
        prop_assert_eq!(count_blocked(&b, &h).unwrap(), count_naive(&inst, &h, CountMode::ListHom).unwrap());
    }
}

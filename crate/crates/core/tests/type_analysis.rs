use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;
use retraction_core::blocked::count_blocked;
use retraction_core::count::stirling_surjections;
use retraction_core::gadget::{build_j, hk};
use retraction_core::hom_type::{
    brute_count_by_type, dominance_report, edge_pairs, enumerate_maximal_types, is_maximal_type, is_nonempty_type,
    sandwich_check, sandwich_scan, n_exact, nhat, table_row, HomType, TypePart,
};

fn names(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Common neighbours of a set.
fn gamma(h: &retraction_core::Graph, set: &BTreeSet<String>) -> BTreeSet<String> {
    let idx: BTreeSet<usize> = set.iter().map(|x| h.index_of(x).unwrap()).collect();
    h.names_of(&h.common_neighbors(&idx).unwrap())
}

/// All neighbours of a set.
fn phi(h: &retraction_core::Graph, set: &BTreeSet<String>) -> BTreeSet<String> {
    let idx: BTreeSet<usize> = set.iter().map(|x| h.index_of(x).unwrap()).collect();
    h.names_of(&h.neighbor_union(&idx))
}

#[test]
fn t4_values() {
    let t4 = table_row(4, 1).unwrap();
    assert_eq!(nhat(&t4, 1, 1, 1), BigUint::from(20u32));
    assert_eq!(n_exact(&t4, 1, 1, 1), BigUint::from(0u32));
    assert!(is_nonempty_type(&t4, 1).unwrap());
    assert!(is_maximal_type(&table_row(1, 1).unwrap(), 1).unwrap());
}

#[test]
fn non_maximal_and_empty_types() {
    let h = hk(1).unwrap();
    let t4 = table_row(4, 1).unwrap();
    let mut shrunk = t4.clone();
    shrunk.t2.remove(&("b".to_string(), "b".to_string()));
    assert!(!is_maximal_type(&shrunk, 1).unwrap());
    let mut hollow = t4.clone();
    hollow.t2.clear();
    assert!(!is_nonempty_type(&hollow, 1).unwrap());
    // the constant-b homomorphism's type can be augmented
    let b = names(&["b"]);
    let constant = HomType::from_projections(&h, [&b, &b, &b, &b, &b, &b]);
    assert!(is_nonempty_type(&constant, 1).unwrap());
    assert!(!is_maximal_type(&constant, 1).unwrap());
    // g in B together with r1 in C breaks B×C ⊆ E
    let odd = HomType::new(
        edge_pairs(&h, &names(&["b"]), &names(&["g"])),
        edge_pairs(&h, &names(&["r1"]), &names(&["b"])),
        t4.t3.clone(),
    );
    assert!(!is_nonempty_type(&odd, 1).unwrap());
}

#[test]
fn maximal_types_are_fixed_points() {
    for k in 1..=3 {
        let h = hk(k).unwrap();
        let gb = gamma(&h, &names(&["b"]));
        let gg = gamma(&h, &names(&["g"]));
        for t in enumerate_maximal_types(k).unwrap() {
            assert!(is_nonempty_type(&t, k).unwrap());
            assert!(is_maximal_type(&t, k).unwrap());
            for (c, bset, aset) in [
                (TypePart::C, TypePart::B, TypePart::A),
                (TypePart::CPrime, TypePart::BPrime, TypePart::APrime),
            ] {
                let c = t.projection(c);
                let back: BTreeSet<String> = &gamma(&h, &(&gamma(&h, &c) & &gb)) & &gb;
                assert_eq!(back, c);
                assert_eq!(t.projection(bset), &gamma(&h, &c) & &gb);
                assert_eq!(t.projection(aset), &phi(&h, &t.projection(bset)) & &gg);
            }
        }
    }
}

#[test]
fn brute_force_buckets() {
    for (p, q, t) in [(1, 1, 1), (2, 2, 1)] {
        let brute = brute_count_by_type(p, q, t, 1).unwrap();
        let total: BigUint = brute.values().sum();
        assert_eq!(total, count_blocked(&build_j(p, q, t).unwrap(), &hk(1).unwrap()).unwrap());
        for (ty, c) in &brute {
            assert!(is_nonempty_type(ty, 1).unwrap());
            assert_eq!(*c, n_exact(ty, p, q, t));
            if let Some(m) = brute.get(&ty.mirror()) {
                assert_eq!(m, c);
            }
        }
        let maximal: BTreeSet<HomType> =
            enumerate_maximal_types(1).unwrap().iter().flat_map(|t| [t.clone(), t.mirror()]).collect();
        for ty in brute.keys().filter(|t| is_maximal_type(t, 1).unwrap()) {
            assert!(maximal.contains(ty));
        }
    }
}

#[test]
fn dominance_at_chosen_parameters() {
    let rep = dominance_report(1, 44, 52, &[1, 2, 3]).unwrap();
    assert!(rep.gamma_below_one);
    assert_eq!(rep.rows.len(), 9);
    // row 1: (4+k)^{pt} (1/4)^{qt} against T4
    let r1 = &rep.rows[0];
    assert_eq!(r1.row, 1);
    let expected = BigRational::new(BigUint::from(5u32).pow(44).into(), BigUint::from(4u32).pow(52).into());
    assert_eq!(r1.per_step, expected.to_string());
    // the ratio at t is the t-th power of the per-step ratio
    for row in &rep.rows {
        let step: BigRational = row.per_step.parse().unwrap();
        for (i, t) in rep.ts.iter().enumerate() {
            let at_t: BigRational = row.ratios[i].parse().unwrap();
            assert_eq!(at_t, num_traits::pow(step.clone(), *t as usize));
        }
    }
}

#[test]
fn sandwich_scan_is_monotone() {
    let scan = sandwich_scan(1, 44, 52, 5).unwrap();
    assert!(scan.monotone);
    let t0 = scan.t0.unwrap();
    for t in t0..=5 {
        assert!(sandwich_check(1, 44, 52, t).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_count_below_all_functions(row in 1usize..=10, k in 1usize..=2, p in 1u64..5, q in 1u64..5, t in 1u64..4) {
        let ty = table_row(row, k).unwrap();
        prop_assert!(n_exact(&ty, p, q, t) <= nhat(&ty, p, q, t));
        prop_assert_eq!(n_exact(&ty, p, q, t), n_exact(&ty.mirror(), p, q, t));
        let [a, b, c] = ty.sizes();
        let direct = stirling_surjections(p * t, a as u64)
            * stirling_surjections(q * t, b as u64)
            * stirling_surjections(p * t, c as u64);
        prop_assert_eq!(n_exact(&ty, p, q, t), direct);
    }
}

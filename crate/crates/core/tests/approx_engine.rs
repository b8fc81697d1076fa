mod common;

use common::*;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;
use retraction_core::approx::{
    accuracy_bounds_hold, coverage_mc, enumerate_t, lhom_padding, powered_count_instance, powering_calls,
    sample_hom_instance, within_factor, CountingOracle, CoverMode, CoveragePlan, Sampler,
};
use retraction_core::count::{count_compaction, count_list_hom, count_surjective, Problem, Target};
use retraction_core::gadget::twrench;
use retraction_core::{Graph, ListedInstance};

fn k2() -> Graph {
    path(2, false)
}

fn truth(inst: &ListedInstance, h: &Graph, mode: CoverMode) -> BigUint {
    match mode {
        CoverMode::Surjective => count_surjective(inst, h).unwrap(),
        CoverMode::Compaction => count_compaction(inst, h).unwrap(),
    }
}

fn exact_expectation(inst: &ListedInstance, h: &Graph, mode: CoverMode) -> BigRational {
    let mut oracle = CountingOracle::exact();
    let plan =
        CoveragePlan::prepare(Problem::new(inst, h).unwrap(), Target::new(h).unwrap(), mode, 0.3, 0.2, &mut oracle)
            .unwrap();
    plan.expected_y(&plan.exact_table().unwrap())
}

#[test]
fn tolerance_conversions_on_a_grid() {
    for i in 1..100 {
        assert!(accuracy_bounds_hold(i as f64 / 100.0));
    }
}

#[test]
fn powering_call_counts() {
    assert_eq!(powering_calls(0.5), 1);
    let n = powering_calls(0.01);
    assert_eq!(n % 2, 1);
    assert!(n as f64 >= 72.0 * 100f64.ln());
}

#[test]
fn noisy_oracle_stays_in_window() {
    let g = path(5, false);
    let h = twrench();
    let inst = ListedInstance::full(g, &h).unwrap();
    let exact = count_list_hom(&inst, &h).unwrap();
    let mut o = CountingOracle::noisy(0.1, 0.0, 9).unwrap();
    for _ in 0..50 {
        let v = o.count_instance(&inst, &h, 0.1).unwrap();
        assert!(within_factor(&BigRational::from_integer(BigInt::from(v)), &exact, 0.1));
    }
    assert_eq!(o.calls(), 50);
    assert!(CountingOracle::parse("noisy:2,0.1", 0).is_err());
    assert!(CountingOracle::parse("psychic", 0).is_err());
    let mut o = CountingOracle::noisy(0.05, 0.2, 4).unwrap();
    let med = powered_count_instance(&mut o, &inst, &h, 0.05, 0.01).unwrap();
    assert!(within_factor(&BigRational::from_integer(BigInt::from(med)), &exact, 0.05));
}

#[test]
fn sampler_returns_valid_list_homomorphisms() {
    let h = twrench();
    let g = path(4, false);
    let lists = [("p0".to_string(), ["c1".to_string()].into())].into();
    let inst = ListedInstance::new(g.clone(), &lists, &h).unwrap();
    let mut o = CountingOracle::exact();
    for seed in 0..20 {
        let s = sample_hom_instance(&mut o, &inst, &h, 0.1, seed).unwrap();
        assert_eq!(s["p0"], "c1");
        for (a, b) in g.non_loop_edges() {
            let (x, y) = (h.index_of(&s[g.name(a)]).unwrap(), h.index_of(&s[g.name(b)]).unwrap());
            assert!(h.adjacent(x, y));
        }
    }
    let dead = [("p0".to_string(), std::collections::BTreeSet::new())].into();
    let none = ListedInstance::new(g, &dead, &h).unwrap();
    assert!(sample_hom_instance(&mut o, &none, &h, 0.1, 0).is_err());
}

#[test]
fn cover_index_for_a_single_edge() {
    let h = k2();
    let inst = ListedInstance::full(k2(), &h).unwrap();
    assert_eq!(enumerate_t(&inst, &h, CoverMode::Surjective).unwrap().len(), 2);
    assert_eq!(exact_expectation(&inst, &h, CoverMode::Compaction), BigRational::from_integer(2.into()));
}

#[test]
fn runs_repeat_under_a_seed() {
    let h = twrench();
    let g = cycle(6, false);
    let inst = ListedInstance::full(g, &h).unwrap();
    for sampler in [Sampler::Aggregate, Sampler::Auto] {
        let a = coverage_mc(&inst, &h, CoverMode::Surjective, 0.3, 0.2, &mut CountingOracle::exact(), 11, sampler)
            .unwrap()
            .1;
        let b = coverage_mc(&inst, &h, CoverMode::Surjective, 0.3, 0.2, &mut CountingOracle::exact(), 11, sampler)
            .unwrap()
            .1;
        assert_eq!(a.y, b.y);
        assert!(within_factor(&a.y, &truth(&inst, &h, CoverMode::Surjective), 0.3));
    }
}

#[test]
fn jvv_sampler_on_a_small_instance() {
    let h = k2();
    let g = path(3, false);
    let inst = ListedInstance::full(g, &h).unwrap();
    let (_, run) =
        coverage_mc(&inst, &h, CoverMode::Compaction, 0.5, 0.3, &mut CountingOracle::exact(), 2, Sampler::Jvv).unwrap();
    assert_eq!(run.sampler, Sampler::Jvv);
    assert!(within_factor(&run.y, &truth(&inst, &h, CoverMode::Compaction), 0.5));
}

#[test]
fn padding_with_existing_prefix() {
    let h = k2();
    let g = graph(&[("@h:p0", false)], &[]);
    let inst = ListedInstance::full(g, &h).unwrap();
    let padded = lhom_padding(&inst, &h).unwrap();
    assert_eq!(padded.pattern.n(), 3);
    assert_eq!(count_surjective(&padded, &h).unwrap(), count_list_hom(&inst, &h).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expectation_is_exact_with_lists(
        g in arb_graph("v", 5, false),
        h in prop_oneof![Just(k2()), Just(twrench()), Just(path(3, false)), Just(path(3, true))],
        masks in proptest::collection::vec(proptest::option::of(0u8..16), 5),
        comp in any::<bool>(),
    ) {
        let mode = if comp { CoverMode::Compaction } else { CoverMode::Surjective };
        let lists = lists_from_masks(&g, &h, &masks);
        let inst = ListedInstance::new(g, &lists, &h).unwrap();
        let t = truth(&inst, &h, mode);
        prop_assert_eq!(exact_expectation(&inst, &h, mode), BigRational::from_integer(BigInt::from(t)));
    }
}

//! Named verification targets: each runs a family of exact identities or
//! seeded statistical checks and reports pass/fail with a counterexample.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{
    enumerate_t, lhom_padding, sample_hom, within_factor, CountingOracle, CoverMode, CoveragePlan, Sampler,
};
use crate::blocked::count_blocked;
use crate::classify::{classify, Class, CASE_J3, CASE_ODD_CYCLE, CASE_REFLEXIVE_CYCLE, CASE_WR};
use crate::count::{
    count_backtrack, count_compaction, count_compaction_ie, count_hom, count_list_hom, count_mode, count_naive,
    count_retraction, count_surjective, count_surjective_ie, for_each_hom, CountMode, Problem, Target,
};
use crate::csp::{
    build_digraph_from_csp, build_graph_from_csp, check_pbrp_structure, count_csp, count_directed,
    translate_ret_to_csp, translate_ret_to_csp_directed, CspInstance, DirectedInstance,
};
use crate::error::{Error, Result};
use crate::gadget::{
    analyze_cuts, build_cut_instance, build_largecut_instance, choose_pq, count_large_cuts_bruteforce,
    count_multiterminal_cuts_bruteforce, dirichlet_approx, dirichlet_bound, estimate_multiterminal_cuts,
    exact_blocked_oracle, full_hom_count_by_cutsize, j3, min_multiterminal_cut, pbrp_graph, pin_neighborhood_instance,
    twrench, LargeCutOverrides,
};
use crate::graph::{DiGraph, Graph, GraphBuilder, ListedInstance};
use crate::hom_type::{
    brute_count_by_type, dominance_report, enumerate_maximal_types, sandwich_scan, n_exact, table_row, ys, HomType,
};
use crate::hom_type::edge_pairs;
use crate::io::{serialize_graph, serialize_instance};
use crate::rng::stream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Oracles,
    Csp,
    Types,
    Gadgets,
    Approx,
    Classify,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "oracles" => Some(Suite::Oracles),
            "csp" => Some(Suite::Csp),
            "types" => Some(Suite::Types),
            "gadgets" => Some(Suite::Gadgets),
            "approx" => Some(Suite::Approx),
            "classify" => Some(Suite::Classify),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into(), counterexample: None }
    }

    fn failed_with(name: impl Into<String>, detail: impl Into<String>, cx: String) -> Check {
        Check { name: name.into(), passed: false, detail: detail.into(), counterexample: Some(cx) }
    }

    fn from_error(name: impl Into<String>, e: &Error) -> Check {
        Check::new(name, false, format!("error: {e}"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub suite: Suite,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

/// (id, target name, suite).
pub const CRITERIA: [(usize, &str, Suite); 15] = [
    (1, "oracle-equivalence", Suite::Oracles),
    (2, "decomposition", Suite::Oracles),
    (3, "csp-parsimony", Suite::Csp),
    (4, "pbrp-structure", Suite::Csp),
    (5, "table1", Suite::Types),
    (6, "type-counts", Suite::Types),
    (7, "sandwich-dominance", Suite::Types),
    (8, "coverage-accuracy", Suite::Approx),
    (9, "coverage-expectation", Suite::Approx),
    (10, "cut-estimator", Suite::Gadgets),
    (11, "largecut-identity", Suite::Gadgets),
    (12, "dirichlet", Suite::Gadgets),
    (13, "classifier-table", Suite::Classify),
    (14, "sampler-uniformity", Suite::Approx),
    (15, "padding-pinning", Suite::Approx),
];

/// Resolves a suite name, a criterion name, or `all` to criterion ids.
pub fn resolve_target(name: &str) -> Option<Vec<usize>> {
    if name == "all" {
        return Some(CRITERIA.iter().map(|c| c.0).collect());
    }
    if let Some(s) = Suite::parse(name) {
        return Some(CRITERIA.iter().filter(|c| c.2 == s).map(|c| c.0).collect());
    }
    let by_name = CRITERIA.iter().find(|c| c.1 == name).map(|c| vec![c.0]);
    by_name.or_else(|| name.parse::<usize>().ok().filter(|i| (1..=15).contains(i)).map(|i| vec![i]))
}

pub const DEFAULT_SEED: u64 = 20240601;

pub fn run_criterion(id: usize, quick: bool, seed: u64) -> CriterionReport {
    let (_, name, suite) = CRITERIA[id - 1];
    let start = Instant::now();
    let checks = match id {
        1 => oracle_equivalence(seed, if quick { 40 } else { 200 }),
        2 => decomposition(seed, if quick { 20 } else { 100 }),
        3 => csp_parsimony(seed, if quick { 20 } else { 100 }),
        4 => pbrp_structure(),
        5 => table1(),
        6 => type_counts(quick),
        7 => sandwich_dominance(),
        8 => coverage_accuracy(seed, quick),
        9 => coverage_expectation(seed, quick),
        10 => cut_estimator(),
        11 => largecut_identity(),
        12 => dirichlet(seed, if quick { 100 } else { 500 }),
        13 => classifier_table(),
        14 => sampler_uniformity(seed, if quick { 2000 } else { 10_000 }),
        15 => padding_pinning(seed, if quick { 10 } else { 50 }),
        _ => vec![Check::new("unknown", false, "no such criterion")],
    };
    let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    CriterionReport { id, name, suite, passed, seconds: start.elapsed().as_secs_f64(), checks }
}

// ---------------------------------------------------------------------------
// random instances

/// Irreflexive graph on `v0..v{n-1}`.
pub fn random_pattern(rng: &mut ChaCha8Rng, n: usize, p_edge: f64) -> Graph {
    random_graph(rng, "v", n, p_edge, 0.0)
}

pub fn random_graph(rng: &mut ChaCha8Rng, prefix: &str, n: usize, p_edge: f64, p_loop: f64) -> Graph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.vertex(format!("{prefix}{i}"), rng.random_bool(p_loop));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p_edge) {
                b.edge(format!("{prefix}{i}"), format!("{prefix}{j}"));
            }
        }
    }
    b.build().expect("fresh names")
}

/// Each vertex gets a random list with probability `p_list` (possibly empty).
pub fn random_lists(rng: &mut ChaCha8Rng, g: &Graph, h: &Graph, p_list: f64) -> BTreeMap<String, BTreeSet<String>> {
    let mut out = BTreeMap::new();
    for v in g.names() {
        if rng.random_bool(p_list) {
            let l: BTreeSet<String> = h.names().iter().filter(|_| rng.random_bool(0.6)).cloned().collect();
            out.insert(v.clone(), l);
        }
    }
    out
}

/// Retraction-shaped lists: a few vertices pinned to single targets.
pub fn random_pins(rng: &mut ChaCha8Rng, g: &Graph, h: &Graph, p_pin: f64) -> BTreeMap<String, BTreeSet<String>> {
    let mut out = BTreeMap::new();
    if h.n() == 0 {
        return out;
    }
    for v in g.names() {
        if rng.random_bool(p_pin) {
            let t = h.name(rng.random_range(0..h.n())).to_string();
            out.insert(v.clone(), BTreeSet::from([t]));
        }
    }
    out
}

fn describe(inst: &ListedInstance, h: &Graph) -> String {
    format!("pattern:\n{}target:\n{}", serialize_instance(inst, None), serialize_graph(h))
}

// ---------------------------------------------------------------------------
// oracles

fn oracle_equivalence(seed: u64, cases: u64) -> Vec<Check> {
    let mut failures = Vec::new();
    let mut compared = 0usize;
    for case in 0..cases {
        let mut rng = stream(seed, case, 1);
        let ng = rng.random_range(1..=6);
        let nh = rng.random_range(1..=4);
        let g = random_pattern(&mut rng, ng, 0.5);
        let h = random_graph(&mut rng, "h", nh, 0.5, 0.4);
        let lists = random_lists(&mut rng, &g, &h, 0.5);
        let pins = random_pins(&mut rng, &g, &h, 0.3);
        let run = || -> Result<Vec<(String, BigUint, BigUint)>> {
            let inst = ListedInstance::new(g.clone(), &lists, &h)?;
            let ret = ListedInstance::new(g.clone(), &pins, &h)?;
            let full = ListedInstance::full(g.clone(), &h)?;
            Ok(vec![
                ("hom".into(), count_hom(&g, &h)?, count_naive(&full, &h, CountMode::Hom)?),
                ("lhom".into(), count_list_hom(&inst, &h)?, count_naive(&inst, &h, CountMode::ListHom)?),
                ("lhom-raw".into(), count_backtrack(&inst, &h)?, count_naive(&inst, &h, CountMode::ListHom)?),
                ("ret".into(), count_retraction(&ret, &h)?, count_naive(&ret, &h, CountMode::Retraction)?),
                ("sur".into(), count_surjective(&inst, &h)?, count_naive(&inst, &h, CountMode::Surjective)?),
                ("comp".into(), count_compaction(&inst, &h)?, count_naive(&inst, &h, CountMode::Compaction)?),
                ("sur-ie".into(), count_surjective_ie(&inst, &h)?, count_surjective(&inst, &h)?),
                ("comp-ie".into(), count_compaction_ie(&inst, &h)?, count_compaction(&inst, &h)?),
            ])
        };
        match run() {
            Ok(rows) => {
                for (mode, a, b) in rows {
                    compared += 1;
                    if a != b && failures.len() < 3 {
                        let inst = ListedInstance::new(g.clone(), &lists, &h).expect("valid");
                        failures.push(Check::failed_with(
                            format!("oracle-{mode}"),
                            format!("case {case}: {a} vs {b}"),
                            describe(&inst, &h),
                        ));
                    }
                }
            }
            Err(e) => failures.push(Check::from_error(format!("oracle-case-{case}"), &e)),
        }
    }
    if failures.is_empty() {
        vec![Check::new("oracle-equivalence", true, format!("{cases} instances, {compared} equalities"))]
    } else {
        failures
    }
}

fn graph_union(parts: &[Graph]) -> Graph {
    let mut b = GraphBuilder::new();
    for g in parts {
        for i in 0..g.n() {
            b.vertex(g.name(i), g.is_looped(i));
        }
        for (i, j) in g.non_loop_edges() {
            b.edge(g.name(i), g.name(j));
        }
    }
    b.build().expect("disjoint names")
}

fn decomposition(seed: u64, cases: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for case in 0..cases {
        let mut rng = stream(seed, case, 2);
        let kg = rng.random_range(2..=3);
        let parts: Vec<Graph> = (0..kg)
            .map(|c| {
                let n = rng.random_range(1..=3);
                // connected pieces: a random spanning path plus extra edges
                let mut b = GraphBuilder::new();
                for i in 0..n {
                    b.vertex(format!("g{c}_{i}"), false);
                    if i > 0 {
                        b.edge(format!("g{c}_{}", i - 1), format!("g{c}_{i}"));
                    }
                }
                if n == 3 && rng.random_bool(0.5) {
                    b.edge(format!("g{c}_0"), format!("g{c}_2"));
                }
                b.build().expect("fresh")
            })
            .collect();
        let hparts: Vec<Graph> =
            (0..2)
                .map(|c| {
                    let n = rng.random_range(1..=3);
                    random_graph(&mut rng, &format!("h{c}_"), n, 0.6, 0.4)
                })
                .collect();
        let g = graph_union(&parts);
        let h = graph_union(&hparts);
        let lists = random_lists(&mut rng, &g, &h, 0.4);
        let check = || -> Result<Option<String>> {
            let inst = ListedInstance::new(g.clone(), &lists, &h)?;
            let whole = count_list_hom(&inst, &h)?;
            let naive = count_naive(&inst, &h, CountMode::ListHom)?;
            if whole != naive {
                return Ok(Some(format!("decomposed {whole} vs naive {naive}")));
            }
            let mut product = BigUint::one();
            for part in &parts {
                let sub_lists: BTreeMap<_, _> =
                    lists.iter().filter(|(v, _)| part.index_of(v).is_some()).map(|(a, b)| (a.clone(), b.clone())).collect();
                let sub = ListedInstance::new(part.clone(), &sub_lists, &h)?;
                let direct = count_naive(&sub, &h, CountMode::ListHom)?;
                let mut sum = BigUint::zero();
                for hp in &hparts {
                    let restricted: BTreeMap<String, BTreeSet<String>> = part
                        .names()
                        .iter()
                        .map(|v| {
                            let base: BTreeSet<String> = match sub_lists.get(v) {
                                Some(l) => l.clone(),
                                None => h.names().iter().cloned().collect(),
                            };
                            let kept = base.into_iter().filter(|x| hp.index_of(x).is_some()).collect();
                            (v.clone(), kept)
                        })
                        .collect();
                    sum += count_naive(&ListedInstance::new(part.clone(), &restricted, hp)?, hp, CountMode::ListHom)?;
                }
                if sum != direct {
                    return Ok(Some(format!("component sum {sum} vs {direct}")));
                }
                product *= direct;
            }
            if product != whole {
                return Ok(Some(format!("component product {product} vs {whole}")));
            }
            Ok(None)
        };
        match check() {
            Ok(None) => {}
            Ok(Some(msg)) => {
                let inst = ListedInstance::new(g.clone(), &lists, &h).expect("valid");
                out.push(Check::failed_with("decomposition", format!("case {case}: {msg}"), describe(&inst, &h)));
            }
            Err(e) => out.push(Check::from_error(format!("decomposition-case-{case}"), &e)),
        }
        if out.len() >= 3 {
            break;
        }
    }
    if out.is_empty() {
        out.push(Check::new("decomposition", true, format!("{cases} multi-component instances")));
    }
    out
}

// ---------------------------------------------------------------------------
// csp

fn random_imps(rng: &mut ChaCha8Rng, vars: &[String], p: f64) -> Result<CspInstance> {
    let mut imps = Vec::new();
    for a in vars {
        for b in vars {
            if a != b && rng.random_bool(p) {
                imps.push((a.clone(), b.clone()));
            }
        }
    }
    CspInstance::new(vars.to_vec(), imps, vec![])
}

fn csp_parsimony(seed: u64, cases: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for case in 0..cases {
        let mut rng = stream(seed, case, 3);
        let nx = rng.random_range(1..=3);
        let vars: Vec<String> = (0..nx).map(|i| format!("x{i}")).collect();
        let res = (|| -> Result<Option<String>> {
            let iv = random_imps(&mut rng, &vars, 0.3)?;
            let ie = random_imps(&mut rng, &vars, 0.3)?;
            let h = build_graph_from_csp(&iv, &ie)?;
            let ng = rng.random_range(1..=5);
            let g = random_pattern(&mut rng, ng, 0.5);
            let pins = random_pins(&mut rng, &g, &h, 0.3);
            let inst = ListedInstance::new(g, &pins, &h)?;
            let a = count_csp(&translate_ret_to_csp(&inst, &iv, &ie)?)?;
            let b = count_retraction(&inst, &h)?;
            if a != b {
                return Ok(Some(format!("undirected: csp {a} vs ret {b}\n{}", describe(&inst, &h))));
            }
            let fwd = random_imps(&mut rng, &vars, 0.3)?;
            let bwd = random_imps(&mut rng, &vars, 0.3)?;
            let d = build_digraph_from_csp(&iv, &fwd, &bwd)?;
            let nd = rng.random_range(1..=4);
            let names: Vec<String> = (0..nd).map(|i| format!("v{i}")).collect();
            let mut arcs = Vec::new();
            for a in &names {
                for b in &names {
                    if a != b && rng.random_bool(0.35) {
                        arcs.push((a.clone(), b.clone()));
                    }
                }
            }
            let pattern = DiGraph::new(&names, &arcs)?;
            let mut lists = BTreeMap::new();
            for v in &names {
                if rng.random_bool(0.3) && d.n() > 0 {
                    lists.insert(v.clone(), BTreeSet::from([d.names()[rng.random_range(0..d.n())].clone()]));
                }
            }
            let dinst = DirectedInstance { pattern, lists };
            let a = count_csp(&translate_ret_to_csp_directed(&dinst, &iv, &fwd, &bwd)?)?;
            let b = count_directed(&dinst, &d)?;
            if a != b {
                return Ok(Some(format!("directed: csp {a} vs ret {b}")));
            }
            Ok(None)
        })();
        match res {
            Ok(None) => {}
            Ok(Some(msg)) => out.push(Check::failed_with("csp-parsimony", format!("case {case}"), msg)),
            Err(e) => out.push(Check::from_error(format!("csp-parsimony-case-{case}"), &e)),
        }
        if out.len() >= 3 {
            break;
        }
    }
    if out.is_empty() {
        out.push(Check::new("csp-parsimony", true, format!("{cases} undirected and directed instances")));
    }
    out
}

fn pbrp_structure() -> Vec<Check> {
    let mut n = 0;
    let mut bad = Vec::new();
    for q in 1..=4usize {
        for mask in 0u32..(1 << q) {
            let s: BTreeSet<usize> = (1..=q).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            n += 1;
            match check_pbrp_structure(q, &s) {
                Ok(true) => {}
                Ok(false) => bad.push(format!("Q={q} S={s:?}")),
                Err(e) => bad.push(format!("Q={q} S={s:?}: {e}")),
            }
        }
    }
    if bad.is_empty() {
        vec![Check::new("pbrp-structure", n == 30, format!("{n} (Q,S) cases"))]
    } else {
        vec![Check::failed_with("pbrp-structure", format!("{} of {n} failed", bad.len()), bad.join("; "))]
    }
}

// ---------------------------------------------------------------------------
// types

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// The ten maximal types for H_k as projections (A, B, C, C', B', A') and
/// the bases of N̂ on the three layers.
pub fn expected_maximal_types(k: usize) -> Vec<([BTreeSet<String>; 6], [usize; 3])> {
    let by: BTreeSet<String> = set(&["b"]).union(&ys(k)).cloned().collect();
    let all = set(&["r1", "r2", "b", "g"]);
    let b = set(&["b"]);
    let r1b = set(&["r1", "b"]);
    let r2b = set(&["r2", "b"]);
    vec![
        ([by.clone(), all.clone(), b.clone(), b.clone(), all.clone(), by.clone()], [4 + k, 1, 4 + k]),
        ([by.clone(), all.clone(), b.clone(), r1b.clone(), r1b.clone(), b.clone()], [4 + k, 2, 2]),
        ([by.clone(), all.clone(), b.clone(), r2b.clone(), r2b.clone(), b.clone()], [4 + k, 2, 2]),
        ([by.clone(), all.clone(), b.clone(), all.clone(), b.clone(), b.clone()], [4 + k, 4, 1]),
        ([b.clone(), r1b.clone(), r1b.clone(), r2b.clone(), r2b.clone(), b.clone()], [2, 3, 2]),
        ([b.clone(), r1b.clone(), r1b.clone(), r1b.clone(), r1b.clone(), b.clone()], [2, 4, 2]),
        ([b.clone(), r2b.clone(), r2b.clone(), r2b.clone(), r2b.clone(), b.clone()], [2, 4, 2]),
        ([b.clone(), r1b.clone(), r1b.clone(), all.clone(), b.clone(), b.clone()], [2, 6, 1]),
        ([b.clone(), r2b.clone(), r2b.clone(), all.clone(), b.clone(), b.clone()], [2, 6, 1]),
        ([b.clone(), b.clone(), all.clone(), all.clone(), b.clone(), b.clone()], [1, 9, 1]),
    ]
}

fn table1() -> Vec<Check> {
    let mut out = Vec::new();
    for k in 1..=3usize {
        let name = format!("table1-k{k}");
        let res = (|| -> Result<(bool, String)> {
            let h = crate::gadget::hk(k)?;
            let got = enumerate_maximal_types(k)?;
            let expected = expected_maximal_types(k);
            let mut got_c: Vec<HomType> = got.iter().map(HomType::canonical).collect();
            let mut exp_c: Vec<HomType> = expected
                .iter()
                .map(|(p, _)| {
                    HomType::new(edge_pairs(&h, &p[0], &p[1]), edge_pairs(&h, &p[2], &p[3]), edge_pairs(&h, &p[4], &p[5]))
                        .canonical()
                })
                .collect();
            got_c.sort();
            exp_c.sort();
            if got_c != exp_c {
                return Ok((false, format!("{} types found, sets differ from the reference", got.len())));
            }
            for (i, (proj, sizes)) in expected.iter().enumerate() {
                let row = table_row(i + 1, k)?;
                let exp_type = HomType::from_projections(&h, [&proj[0], &proj[1], &proj[2], &proj[3], &proj[4], &proj[5]]);
                if row.canonical() != exp_type.canonical() {
                    return Ok((false, format!("row {} differs", i + 1)));
                }
                if row.sizes() != *sizes && row.mirror().sizes() != *sizes {
                    return Ok((false, format!("row {} N̂ bases {:?} vs {:?}", i + 1, row.sizes(), sizes)));
                }
            }
            Ok((true, format!("{} maximal types match the reference rows", got.len())))
        })();
        out.push(match res {
            Ok((p, d)) => Check::new(name, p, d),
            Err(e) => Check::from_error(name, &e),
        });
    }
    out
}

fn type_counts(quick: bool) -> Vec<Check> {
    let grid: &[(u64, u64, u64)] = if quick { &[(1, 1, 1), (1, 2, 1)] } else { &[(1, 1, 1), (2, 2, 1), (1, 2, 1), (2, 1, 1)] };
    let mut out = Vec::new();
    for &(p, q, t) in grid {
        let name = format!("type-counts-p{p}q{q}t{t}");
        let res = (|| -> Result<(bool, String)> {
            let brute = brute_count_by_type(p, q, t, 1)?;
            for (ty, c) in &brute {
                let f = n_exact(ty, p, q, t);
                if *c != f {
                    return Ok((false, format!("type with sizes {:?}: brute {c} vs formula {f}", ty.sizes())));
                }
            }
            let mut zeros = 0;
            for ty in enumerate_maximal_types(1)? {
                for tt in [ty.clone(), ty.mirror()] {
                    if !brute.contains_key(&tt) {
                        let f = n_exact(&tt, p, q, t);
                        if !f.is_zero() {
                            return Ok((false, format!("unrealised maximal type has formula {f}")));
                        }
                        zeros += 1;
                    }
                }
            }
            let total: BigUint = brute.values().sum();
            let direct = count_blocked(&crate::gadget::build_j(p, q, t)?, &crate::gadget::hk(1)?)?;
            if total != direct {
                return Ok((false, format!("type buckets sum to {total}, hom count {direct}")));
            }
            Ok((true, format!("{} realised types, {zeros} zero cases, {total} homomorphisms", brute.len())))
        })();
        out.push(match res {
            Ok((ok, d)) => Check::new(name, ok, d),
            Err(e) => Check::from_error(name, &e),
        });
    }
    out
}

fn sandwich_dominance() -> Vec<Check> {
    let (p, q) = choose_pq(1);
    let mut out = Vec::new();
    match sandwich_scan(1, p, q, 6) {
        Ok(scan) => out.push(Check::new(
            "sandwich",
            scan.t0.is_some(),
            format!("(p,q)=({p},{q}); least t0 = {:?}; holds through scan: {}", scan.t0, scan.monotone),
        )),
        Err(e) => out.push(Check::from_error("sandwich", &e)),
    }
    match dominance_report(1, p, q, &[1, 2, 3]) {
        Ok(rep) => {
            let all_below = rep.rows.len() == 9 && rep.rows.iter().all(|r| r.per_step_f64 < 1.0);
            out.push(Check::new(
                "dominance",
                rep.gamma_below_one && all_below,
                format!("γ = {:.6} over {} non-T4 rows", rep.gamma, rep.rows.len()),
            ))
        }
        Err(e) => out.push(Check::from_error("dominance", &e)),
    }
    out
}

// ---------------------------------------------------------------------------
// approx

fn k2_target() -> Graph {
    Graph::from_parts(&[("0", false), ("1", false)], &[("0", "1")]).expect("fixed")
}

fn p3_target() -> Graph {
    Graph::from_parts(&[("0", false), ("1", false), ("2", false)], &[("0", "1"), ("1", "2")]).expect("fixed")
}

pub fn coverage_fixtures() -> Vec<(&'static str, Graph)> {
    vec![("K2", k2_target()), ("2-Wrench", twrench()), ("P3", p3_target())]
}

fn coverage_graphs(seed: u64, count: u64) -> Vec<Graph> {
    (0..count)
        .map(|i| {
            let mut rng = stream(seed, i, 8);
            let n = rng.random_range(5..=7);
            random_pattern(&mut rng, n, 0.5)
        })
        .collect()
}

fn coverage_accuracy(seed: u64, quick: bool) -> Vec<Check> {
    let (graphs, runs, need) = if quick { (3, 20, 17) } else { (20, 100, 85) };
    let (eps, delta) = (0.2, 0.1);
    let mut out = Vec::new();
    for (hname, h) in coverage_fixtures() {
        for mode in [CoverMode::Surjective, CoverMode::Compaction] {
            let name = format!("coverage-{}-{hname}", mode.as_str());
            let res = (|| -> Result<(bool, String)> {
                let mut worst = runs;
                let mut total_t = 0usize;
                for (gi, g) in coverage_graphs(seed, graphs).iter().enumerate() {
                    let inst = ListedInstance::full(g.clone(), &h)?;
                    let truth = count_mode(&inst, &h, count_mode_of(mode))?;
                    let mut oracle = CountingOracle::exact();
                    let plan =
                        CoveragePlan::prepare(Problem::new(&inst, &h)?, Target::new(&h)?, mode, eps, delta, &mut oracle)?;
                    total_t += plan.t();
                    let table = plan.exact_table()?;
                    let mut good = 0;
                    for r in 0..runs {
                        let run = plan.run(&mut oracle, seed ^ (gi as u64) << 32 ^ r, Sampler::Auto, Some(&table))?;
                        if within_factor(&run.y, &truth, eps) {
                            good += 1;
                        }
                    }
                    worst = worst.min(good);
                    if good < need {
                        return Ok((false, format!("graph {gi}: {good}/{runs} within e^±{eps} of {truth}")));
                    }
                }
                Ok((true, format!("{graphs} graphs, worst {worst}/{runs} within e^±{eps}, Σt = {total_t}")))
            })();
            out.push(match res {
                Ok((ok, d)) => Check::new(name, ok, d),
                Err(e) => Check::from_error(name, &e),
            });
        }
    }
    out
}

fn count_mode_of(mode: CoverMode) -> CountMode {
    match mode {
        CoverMode::Surjective => CountMode::Surjective,
        CoverMode::Compaction => CountMode::Compaction,
    }
}

fn coverage_expectation(seed: u64, quick: bool) -> Vec<Check> {
    let graphs = if quick { 3 } else { 20 };
    let mut out = Vec::new();
    for (hname, h) in coverage_fixtures() {
        for mode in [CoverMode::Surjective, CoverMode::Compaction] {
            let name = format!("expectation-{}-{hname}", mode.as_str());
            let res = (|| -> Result<(bool, String)> {
                for (gi, g) in coverage_graphs(seed, graphs).iter().enumerate() {
                    let inst = ListedInstance::full(g.clone(), &h)?;
                    let truth = count_naive(&inst, &h, count_mode_of(mode))?;
                    let mut oracle = CountingOracle::exact();
                    let plan = CoveragePlan::prepare(Problem::new(&inst, &h)?, Target::new(&h)?, mode, 0.2, 0.1, &mut oracle)?;
                    let table = plan.exact_table()?;
                    let ey = plan.expected_y(&table);
                    if ey != BigRational::from_integer(BigInt::from(truth.clone())) {
                        return Ok((false, format!("graph {gi}: E[Y] = {ey}, truth {truth}")));
                    }
                    if table.omega_first() != truth {
                        return Ok((false, format!("graph {gi}: first-occurrence total {}", table.omega_first())));
                    }
                    if truth.clone() * BigUint::from(plan.t().max(1)) < table.omega_plus() {
                        return Ok((false, format!("graph {gi}: |Ω⁺|/t exceeds the count")));
                    }
                }
                Ok((true, format!("{graphs} graphs: E[Y], partition and lower bound exact")))
            })();
            out.push(match res {
                Ok((ok, d)) => Check::new(name, ok, d),
                Err(e) => Check::from_error(name, &e),
            });
        }
    }
    out
}

fn sampler_uniformity(seed: u64, samples: u64) -> Vec<Check> {
    let res = (|| -> Result<(bool, String)> {
        let g = Graph::from_parts(&[("a", false), ("b", false), ("c", false)], &[("a", "b"), ("b", "c")])?;
        let h = twrench();
        let inst = ListedInstance::full(g, &h)?;
        let mut all: Vec<Vec<usize>> = Vec::new();
        for_each_hom(&inst, &h, |s| all.push(s.to_vec()))?;
        let index: BTreeMap<Vec<usize>, usize> = all.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let p = Problem::new(&inst, &h)?;
        let t = Target::new(&h)?;
        let mut oracle = CountingOracle::exact();
        let mut counts = vec![0u64; all.len()];
        for j in 0..samples {
            let s = sample_hom(&mut oracle, &p, &t, 0.01, &mut stream(seed, j, 14))?;
            match index.get(&s) {
                Some(&i) => counts[i] += 1,
                None => return Ok((false, format!("sample {s:?} is not a homomorphism"))),
            }
        }
        let u = 1.0 / all.len() as f64;
        let tv: f64 = counts.iter().map(|&c| (c as f64 / samples as f64 - u).abs()).sum::<f64>() / 2.0;
        Ok((tv <= 0.05, format!("{samples} samples over {} homomorphisms, TV = {tv:.4}", all.len())))
    })();
    vec![match res {
        Ok((ok, d)) => Check::new("sampler-uniformity", ok, d),
        Err(e) => Check::from_error("sampler-uniformity", &e),
    }]
}

fn padding_pinning(seed: u64, cases: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let mut pad_bad = None;
    let mut pin_bad = None;
    for case in 0..cases {
        let mut rng = stream(seed, case, 15);
        let ng = rng.random_range(0..=4);
        let nh = rng.random_range(1..=3);
        let g = random_pattern(&mut rng, ng, 0.5);
        let h = random_graph(&mut rng, "h", nh, 0.5, 0.4);
        let lists = random_lists(&mut rng, &g, &h, 0.4);
        let res = (|| -> Result<Option<String>> {
            let inst = ListedInstance::new(g.clone(), &lists, &h)?;
            let padded = lhom_padding(&inst, &h)?;
            let a = count_list_hom(&inst, &h)?;
            let b = count_surjective(&padded, &h)?;
            let c = count_compaction(&padded, &h)?;
            let twice = count_list_hom(&lhom_padding(&padded, &h)?, &h)?;
            if a != b || a != c || a != twice {
                return Ok(Some(format!("hom {a}, padded sur {b}, comp {c}, re-padded hom {twice}\n{}", describe(&inst, &h))));
            }
            Ok(None)
        })();
        match res {
            Ok(Some(m)) if pad_bad.is_none() => pad_bad = Some(m),
            Err(e) if pad_bad.is_none() => pad_bad = Some(e.to_string()),
            _ => {}
        }
        let mut rng = stream(seed, case, 25);
        let ng = rng.random_range(0..=5);
        let nh = rng.random_range(1..=5);
        let g = random_pattern(&mut rng, ng, 0.5);
        let h = random_graph(&mut rng, "h", nh, 0.5, 0.4);
        let u = rng.random_range(0..h.n());
        let res = (|| -> Result<Option<String>> {
            let nb: Vec<usize> = h.gamma(u).into_iter().collect();
            let local = h.induced(&nb);
            let a = count_hom(&g, &local)?;
            let inst = pin_neighborhood_instance(&g, &h, h.name(u))?;
            let b = count_list_hom(&inst, &h)?;
            if a != b {
                return Ok(Some(format!("hom into neighbourhood {a} vs pinned {b}\n{}", describe(&inst, &h))));
            }
            Ok(None)
        })();
        match res {
            Ok(Some(m)) if pin_bad.is_none() => pin_bad = Some(m),
            Err(e) if pin_bad.is_none() => pin_bad = Some(e.to_string()),
            _ => {}
        }
    }
    for (name, bad) in [("padding", pad_bad), ("pinning", pin_bad)] {
        out.push(match bad {
            None => Check::new(name, true, format!("{cases} random instances")),
            Some(cx) => Check::failed_with(name, "identity failed", cx),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// gadgets

fn cut_estimator() -> Vec<Check> {
    let res = (|| -> Result<(bool, String)> {
        let g = Graph::from_parts(
            &[("a", false), ("b", false), ("c", false), ("d", false)],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        )?;
        let h = j3();
        let terminals = ["a", "b", "c"];
        let budget = min_multiterminal_cut(&g, terminals)?;
        let plan = build_cut_instance(&g, terminals, budget, &h, 0.02)?;
        let t = count_multiterminal_cuts_bruteforce(&g, terminals, budget)?;
        let z = count_blocked(&plan.blocked, &h)?;
        let analysis = analyze_cuts(&plan, &h)?;
        if analysis.exact_total() != z {
            return Ok((false, format!("cut analysis total {} vs count {z}", analysis.exact_total())));
        }
        let ratio = BigRational::from_integer(BigInt::from(z.clone())) / plan.z_star();
        let lo = BigRational::from_integer(BigInt::from(t.clone()));
        let hi = lo.clone() + BigRational::new(BigInt::one(), BigInt::from(4u32));
        if ratio < lo || ratio > hi {
            return Ok((false, format!("Z/Z* = {ratio} outside [{t}, {t}+1/4]")));
        }
        let est = estimate_multiterminal_cuts(&plan, 0.5, exact_blocked_oracle(&h))?;
        Ok((est == t, format!("B = {budget}, T = {t}, estimate {est}, Z/Z* − T = {}", ratio - lo)))
    })();
    vec![match res {
        Ok((ok, d)) => Check::new("cut-estimator", ok, d),
        Err(e) => Check::from_error("cut-estimator", &e),
    }]
}

fn largecut_identity() -> Vec<Check> {
    let k2 = Graph::from_parts(&[("a", false), ("b", false)], &[("a", "b")]).expect("fixed");
    let p3 = Graph::from_parts(&[("a", false), ("b", false), ("c", false)], &[("a", "b"), ("b", "c")]).expect("fixed");
    let ov = LargeCutOverrides { p: Some(1), q: Some(1), t: Some(1), s: Some(1) };
    let mut out = Vec::new();
    for (gname, g) in [("K2", k2), ("P3", p3)] {
        let name = format!("largecut-{gname}");
        let res = (|| -> Result<(bool, String)> {
            let t4 = table_row(4, 1)?;
            let nt4 = n_exact(&t4, 1, 1, 1);
            let mut seen = Vec::new();
            for ell in 1..=g.non_loop_edges().len() as u64 {
                let cuts = count_large_cuts_bruteforce(&g, ell)?;
                if cuts.is_zero() {
                    continue;
                }
                let plan = build_largecut_instance(&g, ell, 1, ov)?;
                let lhs = full_hom_count_by_cutsize(&plan, ell)?;
                let rhs = cuts * BigUint::from(2u32) * nt4.pow(g.n() as u32) * BigUint::from(4u32).pow((plan.s * ell) as u32);
                if lhs != rhs {
                    return Ok((false, format!("ℓ = {ell}: {lhs} vs {rhs}")));
                }
                seen.push(format!("ℓ={ell}: {lhs}"));
            }
            let note = if nt4.is_zero() { " (degenerate: both sides vanish)" } else { "" };
            Ok((true, format!("N(T4) = {nt4}{note}; {}", seen.join(", "))))
        })();
        out.push(match res {
            Ok((ok, d)) => Check::new(name, ok, d),
            Err(e) => Check::from_error(name, &e),
        });
    }
    out
}

fn dirichlet(seed: u64, cases: u64) -> Vec<Check> {
    for case in 0..cases {
        let mut rng = stream(seed, case, 12);
        let d = rng.random_range(1..=3);
        let n = [10u64, 100, 1000][rng.random_range(0..3)];
        let lambdas: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..40.0)).collect();
        let bound = dirichlet_bound(d, n);
        match dirichlet_approx(&lambdas, n) {
            Ok((p, r)) => {
                let ok = r >= 1
                    && r <= n
                    && lambdas.iter().zip(&p).all(|(&l, &pi)| (r as f64 * l - pi as f64).abs() <= bound * (1.0 + 1e-12));
                if !ok {
                    return vec![Check::failed_with(
                        "dirichlet",
                        format!("case {case}"),
                        format!("λ = {lambdas:?}, N = {n}: r = {r}, p = {p:?}"),
                    )];
                }
            }
            Err(e) => return vec![Check::from_error(format!("dirichlet-case-{case}"), &e)],
        }
    }
    vec![Check::new("dirichlet", true, format!("{cases} random (λ, N)"))]
}

// ---------------------------------------------------------------------------
// classify

/// Fixture graphs with expected class, clause and (optional) witness case.
pub fn classifier_fixtures() -> Vec<(&'static str, Graph, Class, &'static str, Option<&'static str>)> {
    let g = |v: &[(&str, bool)], e: &[(&str, &str)]| Graph::from_parts(v, e).expect("fixed");
    let star = g(&[("c", false), ("l1", false), ("l2", false), ("l3", false)], &[("c", "l1"), ("c", "l2"), ("c", "l3")]);
    let looped = g(&[("a", true)], &[]);
    let rk2 = g(&[("a", true), ("b", true)], &[("a", "b")]);
    let fig2 = pbrp_graph(4, &BTreeSet::from([1, 3, 4])).expect("fixed");
    let rp5 = g(
        &[("p0", true), ("p1", true), ("p2", true), ("p3", true), ("p4", true)],
        &[("p0", "p1"), ("p1", "p2"), ("p2", "p3"), ("p3", "p4")],
    );
    let cat = g(
        &[("s0", false), ("s1", false), ("s2", false), ("s3", false), ("l1", false), ("l2", false), ("l3", false)],
        &[("s0", "s1"), ("s1", "s2"), ("s2", "s3"), ("s1", "l1"), ("s2", "l2"), ("s2", "l3")],
    );
    let cyc = |looped: bool, n: usize| {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let vs: Vec<(&str, bool)> = names.iter().map(|s| (s.as_str(), looped)).collect();
        let es: Vec<(&str, &str)> = (0..n).map(|i| (names[i].as_str(), names[(i + 1) % n].as_str())).collect();
        Graph::from_parts(&vs, &es).expect("fixed")
    };
    let wr3_apex = g(
        &[("apex", true), ("l1", true), ("l2", true), ("l3", true)],
        &[("apex", "l1"), ("apex", "l2"), ("apex", "l3")],
    );
    vec![
        ("star", star, Class::Fp, "Thm1.i", None),
        ("looped-vertex", looped, Class::Fp, "Thm1.i", None),
        ("reflexive-K2", rk2, Class::Fp, "Thm1.i", None),
        ("2-Wrench", twrench(), Class::BisEquivalent, "Thm1.ii", None),
        ("pbrp-Q4-S134", fig2, Class::BisEquivalent, "Thm1.ii", None),
        ("reflexive-P5", rp5, Class::BisEquivalent, "Thm1.ii", None),
        ("caterpillar", cat, Class::BisEquivalent, "Thm1.ii", None),
        ("J3", j3(), Class::SatEquivalent, "Thm5.iii", Some(CASE_J3)),
        ("reflexive-C5", cyc(true, 5), Class::SatEquivalent, "Thm1.iii", Some(CASE_REFLEXIVE_CYCLE)),
        ("irreflexive-C5", cyc(false, 5), Class::SatEquivalent, "Thm5.iii", Some(CASE_ODD_CYCLE)),
        ("WR3-apex", wr3_apex, Class::SatEquivalent, "Thm1.iii", Some(CASE_WR)),
        ("irreflexive-C4", cyc(false, 4), Class::Unclassified, "none", None),
    ]
}

fn classifier_table() -> Vec<Check> {
    let mut out = Vec::new();
    for (name, h, class, clause, case) in classifier_fixtures() {
        let check = match classify(&h) {
            Ok(v) => {
                let case_ok = case.map_or(true, |c| v.witnesses.iter().any(|w| w.case == c));
                let ok = v.class == class && v.clause == clause && case_ok;
                Check::new(
                    format!("classify-{name}"),
                    ok,
                    format!("{} {} (expected {} {clause})", v.class.as_str(), v.clause, class.as_str()),
                )
            }
            Err(e) => Check::from_error(format!("classify-{name}"), &e),
        };
        out.push(check);
    }
    out
}

/// Cover index sizes for the coverage fixtures (used by reports).
pub fn cover_index_size(g: &Graph, h: &Graph, mode: CoverMode) -> Result<usize> {
    Ok(enumerate_t(&ListedInstance::full(g.clone(), h)?, h, mode)?.len())
}

mod common;

use common::*;
use proptest::prelude::*;
use retraction_core::blocked::count_blocked;
use retraction_core::count::count_list_hom;
use retraction_core::gadget::{build_j, hk};
use retraction_core::io::{parse_blocked, parse_graph, parse_instance, serialize_blocked, serialize_graph, serialize_instance};
use retraction_core::{BlockedInstance, Coupling, Graph, ListedInstance};

/// Shortest cycle by trying every simple cycle through DFS (tiny graphs only).
fn girth_by_cycles(g: &Graph) -> Option<usize> {
    fn dfs(g: &Graph, start: usize, v: usize, seen: &mut Vec<bool>, len: usize, best: &mut Option<usize>) {
        for &w in g.neighbors(v) {
            if w == v {
                continue;
            }
            if w == start && len >= 3 {
                *best = Some(best.map_or(len, |b| b.min(len)));
            } else if !seen[w] && w > start {
                seen[w] = true;
                dfs(g, start, w, seen, len + 1, best);
                seen[w] = false;
            }
        }
    }
    let mut best = None;
    for s in 0..g.n() {
        let mut seen = vec![false; g.n()];
        seen[s] = true;
        dfs(g, s, s, &mut seen, 1, &mut best);
    }
    best
}

#[test]
fn girth_of_named_graphs() {
    assert_eq!(cycle(5, false).girth(), Some(5));
    assert_eq!(cycle(3, true).girth(), Some(3));
    assert_eq!(path(3, true).girth(), None);
    assert_eq!(graph(&[("a", true)], &[]).girth(), None);
    assert_eq!(hk(1).unwrap().girth(), girth_by_cycles(&hk(1).unwrap()));
}

#[test]
fn hand_expanded_j_matches_blocked_count() {
    let h = hk(1).unwrap();
    let b = build_j(1, 1, 1).unwrap();
    // J(1,1,1) written out vertex by vertex
    let g = graph(
        &[
            ("alpha", false), ("alpha'", false), ("beta", false), ("A", false), ("B", false),
            ("C", false), ("C'", false), ("B'", false), ("A'", false),
        ],
        &[
            ("A", "B"), ("C", "C'"), ("A'", "B'"), ("B", "C"), ("B'", "C'"), ("alpha", "A"),
            ("alpha'", "A'"), ("beta", "B"), ("beta", "C"), ("beta", "C'"), ("beta", "B'"),
        ],
    );
    let pins = [("alpha", "g"), ("alpha'", "g"), ("beta", "b")]
        .iter()
        .map(|(v, t)| (v.to_string(), [t.to_string()].into()))
        .collect();
    let inst = ListedInstance::new(g, &pins, &h).unwrap();
    assert_eq!(count_blocked(&b, &h).unwrap(), count_list_hom(&inst, &h).unwrap());
    assert_eq!(b.expand(&h, 100).unwrap().pattern.n(), 9);
    assert_eq!(build_j(2, 3, 1).unwrap().vertex_count(), 17);
}

#[test]
fn blocked_file_round_trip() {
    let mut b = BlockedInstance::default();
    b.add_block("x", 1).add_block("Y", 3).add_block("Z", 2);
    b.couple("x", "Y", Coupling::Apex).couple("Y", "Z", Coupling::CompleteBipartite);
    b.pin("x", "c1");
    let text = serialize_blocked(&b, Some("t.hg"));
    let (t, back) = parse_blocked(&text).unwrap();
    assert_eq!(t.as_deref(), Some("t.hg"));
    assert_eq!(back, b);
}

#[test]
fn malformed_files_are_rejected() {
    assert!(parse_graph("v a\ne a b\n").is_err());
    assert!(parse_graph("v a\nv a\n").is_err());
    assert!(parse_graph("v a wobble\n").is_err());
    assert!(parse_instance("v a\nl b x\n").is_err());
}

proptest! {
    #[test]
    fn second_neighbourhood_is_union_of_neighbourhoods(g in arb_graph("v", 7, true), u in 0usize..7) {
        let u = u % g.n();
        prop_assert_eq!(g.gamma2(u), g.neighbor_union(&g.gamma(u)));
    }

    #[test]
    fn girth_matches_cycle_enumeration(g in arb_graph("v", 8, true)) {
        prop_assert_eq!(g.girth(), girth_by_cycles(&g));
    }

    #[test]
    fn graph_serialisation_is_stable(g in arb_graph("v", 7, true)) {
        let once = parse_graph(&serialize_graph(&g)).unwrap();
        let twice = parse_graph(&serialize_graph(&once)).unwrap();
        prop_assert_eq!(serialize_graph(&once), serialize_graph(&twice));
        prop_assert_eq!(once.edges(), g.edges());
    }

    #[test]
    fn instance_serialisation_is_stable(
        g in arb_graph("v", 5, false),
        h in arb_graph("h", 3, true),
        masks in proptest::collection::vec(proptest::option::of(0u8..8), 5),
    ) {
        let lists = lists_from_masks(&g, &h, &masks);
        let inst = ListedInstance::new(g, &lists, &h).unwrap();
        let raw = parse_instance(&serialize_instance(&inst, Some("h.hg"))).unwrap();
        prop_assert_eq!(raw.target.as_deref(), Some("h.hg"));
        let back = raw.resolve(&h).unwrap();
        prop_assert_eq!(back.lists_map(), inst.lists_map());
    }
}

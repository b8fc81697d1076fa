#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use retraction_core::{Graph, GraphBuilder};

/// Graph on `{prefix}0..` from an upper-triangle edge mask and a loop mask.
pub fn graph_from_bits(prefix: &str, n: usize, edges: u64, loops: u64) -> Graph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.vertex(format!("{prefix}{i}"), loops >> i & 1 == 1);
    }
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if edges >> k & 1 == 1 {
                b.edge(format!("{prefix}{i}"), format!("{prefix}{j}"));
            }
            k += 1;
        }
    }
    b.build().unwrap()
}

pub fn arb_graph(prefix: &'static str, max_n: usize, looped: bool) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<u64>(), any::<u64>())
        .prop_map(move |(n, e, l)| graph_from_bits(prefix, n, e, if looped { l } else { 0 }))
}

/// Random lists for `g` drawn from the vertices of `h` (bit i of each mask keeps h's i-th vertex).
pub fn lists_from_masks(g: &Graph, h: &Graph, masks: &[Option<u8>]) -> BTreeMap<String, BTreeSet<String>> {
    let mut out = BTreeMap::new();
    for (i, v) in g.names().iter().enumerate() {
        if let Some(Some(m)) = masks.get(i) {
            let l = h.names().iter().enumerate().filter(|(j, _)| m >> j & 1 == 1).map(|(_, x)| x.clone()).collect();
            out.insert(v.clone(), l);
        }
    }
    out
}

pub fn graph(vs: &[(&str, bool)], es: &[(&str, &str)]) -> Graph {
    Graph::from_parts(vs, es).unwrap()
}

pub fn cycle(n: usize, looped: bool) -> Graph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.vertex(format!("c{i}"), looped);
    }
    for i in 0..n {
        b.edge(format!("c{i}"), format!("c{}", (i + 1) % n));
    }
    b.build().unwrap()
}

pub fn path(n: usize, looped: bool) -> Graph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.vertex(format!("p{i}"), looped);
        if i > 0 {
            b.edge(format!("p{}", i - 1), format!("p{i}"));
        }
    }
    b.build().unwrap()
}

//! Complexity classification of approximate retraction counting for
//! targets of girth at least 5 and for irreflexive square-free targets,
//! with the structural recognisers and witnesses behind each verdict.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::gadget::{find_j3_indices, hk};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Class {
    #[serde(rename = "FP")]
    Fp,
    #[serde(rename = "BIS_EQUIVALENT")]
    BisEquivalent,
    #[serde(rename = "SAT_EQUIVALENT")]
    SatEquivalent,
    #[serde(rename = "UNCLASSIFIED")]
    Unclassified,
}

impl Class {
    pub fn as_str(self) -> &'static str {
        match self {
            Class::Fp => "FP",
            Class::BisEquivalent => "BIS_EQUIVALENT",
            Class::SatEquivalent => "SAT_EQUIVALENT",
            Class::Unclassified => "UNCLASSIFIED",
        }
    }
}

pub const CASE_WR: &str = "WR_q-neighborhood";
pub const CASE_NOT_WRENCH: &str = "non-2-Wrench-neighborhood";
pub const CASE_DISTANCE2: &str = "distance-2-structure";
pub const CASE_REFLEXIVE_CYCLE: &str = "reflexive-cycle≥5";
pub const CASE_ODD_CYCLE: &str = "odd-cycle";
pub const CASE_J3: &str = "induced-J₃";
pub const CASE_PSEUDOTREE: &str = "pseudotree-cycle≥5";
pub const CASE_FALLBACK: &str = "not-PBRP/star-analysis";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub case: String,
    pub vertices: Vec<String>,
}

impl Witness {
    fn new(case: &str, h: &Graph, vs: impl IntoIterator<Item = usize>) -> Witness {
        let mut v: Vec<String> = vs.into_iter().map(|i| h.name(i).to_string()).collect();
        v.sort();
        v.dedup();
        Witness { case: case.to_string(), vertices: v }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentVerdict {
    pub vertices: Vec<String>,
    pub class: Class,
    pub clause: String,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub class: Class,
    pub clause: String,
    pub witnesses: Vec<Witness>,
    pub components: Vec<ComponentVerdict>,
}

fn require_connected(h: &Graph) -> Result<()> {
    if h.n() > 0 && !h.is_connected() {
        return invalid("graph must be connected");
    }
    Ok(())
}

fn is_tree(h: &Graph) -> bool {
    h.n() > 0 && h.is_connected() && h.non_loop_edges().len() + 1 == h.n()
}

/// Irreflexive tree with a vertex adjacent to all others (K₁ and K₂ count).
pub fn is_irreflexive_star(h: &Graph) -> Result<bool> {
    require_connected(h)?;
    if !h.is_irreflexive() || !is_tree(h) {
        return Ok(false);
    }
    Ok(h.n() <= 2 || (0..h.n()).any(|v| h.degree(v) == h.n() - 1))
}

pub fn is_single_looped_vertex(h: &Graph) -> Result<bool> {
    require_connected(h)?;
    Ok(h.n() == 1 && h.is_looped(0))
}

pub fn is_double_looped_edge(h: &Graph) -> Result<bool> {
    require_connected(h)?;
    Ok(h.n() == 2 && h.is_reflexive() && h.adjacent(0, 1))
}

/// Irreflexive tree whose non-leaf vertices induce a path.
pub fn is_caterpillar(h: &Graph) -> Result<bool> {
    require_connected(h)?;
    if !h.is_irreflexive() || !is_tree(h) {
        return Ok(false);
    }
    let inner: Vec<usize> = (0..h.n()).filter(|&v| h.degree(v) >= 2).collect();
    let core = h.induced(&inner);
    Ok((0..core.n()).all(|v| core.degree(v) <= 2))
}

/// Shape of a bristled reflexive path: the path from its lexicographically
/// smaller end, and the bristled positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PbrpShape {
    pub path: Vec<String>,
    /// Q = path length − 2 (0 for paths on one or two vertices).
    pub q: usize,
    pub s: BTreeSet<usize>,
}

pub fn is_pbrp(h: &Graph) -> Result<Option<PbrpShape>> {
    require_connected(h)?;
    if h.n() == 0 || !is_tree(h) {
        return Ok(None);
    }
    let looped: Vec<usize> = (0..h.n()).filter(|&v| h.is_looped(v)).collect();
    if looped.is_empty() {
        return Ok(None);
    }
    for v in (0..h.n()).filter(|&v| !h.is_looped(v)) {
        if h.degree(v) != 1 {
            return Ok(None);
        }
    }
    let core = h.induced(&looped);
    if !core.is_connected() || (0..core.n()).any(|v| core.degree(v) > 2) {
        return Ok(None);
    }
    // walk the looped path from its smaller end
    let ends: Vec<usize> = (0..core.n()).filter(|&v| core.degree(v) <= 1).collect();
    let start = ends[0];
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = core.neighbors(cur).iter().copied().find(|&x| x != cur && x != prev);
        match next {
            Some(x) => {
                prev = cur;
                cur = x;
                path.push(x);
            }
            None => break,
        }
    }
    let names: Vec<String> = path.iter().map(|&i| core.name(i).to_string()).collect();
    let mut s = BTreeSet::new();
    for (pos, name) in names.iter().enumerate() {
        let v = h.index_of(name).expect("vertex");
        let bristles = h.neighbors(v).iter().filter(|&&x| !h.is_looped(x)).count();
        if bristles == 0 {
            continue;
        }
        if bristles > 1 || pos == 0 || pos + 1 == names.len() {
            return Ok(None);
        }
        s.insert(pos);
    }
    let q = names.len().saturating_sub(2);
    Ok(Some(PbrpShape { path: names, q, s }))
}

/// An induced J₃, as the vertex set (w, x0, x1, y0, y1, z0, z1).
pub fn has_induced_j3(h: &Graph) -> Option<Vec<String>> {
    find_j3_indices(h).map(|v| v.iter().map(|&i| h.name(i).to_string()).collect())
}

fn is_triangle_free(h: &Graph) -> bool {
    h.girth().map_or(true, |g| g > 3)
}

fn proper_neighbours(h: &Graph, b: usize) -> Vec<usize> {
    h.neighbors(b).iter().copied().filter(|&x| x != b).collect()
}

/// H[Γ(b)] is a reflexive star with q ≥ 3 leaves centred at b.
fn wr_neighbourhood(h: &Graph, b: usize) -> Option<usize> {
    if !h.is_looped(b) {
        return None;
    }
    let nb = proper_neighbours(h, b);
    if nb.len() < 3 || nb.iter().any(|&x| !h.is_looped(x)) {
        return None;
    }
    for (i, &x) in nb.iter().enumerate() {
        if nb[i + 1..].iter().any(|&y| h.adjacent(x, y)) {
            return None;
        }
    }
    Some(nb.len())
}

/// H[Γ(b)] is a 2-Wrench centred at b.
pub fn is_two_wrench_neighbourhood(h: &Graph, b: usize) -> bool {
    if !h.is_looped(b) {
        return false;
    }
    let nb = proper_neighbours(h, b);
    if nb.len() != 3 {
        return false;
    }
    let looped = nb.iter().filter(|&&x| h.is_looped(x)).count();
    if looped != 2 {
        return false;
    }
    for (i, &x) in nb.iter().enumerate() {
        if nb[i + 1..].iter().any(|&y| h.adjacent(x, y)) {
            return false;
        }
    }
    true
}

/// H'_k ⊆ H[Γ²(b)] ⊆ H_k for some k, with b playing the role of b.
/// Returns k and the image of each vertex of Γ²(b).
pub fn distance_two_structure(h: &Graph, b: usize) -> Option<(usize, BTreeMap<String, String>)> {
    if !h.is_looped(b) {
        return None;
    }
    let region: Vec<usize> = h.gamma2(b).into_iter().collect();
    if region.len() < 5 {
        return None;
    }
    for k in 1..=region.len() - 4 {
        if region.len() > 8 + k {
            continue;
        }
        let target = hk(k).ok()?;
        if let Some(m) = embed_anchored(h, &region, b, &target) {
            return Some((k, m));
        }
    }
    None
}

fn embed_anchored(h: &Graph, region: &[usize], b: usize, target: &Graph) -> Option<BTreeMap<String, String>> {
    // order the region by BFS from b so every vertex after b has a placed neighbour
    let mut order = vec![b];
    let mut seen: BTreeSet<usize> = BTreeSet::from([b]);
    let mut q = VecDeque::from([b]);
    let inside: BTreeSet<usize> = region.iter().copied().collect();
    while let Some(x) = q.pop_front() {
        for &y in h.neighbors(x) {
            if inside.contains(&y) && seen.insert(y) {
                order.push(y);
                q.push_back(y);
            }
        }
    }
    if order.len() != region.len() {
        return None;
    }
    let tb = target.index_of("b")?;
    let mut img = vec![usize::MAX; h.n()];
    let mut used = vec![false; target.n()];
    img[b] = tb;
    used[tb] = true;
    let k = target.n() - 8;
    let core: Vec<usize> = ["r1", "r2", "g"]
        .iter()
        .map(|s| target.index_of(s).expect("vertex"))
        .chain((1..=k).map(|i| target.index_of(&format!("y{i}")).expect("vertex")))
        .collect();
    let mut found = None;
    place(h, target, &order, 1, &mut img, &mut used, &core, tb, &mut found);
    found.map(|m: Vec<usize>| {
        order.iter().map(|&v| (h.name(v).to_string(), target.name(m[v]).to_string())).collect()
    })
}

#[allow(clippy::too_many_arguments)]
fn place(
    h: &Graph,
    t: &Graph,
    order: &[usize],
    i: usize,
    img: &mut Vec<usize>,
    used: &mut Vec<bool>,
    core: &[usize],
    tb: usize,
    found: &mut Option<Vec<usize>>,
) {
    if found.is_some() {
        return;
    }
    if i == order.len() {
        // H'_k must sit inside: every core vertex is hit, with the edges and
        // loops of H'_k present in the source
        let pre: BTreeMap<usize, usize> =
            order.iter().map(|&v| (img[v], v)).collect();
        let mut ok = core.iter().all(|c| pre.contains_key(c));
        if ok {
            let src = |x: usize| pre[&x];
            let (r1, r2, g) = (src(core[0]), src(core[1]), src(core[2]));
            let b = src(tb);
            ok = h.is_looped(r1)
                && h.is_looped(r2)
                && h.adjacent(r1, b)
                && h.adjacent(r2, b)
                && h.adjacent(b, g)
                && core[3..].iter().all(|&y| h.adjacent(g, src(y)));
        }
        if ok {
            *found = Some(img.clone());
        }
        return;
    }
    let v = order[i];
    for c in 0..t.n() {
        if used[c] || (h.is_looped(v) && !t.is_looped(c)) {
            continue;
        }
        let fits = order[..i].iter().all(|&u| !h.adjacent(u, v) || t.adjacent(img[u], c));
        if !fits {
            continue;
        }
        img[v] = c;
        used[c] = true;
        place(h, t, order, i + 1, img, used, core, tb, found);
        used[c] = false;
        img[v] = usize::MAX;
        if found.is_some() {
            return;
        }
    }
}

/// Neighbourhood-based hardness witnesses at every looped vertex.
pub fn neighborhood_witnesses(h: &Graph) -> Vec<Witness> {
    let mut out = Vec::new();
    let tri_free = is_triangle_free(h);
    for b in (0..h.n()).filter(|&b| h.is_looped(b)) {
        if wr_neighbourhood(h, b).is_some() {
            out.push(Witness::new(CASE_WR, h, h.gamma(b)));
        }
        let has_unlooped = h.neighbors(b).iter().any(|&x| !h.is_looped(x));
        if tri_free && has_unlooped && !is_two_wrench_neighbourhood(h, b) {
            out.push(Witness::new(CASE_NOT_WRENCH, h, h.gamma(b)));
        }
        if distance_two_structure(h, b).is_some() {
            out.push(Witness::new(CASE_DISTANCE2, h, h.gamma2(b)));
        }
    }
    out
}

/// Kelk's condition on the set F(H) of vertices adjacent to everything.
pub fn check_kelk_condition(h: &Graph, max_vertices: usize) -> Result<bool> {
    let n = h.n();
    if n > max_vertices || n > 20 {
        return Err(Error::Bound(format!("{n} vertices (limit {max_vertices})")));
    }
    let masks = h.adj_masks()?;
    let all: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let f: u64 = (0..n).filter(|&u| masks[u] == all).fold(0, |m, u| m | 1 << u);
    if f == 0 || f == all {
        return Ok(false);
    }
    let bound = f.count_ones() as u64 * n as u64;
    for s in 0u64..=all {
        if s == f || s == 0 {
            continue;
        }
        let gamma_s = (0..n).filter(|&u| s >> u & 1 == 1).fold(all, |m, u| m & masks[u]);
        let best_t = if gamma_s == f { gamma_s.count_ones().saturating_sub(1) } else { gamma_s.count_ones() };
        if s.count_ones() as u64 * best_t as u64 >= bound {
            return Ok(false);
        }
    }
    Ok(true)
}

fn shortest_odd_cycle(h: &Graph) -> Option<Vec<usize>> {
    let n = h.n();
    let mut best: Option<Vec<usize>> = None;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[root] = 0;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &y in h.neighbors(x) {
                if y == x {
                    continue;
                }
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    q.push_back(y);
                } else if dist[y] == dist[x] && x < y {
                    let len = 2 * dist[x] + 1;
                    if best.as_ref().map_or(true, |b| len < b.len()) {
                        let walk = |mut v: usize| {
                            let mut p = vec![v];
                            while v != root {
                                v = parent[v];
                                p.push(v);
                            }
                            p
                        };
                        let mut cyc = walk(x);
                        let mut other = walk(y);
                        other.pop();
                        other.reverse();
                        cyc.extend(other);
                        cyc.pop();
                        let distinct: BTreeSet<usize> = cyc.iter().copied().collect();
                        if distinct.len() == cyc.len() {
                            best = Some(cyc);
                        }
                    }
                }
            }
        }
    }
    best
}

/// The unique cycle of a connected unicyclic graph, by leaf stripping.
fn unique_cycle(h: &Graph) -> Option<Vec<usize>> {
    if h.non_loop_edges().len() != h.n() {
        return None;
    }
    let mut deg: Vec<usize> = (0..h.n()).map(|v| h.degree(v)).collect();
    let mut alive = vec![true; h.n()];
    let mut q: VecDeque<usize> = (0..h.n()).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = q.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &u in h.neighbors(v) {
            if u != v && alive[u] {
                deg[u] -= 1;
                if deg[u] == 1 {
                    q.push_back(u);
                }
            }
        }
    }
    let cyc: Vec<usize> = (0..h.n()).filter(|&v| alive[v]).collect();
    (cyc.len() >= 3).then_some(cyc)
}

/// The looped vertices induce a cycle and every unlooped vertex is a leaf.
fn reflexive_cycle(h: &Graph) -> Option<Vec<usize>> {
    let looped: Vec<usize> = (0..h.n()).filter(|&v| h.is_looped(v)).collect();
    if (0..h.n()).any(|v| !h.is_looped(v) && h.degree(v) != 1) {
        return None;
    }
    let core = h.induced(&looped);
    if core.n() >= 5 && core.is_connected() && (0..core.n()).all(|v| core.degree(v) == 2) {
        Some(looped)
    } else {
        None
    }
}

fn irreflexive_hard_witnesses(h: &Graph) -> Vec<Witness> {
    let mut w = Vec::new();
    if let Some(j) = find_j3_indices(h) {
        w.push(Witness::new(CASE_J3, h, j));
    }
    if let Some(c) = shortest_odd_cycle(h) {
        w.push(Witness::new(CASE_ODD_CYCLE, h, c));
    }
    if let Some(c) = unique_cycle(h) {
        if c.len() % 2 == 0 {
            w.push(Witness::new(CASE_PSEUDOTREE, h, c));
        }
    }
    if w.is_empty() {
        w.push(Witness::new(CASE_FALLBACK, h, 0..h.n()));
    }
    w
}

fn component_verdict(c: &Graph) -> Result<ComponentVerdict> {
    let vertices = c.names().to_vec();
    let mk = |class, clause: &str, witnesses, note: Option<&str>| ComponentVerdict {
        vertices: vertices.clone(),
        class,
        clause: clause.to_string(),
        witnesses,
        note: note.map(str::to_string),
    };
    let girth_ok = c.girth().map_or(true, |g| g >= 5);
    if c.is_irreflexive() && (girth_ok || c.is_square_free()) {
        if is_irreflexive_star(c)? {
            return Ok(mk(Class::Fp, "Thm1.i", vec![], None));
        }
        if is_caterpillar(c)? {
            return Ok(mk(Class::BisEquivalent, "Thm1.ii", vec![], None));
        }
        return Ok(mk(Class::SatEquivalent, "Thm5.iii", irreflexive_hard_witnesses(c), None));
    }
    if !girth_ok {
        return Ok(mk(
            Class::Unclassified,
            "none",
            vec![],
            Some("girth 3 or 4 with loops or a 4-cycle; outside the proved classification"),
        ));
    }
    if is_single_looped_vertex(c)? || is_double_looped_edge(c)? {
        return Ok(mk(Class::Fp, "Thm1.i", vec![], None));
    }
    if is_pbrp(c)?.is_some() {
        return Ok(mk(Class::BisEquivalent, "Thm1.ii", vec![], None));
    }
    let mut w = neighborhood_witnesses(c);
    if let Some(cyc) = reflexive_cycle(c) {
        w.push(Witness::new(CASE_REFLEXIVE_CYCLE, c, cyc));
    }
    if w.is_empty() {
        w.push(Witness::new(CASE_FALLBACK, c, 0..c.n()));
    }
    Ok(mk(Class::SatEquivalent, "Thm1.iii", w, None))
}

/// Classifies each component and combines: any hard component makes the
/// whole target hard; otherwise an unclassified component leaves it
/// unclassified; otherwise the hardest component decides.
pub fn classify(h: &Graph) -> Result<Verdict> {
    let comps = h.component_graphs();
    let components: Vec<ComponentVerdict> = comps.iter().map(component_verdict).collect::<Result<_>>()?;
    let pick = if let Some(c) = components.iter().find(|c| c.class == Class::SatEquivalent) {
        Some(c)
    } else if let Some(c) = components.iter().find(|c| c.class == Class::Unclassified) {
        Some(c)
    } else {
        components.iter().max_by_key(|c| c.class).and_then(|m| components.iter().find(|c| c.class == m.class))
    };
    let (class, clause, witnesses) = match pick {
        Some(c) => (c.class, c.clause.clone(), c.witnesses.clone()),
        None => (Class::Fp, "Thm1.i".to_string(), vec![]),
    };
    Ok(Verdict { class, clause, witnesses, components })
}

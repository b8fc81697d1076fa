//! Undirected graphs with loop flags, directed graphs, and the two instance
//! shapes (explicit lists and blocked gadgets) consumed by the counters.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Undirected graph over string ids, indexed in lexicographic id order.
/// A looped vertex appears in its own adjacency list.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    looped: Vec<bool>,
}

#[derive(Default, Clone, Debug)]
pub struct GraphBuilder {
    vertices: BTreeMap<String, bool>,
    edges: BTreeSet<(String, String)>,
    duplicate: Option<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: impl Into<String>, looped: bool) -> &mut Self {
        let id = id.into();
        if self.vertices.insert(id.clone(), looped).is_some() && self.duplicate.is_none() {
            self.duplicate = Some(id);
        }
        self
    }

    /// Adds a vertex unless present; a `true` loop flag is sticky.
    pub fn ensure_vertex(&mut self, id: impl Into<String>, looped: bool) -> &mut Self {
        let e = self.vertices.entry(id.into()).or_insert(false);
        *e |= looped;
        self
    }

    pub fn edge(&mut self, a: impl Into<String>, b: impl Into<String>) -> &mut Self {
        let (a, b) = (a.into(), b.into());
        if a <= b {
            self.edges.insert((a, b));
        } else {
            self.edges.insert((b, a));
        }
        self
    }

    pub fn build(&self) -> Result<Graph> {
        if let Some(d) = &self.duplicate {
            return Err(Error::DuplicateVertex(d.clone()));
        }
        let names: Vec<String> = self.vertices.keys().cloned().collect();
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut looped: Vec<bool> = self.vertices.values().copied().collect();
        let mut adj = vec![Vec::new(); names.len()];
        for (a, b) in &self.edges {
            let i = *index.get(a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let j = *index.get(b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if i == j {
                looped[i] = true;
            } else {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for (i, l) in looped.iter().enumerate() {
            if *l {
                adj[i].push(i);
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        Ok(Graph { names, index, adj, looped })
    }
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    /// Convenience constructor from `(id, looped)` pairs and id pairs.
    pub fn from_parts<S: AsRef<str>>(vertices: &[(S, bool)], edges: &[(S, S)]) -> Result<Graph> {
        let mut b = GraphBuilder::new();
        for (v, l) in vertices {
            b.vertex(v.as_ref(), *l);
        }
        for (x, y) in edges {
            b.edge(x.as_ref(), y.as_ref());
        }
        b.build()
    }

    pub fn empty() -> Graph {
        GraphBuilder::new().build().expect("empty graph")
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Γ(i) as a sorted slice, including `i` itself when looped.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn is_looped(&self, i: usize) -> bool {
        self.looped[i]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Number of non-loop neighbours.
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len() - usize::from(self.looped[i])
    }

    pub fn loop_count(&self) -> usize {
        self.looped.iter().filter(|l| **l).count()
    }

    pub fn non_loop_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.adj.iter().enumerate() {
            for &j in a {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// All edges including loops, as `(i, j)` with `i <= j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.adj.iter().enumerate() {
            for &j in a {
                if i <= j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.non_loop_edges().len() + self.loop_count()
    }

    pub fn is_irreflexive(&self) -> bool {
        !self.looped.iter().any(|l| *l)
    }

    pub fn is_reflexive(&self) -> bool {
        self.looped.iter().all(|l| *l)
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Connected components as sorted index lists, ordered by smallest id.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &y in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        q.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn component_graphs(&self) -> Vec<Graph> {
        self.components().iter().map(|c| self.induced(c)).collect()
    }

    /// Subgraph induced by the given indices (any order, duplicates ignored).
    pub fn induced(&self, set: &[usize]) -> Graph {
        let mut b = GraphBuilder::new();
        let mut keep = vec![false; self.n()];
        for &i in set {
            keep[i] = true;
        }
        for i in 0..self.n() {
            if keep[i] {
                b.vertex(self.names[i].clone(), self.looped[i]);
            }
        }
        for (i, j) in self.non_loop_edges() {
            if keep[i] && keep[j] {
                b.edge(self.names[i].clone(), self.names[j].clone());
            }
        }
        b.build().expect("induced subgraph of a valid graph")
    }

    pub fn induced_by_names<S: AsRef<str>>(&self, ids: &[S]) -> Result<Graph> {
        let idx = ids.iter().map(|s| self.require(s.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(self.induced(&idx))
    }

    /// Length of a shortest cycle on at least three distinct vertices;
    /// `None` when the graph is acyclic. Loops are ignored.
    pub fn girth(&self) -> Option<usize> {
        let n = self.n();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            parent[root] = usize::MAX;
            let mut q = VecDeque::from([root]);
            while let Some(x) = q.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[x] + 1 >= b {
                        break;
                    }
                }
                for &y in &self.adj[x] {
                    if y == x {
                        continue;
                    }
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        parent[y] = x;
                        q.push_back(y);
                    } else if parent[x] != y {
                        let len = dist[x] + dist[y] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// True when no two distinct vertices have two common non-loop neighbours
    /// (no 4-cycle).
    pub fn is_square_free(&self) -> bool {
        let n = self.n();
        for u in 0..n {
            let mut seen: HashMap<usize, usize> = HashMap::new();
            for &a in &self.adj[u] {
                if a == u {
                    continue;
                }
                for &v in &self.adj[a] {
                    if v == a || v == u {
                        continue;
                    }
                    let c = seen.entry(v).or_insert(0);
                    *c += 1;
                    if *c >= 2 {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn gamma(&self, u: usize) -> BTreeSet<usize> {
        self.adj[u].iter().copied().collect()
    }

    /// Vertices reachable by a walk of length exactly two.
    pub fn gamma2(&self, u: usize) -> BTreeSet<usize> {
        self.neighbor_union(&self.gamma(u))
    }

    /// Γ(U): vertices adjacent to every member of `set`.
    pub fn common_neighbors(&self, set: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        let mut it = set.iter();
        let first = match it.next() {
            Some(f) => *f,
            None => return invalid("common neighbours of an empty set"),
        };
        let mut acc = self.gamma(first);
        for &u in it {
            acc.retain(|x| self.adjacent(u, *x));
        }
        Ok(acc)
    }

    /// Φ(S): vertices adjacent to some member of `set`.
    pub fn neighbor_union(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut acc = BTreeSet::new();
        for &u in set {
            acc.extend(self.adj[u].iter().copied());
        }
        acc
    }

    pub fn names_of<'a, I: IntoIterator<Item = &'a usize>>(&self, it: I) -> BTreeSet<String> {
        it.into_iter().map(|&i| self.names[i].clone()).collect()
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<BTreeSet<usize>> {
        ids.iter().map(|s| self.require(s.as_ref())).collect()
    }

    /// Adjacency bitmasks; targets are limited to 64 vertices.
    pub fn adj_masks(&self) -> Result<Vec<u64>> {
        if self.n() > 64 {
            return Err(Error::Bound(format!("target has {} vertices (limit 64)", self.n())));
        }
        Ok(self
            .adj
            .iter()
            .map(|a| a.iter().fold(0u64, |m, &j| m | (1u64 << j)))
            .collect())
    }

    /// Disjoint union; ids of `other` get `prefix` prepended.
    pub fn disjoint_union(&self, other: &Graph, prefix: &str) -> Result<Graph> {
        let mut b = GraphBuilder::new();
        for i in 0..self.n() {
            b.vertex(self.names[i].clone(), self.looped[i]);
        }
        for i in 0..other.n() {
            b.vertex(format!("{prefix}{}", other.names[i]), other.looped[i]);
        }
        for (i, j) in self.non_loop_edges() {
            b.edge(self.names[i].clone(), self.names[j].clone());
        }
        for (i, j) in other.non_loop_edges() {
            b.edge(format!("{prefix}{}", other.names[i]), format!("{prefix}{}", other.names[j]));
        }
        b.build()
    }

    /// Copy with every loop removed.
    pub fn without_loops(&self) -> Graph {
        let mut b = GraphBuilder::new();
        for i in 0..self.n() {
            b.vertex(self.names[i].clone(), false);
        }
        for (i, j) in self.non_loop_edges() {
            b.edge(self.names[i].clone(), self.names[j].clone());
        }
        b.build().expect("valid graph")
    }

    /// Copy of the graph with selected non-loop edges removed.
    pub fn without_edges(&self, drop: &[(usize, usize)]) -> Graph {
        let drop: BTreeSet<(usize, usize)> =
            drop.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let mut b = GraphBuilder::new();
        for i in 0..self.n() {
            b.vertex(self.names[i].clone(), self.looped[i]);
        }
        for (i, j) in self.non_loop_edges() {
            if !drop.contains(&(i, j)) {
                b.edge(self.names[i].clone(), self.names[j].clone());
            }
        }
        b.build().expect("valid graph")
    }

    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        for i in 0..self.n() {
            b.vertex(self.names[i].clone(), self.looped[i]);
        }
        for (i, j) in self.non_loop_edges() {
            b.edge(self.names[i].clone(), self.names[j].clone());
        }
        b
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph{{")?;
        for i in 0..self.n() {
            write!(f, "{}{} ", self.names[i], if self.looped[i] { "*" } else { "" })?;
        }
        write!(f, "|")?;
        for (i, j) in self.non_loop_edges() {
            write!(f, " {}-{}", self.names[i], self.names[j])?;
        }
        write!(f, "}}")
    }
}

/// Name-level wrapper returning (Γ(u), Γ²(u)).
pub fn neighborhoods(h: &Graph, u: &str) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
    let i = h.require(u)?;
    Ok((h.names_of(&h.gamma(i)), h.names_of(&h.gamma2(i))))
}

/// Directed graph; `(v, v)` arcs are loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    out: Vec<Vec<usize>>,
}

impl DiGraph {
    pub fn new<S: AsRef<str>>(vertices: &[S], arcs: &[(S, S)]) -> Result<DiGraph> {
        let set: BTreeSet<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        if set.len() != vertices.len() {
            return invalid("duplicate vertex in digraph");
        }
        let names: Vec<String> = set.into_iter().collect();
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut out = vec![Vec::new(); names.len()];
        for (a, b) in arcs {
            let i = *index.get(a.as_ref()).ok_or_else(|| Error::UnknownVertex(a.as_ref().into()))?;
            let j = *index.get(b.as_ref()).ok_or_else(|| Error::UnknownVertex(b.as_ref().into()))?;
            out[i].push(j);
        }
        for o in out.iter_mut() {
            o.sort_unstable();
            o.dedup();
        }
        Ok(DiGraph { names, index, out })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn out(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.out[i].binary_search(&j).is_ok()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for (i, o) in self.out.iter().enumerate() {
            for &j in o {
                v.push((i, j));
            }
        }
        v
    }
}

/// Irreflexive pattern plus per-vertex lists over a target's vertex ids.
/// A `None` list is the full target vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListedInstance {
    pub pattern: Graph,
    lists: Vec<Option<BTreeSet<String>>>,
    pub target_size: usize,
}

impl ListedInstance {
    /// All lists full.
    pub fn full(pattern: Graph, target: &Graph) -> Result<ListedInstance> {
        Self::new(pattern, &BTreeMap::new(), target)
    }

    pub fn new(
        pattern: Graph,
        lists: &BTreeMap<String, BTreeSet<String>>,
        target: &Graph,
    ) -> Result<ListedInstance> {
        if !pattern.is_irreflexive() {
            return invalid("pattern graph must be irreflexive");
        }
        let mut out = vec![None; pattern.n()];
        for (v, l) in lists {
            let i = pattern.require(v)?;
            for t in l {
                target.require(t)?;
            }
            out[i] = Some(l.clone());
        }
        Ok(ListedInstance { pattern, lists: out, target_size: target.n() })
    }

    /// Replaces the list of vertex `v` (pattern index).
    pub fn set_list(&mut self, v: usize, list: Option<BTreeSet<String>>) {
        self.lists[v] = list;
    }

    pub fn list(&self, v: usize) -> Option<&BTreeSet<String>> {
        self.lists[v].as_ref()
    }

    pub fn lists_map(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut m = BTreeMap::new();
        for (i, l) in self.lists.iter().enumerate() {
            if let Some(l) = l {
                m.insert(self.pattern.name(i).to_string(), l.clone());
            }
        }
        m
    }

    /// Lists as bitmasks over `target` indices.
    pub fn list_masks(&self, target: &Graph) -> Result<Vec<u64>> {
        if target.n() > 64 {
            return Err(Error::Bound(format!("target has {} vertices (limit 64)", target.n())));
        }
        let full = if target.n() == 64 { u64::MAX } else { (1u64 << target.n()) - 1 };
        self.lists
            .iter()
            .map(|l| match l {
                None => Ok(full),
                Some(s) => {
                    let mut m = 0u64;
                    for t in s {
                        m |= 1u64 << target.require(t)?;
                    }
                    Ok(m)
                }
            })
            .collect()
    }

    /// Every list has size 1 or the full target size.
    pub fn is_retraction_shaped(&self) -> bool {
        self.lists.iter().all(|l| match l {
            None => true,
            Some(s) => s.len() == 1 || s.len() == self.target_size,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coupling {
    CompleteBipartite,
    PerfectMatching,
    Apex,
}

impl Coupling {
    pub fn tag(self) -> &'static str {
        match self {
            Coupling::CompleteBipartite => "cb",
            Coupling::PerfectMatching => "pm",
            Coupling::Apex => "apex",
        }
    }

    pub fn from_tag(s: &str) -> Option<Coupling> {
        match s {
            "cb" => Some(Coupling::CompleteBipartite),
            "pm" => Some(Coupling::PerfectMatching),
            "apex" => Some(Coupling::Apex),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub id: String,
    pub mult: u64,
    pub list: Option<BTreeSet<String>>,
}

/// Compressed instance: independent blocks of interchangeable vertices joined
/// by whole-block couplings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockedInstance {
    pub blocks: Vec<Block>,
    pub couplings: Vec<(String, String, Coupling)>,
    pub pins: BTreeMap<String, String>,
}

impl BlockedInstance {
    pub fn add_block(&mut self, id: impl Into<String>, mult: u64) -> &mut Self {
        self.blocks.push(Block { id: id.into(), mult, list: None });
        self
    }

    pub fn couple(&mut self, a: impl Into<String>, b: impl Into<String>, c: Coupling) -> &mut Self {
        self.couplings.push((a.into(), b.into(), c));
        self
    }

    pub fn pin(&mut self, a: impl Into<String>, t: impl Into<String>) -> &mut Self {
        self.pins.insert(a.into(), t.into());
        self
    }

    pub fn block_index(&self) -> HashMap<&str, usize> {
        self.blocks.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let idx = self.block_index();
        if idx.len() != self.blocks.len() {
            return invalid("duplicate block id");
        }
        for b in &self.blocks {
            if b.mult == 0 {
                return invalid(format!("block `{}` has multiplicity 0", b.id));
            }
        }
        for (a, b, c) in &self.couplings {
            let ia = *idx.get(a.as_str()).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *idx.get(b.as_str()).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if ia == ib {
                return invalid(format!("block `{a}` coupled to itself"));
            }
            let (ma, mb) = (self.blocks[ia].mult, self.blocks[ib].mult);
            match c {
                Coupling::PerfectMatching if ma != mb => {
                    return invalid(format!(
                        "perfect matching between `{a}` ({ma}) and `{b}` ({mb})"
                    ))
                }
                Coupling::Apex if ma != 1 && mb != 1 => {
                    return invalid(format!("apex coupling `{a}`-`{b}` needs a singleton side"))
                }
                _ => {}
            }
        }
        for p in self.pins.keys() {
            if !idx.contains_key(p.as_str()) {
                return Err(Error::UnknownVertex(p.clone()));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> u128 {
        self.blocks.iter().map(|b| b.mult as u128).sum()
    }

    /// Explicit vertex names of a block: the id itself for singletons,
    /// `id#k` otherwise.
    pub fn member_names(b: &Block) -> Vec<String> {
        if b.mult == 1 {
            vec![b.id.clone()]
        } else {
            (0..b.mult).map(|k| format!("{}#{k}", b.id)).collect()
        }
    }

    /// Effective list of a block: its list intersected with its pin.
    pub fn effective_list(&self, i: usize) -> Option<BTreeSet<String>> {
        let b = &self.blocks[i];
        match (self.pins.get(&b.id), &b.list) {
            (None, l) => l.clone(),
            (Some(p), None) => Some(BTreeSet::from([p.clone()])),
            (Some(p), Some(l)) => {
                Some(l.iter().filter(|x| *x == p).cloned().collect())
            }
        }
    }

    /// Expands into an explicit listed instance (at most `limit` vertices).
    pub fn expand(&self, target: &Graph, limit: u128) -> Result<ListedInstance> {
        self.validate()?;
        if self.vertex_count() > limit {
            return Err(Error::Bound(format!(
                "expansion has {} vertices (limit {limit})",
                self.vertex_count()
            )));
        }
        let idx = self.block_index();
        let members: Vec<Vec<String>> = self.blocks.iter().map(Self::member_names).collect();
        let mut b = GraphBuilder::new();
        for m in &members {
            for v in m {
                b.vertex(v.clone(), false);
            }
        }
        for (x, y, c) in &self.couplings {
            let (ix, iy) = (idx[x.as_str()], idx[y.as_str()]);
            match c {
                Coupling::PerfectMatching => {
                    for (u, v) in members[ix].iter().zip(&members[iy]) {
                        b.edge(u.clone(), v.clone());
                    }
                }
                Coupling::CompleteBipartite | Coupling::Apex => {
                    for u in &members[ix] {
                        for v in &members[iy] {
                            b.edge(u.clone(), v.clone());
                        }
                    }
                }
            }
        }
        let pattern = b.build()?;
        let mut lists = BTreeMap::new();
        for (i, m) in members.iter().enumerate() {
            if let Some(l) = self.effective_list(i) {
                for v in m {
                    lists.insert(v.clone(), l.clone());
                }
            }
        }
        ListedInstance::new(pattern, &lists, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, looped: bool) -> Graph {
        let vs: Vec<(String, bool)> = (0..n).map(|i| (format!("v{i}"), looped)).collect();
        let es: Vec<(String, String)> =
            (0..n).map(|i| (format!("v{i}"), format!("v{}", (i + 1) % n))).collect();
        Graph::from_parts(&vs, &es).unwrap()
    }

    #[test]
    fn girth_basics() {
        assert_eq!(cycle(5, false).girth(), Some(5));
        let p3 = Graph::from_parts(&[("a", true), ("b", true), ("c", true)], &[("a", "b"), ("b", "c")])
            .unwrap();
        assert_eq!(p3.girth(), None);
        let mut b = Graph::builder();
        for v in ["a", "b", "c", "d"] {
            b.vertex(v, false);
        }
        for (x, y) in [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")] {
            b.edge(x, y);
        }
        assert_eq!(b.build().unwrap().girth(), Some(3));
    }

    #[test]
    fn neighbourhoods_of_k2() {
        let k2 = Graph::from_parts(&[("a", false), ("b", false)], &[("a", "b")]).unwrap();
        let (g1, g2) = neighborhoods(&k2, "a").unwrap();
        assert_eq!(g1, BTreeSet::from(["b".to_string()]));
        assert_eq!(g2, BTreeSet::from(["a".to_string()]));
        let iso = Graph::from_parts(&[("z", false)], &[]).unwrap();
        let (g1, g2) = neighborhoods(&iso, "z").unwrap();
        assert!(g1.is_empty() && g2.is_empty());
    }

    #[test]
    fn undeclared_endpoint_is_rejected() {
        assert!(matches!(
            Graph::from_parts(&[("a", false)], &[("a", "c")]),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn components_in_id_order() {
        let g = Graph::from_parts(&[("b", false), ("a", false), ("c", true)], &[("a", "b")]).unwrap();
        let cs = g.components();
        assert_eq!(cs, vec![vec![0, 1], vec![2]]);
        assert!(Graph::empty().components().is_empty());
    }

    #[test]
    fn single_block_expands_to_isolated_vertices() {
        let mut b = BlockedInstance::default();
        b.add_block("X", 3);
        let t = Graph::from_parts(&[("a", false)], &[]).unwrap();
        let e = b.expand(&t, 100).unwrap();
        assert_eq!(e.pattern.n(), 3);
        assert!(e.pattern.non_loop_edges().is_empty());
    }

    #[test]
    fn unequal_matching_is_rejected() {
        let mut b = BlockedInstance::default();
        b.add_block("X", 2).add_block("Y", 3).couple("X", "Y", Coupling::PerfectMatching);
        assert!(b.validate().is_err());
    }
}

//! Exact counters for homomorphisms, list homomorphisms, retractions,
//! surjective homomorphisms and compactions.
//!
//! Target vertex sets are `u64` bitmasks, so targets have at most 64
//! vertices. Patterns are unrestricted in size.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, ListedInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    Hom,
    ListHom,
    Retraction,
    Surjective,
    Compaction,
}

impl CountMode {
    pub fn parse(s: &str) -> Option<CountMode> {
        match s {
            "hom" => Some(CountMode::Hom),
            "lhom" | "list-hom" => Some(CountMode::ListHom),
            "ret" | "retraction" => Some(CountMode::Retraction),
            "sur" | "surjective" => Some(CountMode::Surjective),
            "comp" | "compaction" => Some(CountMode::Compaction),
            _ => None,
        }
    }
}

/// Pattern adjacency (by index) with per-vertex domains as bitmasks.
#[derive(Clone, Debug)]
pub struct Problem {
    pub adj: Vec<Vec<usize>>,
    pub doms: Vec<u64>,
}

/// Target adjacency as bitmasks.
#[derive(Clone, Debug)]
pub struct Target {
    pub n: usize,
    pub adj: Vec<u64>,
}

impl Target {
    pub fn new(h: &Graph) -> Result<Target> {
        Ok(Target { n: h.n(), adj: h.adj_masks()? })
    }

    pub fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    #[inline]
    pub fn support(&self, dom: u64) -> u64 {
        let mut s = 0u64;
        let mut d = dom;
        while d != 0 {
            let x = d.trailing_zeros() as usize;
            d &= d - 1;
            s |= self.adj[x];
        }
        s
    }

    /// Non-loop edges as index pairs `(a, b)` with `a < b`.
    pub fn non_loop_edges(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.adj[a] >> b & 1 == 1 {
                    v.push((a, b));
                }
            }
        }
        v
    }

    pub fn without_edges(&self, drop: &[(usize, usize)]) -> Target {
        let mut adj = self.adj.clone();
        for &(a, b) in drop {
            adj[a] &= !(1u64 << b);
            adj[b] &= !(1u64 << a);
        }
        Target { n: self.n, adj }
    }
}

impl Problem {
    pub fn new(inst: &ListedInstance, target: &Graph) -> Result<Problem> {
        let doms = inst.list_masks(target)?;
        let adj = (0..inst.pattern.n()).map(|i| inst.pattern.neighbors(i).to_vec()).collect();
        Ok(Problem { adj, doms })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Induced sub-problem on `vars` (indices re-numbered in the given order).
    pub fn restrict(&self, vars: &[usize]) -> Problem {
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &v) in vars.iter().enumerate() {
            pos[v] = k;
        }
        let adj = vars
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&u| pos[u] != usize::MAX).map(|&u| pos[u]).collect())
            .collect();
        let doms = vars.iter().map(|&v| self.doms[v]).collect();
        Problem { adj, doms }
    }

    /// Connected components of the pattern.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.n()).collect();
        let mut mark = vec![false; self.n()];
        components_within(&self.adj, &all, &mut mark)
    }
}

fn components_within(adj: &[Vec<usize>], vars: &[usize], mark: &mut [bool]) -> Vec<Vec<usize>> {
    let mut inset = vec![false; adj.len()];
    for &v in vars {
        inset[v] = true;
    }
    for &v in vars {
        mark[v] = false;
    }
    let mut out = Vec::new();
    for &s in vars {
        if mark[s] {
            continue;
        }
        mark[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let x = comp[k];
            k += 1;
            for &y in &adj[x] {
                if inset[y] && !mark[y] {
                    mark[y] = true;
                    comp.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Arc consistency over the pattern edges among `vars`. Returns false on a
/// domain wipe-out.
fn arc_consistency(adj: &[Vec<usize>], t: &Target, doms: &mut [u64], vars: &[usize], inset: &[bool]) -> bool {
    loop {
        let mut changed = false;
        for &u in vars {
            for &w in &adj[u] {
                if !inset[w] {
                    continue;
                }
                let nd = doms[u] & t.support(doms[w]);
                if nd != doms[u] {
                    if nd == 0 {
                        doms[u] = 0;
                        return false;
                    }
                    doms[u] = nd;
                    changed = true;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn inset_of(n: usize, vars: &[usize]) -> Vec<bool> {
    let mut v = vec![false; n];
    for &x in vars {
        v[x] = true;
    }
    v
}

struct Counter<'a> {
    adj: &'a [Vec<usize>],
    t: &'a Target,
}

impl Counter<'_> {
    /// Counts extensions of the current domains over `vars`; domains of
    /// `vars` must already be arc consistent and forward checked against
    /// every assigned variable.
    fn solve(&self, doms: &[u64], vars: &[usize]) -> BigUint {
        if vars.is_empty() {
            return BigUint::one();
        }
        let mut mark = vec![false; self.adj.len()];
        let comps = components_within(self.adj, vars, &mut mark);
        if comps.len() > 1 {
            let mut acc = BigUint::one();
            for c in comps {
                let v = self.solve_connected(doms, &c);
                if v.is_zero() {
                    return v;
                }
                acc *= v;
            }
            return acc;
        }
        self.solve_connected(doms, vars)
    }

    fn solve_connected(&self, doms: &[u64], vars: &[usize]) -> BigUint {
        if vars.len() == 1 {
            return BigUint::from(doms[vars[0]].count_ones());
        }
        let v = *vars
            .iter()
            .min_by_key(|&&v| (doms[v].count_ones(), v))
            .expect("nonempty");
        let rest: Vec<usize> = vars.iter().copied().filter(|&u| u != v).collect();
        let inset = inset_of(self.adj.len(), &rest);
        let mut total = BigUint::zero();
        let mut d = doms[v];
        while d != 0 {
            let x = d.trailing_zeros() as usize;
            d &= d - 1;
            let mut nd = doms.to_vec();
            nd[v] = 1u64 << x;
            let mut ok = true;
            for &u in &self.adj[v] {
                if inset[u] {
                    nd[u] &= self.t.adj[x];
                    if nd[u] == 0 {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && arc_consistency(self.adj, self.t, &mut nd, &rest, &inset) {
                total += self.solve(&nd, &rest);
            }
        }
        total
    }
}

/// Backtracking count of list homomorphisms (most-constrained-first,
/// arc consistency, dynamic splitting into independent components).
pub fn count_problem(p: &Problem, t: &Target) -> BigUint {
    let n = p.n();
    let vars: Vec<usize> = (0..n).collect();
    let mut doms = p.doms.clone();
    let inset = vec![true; n];
    if doms.iter().any(|d| *d == 0) && n > 0 {
        return BigUint::zero();
    }
    if !arc_consistency(&p.adj, t, &mut doms, &vars, &inset) {
        return BigUint::zero();
    }
    Counter { adj: &p.adj, t }.solve(&doms, &vars)
}

/// Raw backtracking count without target decomposition.
pub fn count_backtrack(inst: &ListedInstance, target: &Graph) -> Result<BigUint> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    Ok(count_problem(&p, &t))
}

/// Exact |H((G,S),H)|, via [`decompose_and_count`].
pub fn count_list_hom(inst: &ListedInstance, target: &Graph) -> Result<BigUint> {
    decompose_and_count(inst, target, CountMode::ListHom)
}

pub fn count_hom(pattern: &Graph, target: &Graph) -> Result<BigUint> {
    let inst = ListedInstance::full(pattern.clone(), target)?;
    decompose_and_count(&inst, target, CountMode::Hom)
}

pub fn count_retraction(inst: &ListedInstance, target: &Graph) -> Result<BigUint> {
    if inst.target_size != target.n() {
        return invalid("instance was built for a different target");
    }
    if !inst.is_retraction_shaped() {
        return invalid("retraction lists must have size 1 or |V(H)|");
    }
    decompose_and_count(inst, target, CountMode::Retraction)
}

/// Product over pattern components; within a connected component, sum over
/// target components with lists restricted to each.
pub fn decompose_and_count(inst: &ListedInstance, target: &Graph, mode: CountMode) -> Result<BigUint> {
    let mut p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    match mode {
        CountMode::Hom => p.doms.iter_mut().for_each(|d| *d = t.full()),
        CountMode::ListHom | CountMode::Retraction => {}
        _ => return invalid("decomposition applies to hom, list-hom and retraction only"),
    }
    let tcomps: Vec<u64> = target
        .components()
        .iter()
        .map(|c| c.iter().fold(0u64, |m, &i| m | (1u64 << i)))
        .collect();
    let mut acc = BigUint::one();
    for comp in p.components() {
        let sub = p.restrict(&comp);
        let mut s = BigUint::zero();
        for &tc in &tcomps {
            let mut q = sub.clone();
            q.doms.iter_mut().for_each(|d| *d &= tc);
            s += count_problem(&q, &t);
        }
        if s.is_zero() {
            return Ok(s);
        }
        acc *= s;
    }
    Ok(acc)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cover {
    None,
    Vertices,
    VerticesAndEdges,
}

/// Depth-first enumeration of every list homomorphism, optionally pruning
/// branches that can no longer be surjective (or edge-surjective).
pub struct Enumerator<'a> {
    p: &'a Problem,
    t: &'a Target,
    cover: Cover,
    edge_id: Vec<usize>,
    n_edges: usize,
}

struct EnumState {
    doms: Vec<u64>,
    val: Vec<usize>,
    assigned: Vec<bool>,
    vcount: Vec<u32>,
    uncovered_v: usize,
    ecount: Vec<u32>,
    uncovered_e: usize,
    open_edges: usize,
    unassigned: usize,
}

impl<'a> Enumerator<'a> {
    pub fn new(p: &'a Problem, t: &'a Target, cover: Cover) -> Self {
        let mut edge_id = vec![usize::MAX; t.n * t.n];
        let mut n_edges = 0;
        for (a, b) in t.non_loop_edges() {
            edge_id[a * t.n + b] = n_edges;
            edge_id[b * t.n + a] = n_edges;
            n_edges += 1;
        }
        Enumerator { p, t, cover, edge_id, n_edges }
    }

    /// Calls `f` with each homomorphism as a pattern-index → target-index map.
    pub fn for_each<F: FnMut(&[usize])>(&self, mut f: F) {
        let n = self.p.n();
        let mut doms = self.p.doms.clone();
        if n > 0 && doms.iter().any(|d| *d == 0) {
            return;
        }
        let vars: Vec<usize> = (0..n).collect();
        if !arc_consistency(&self.p.adj, self.t, &mut doms, &vars, &vec![true; n]) {
            return;
        }
        let open_edges = self.p.adj.iter().map(|a| a.len()).sum::<usize>() / 2;
        let mut st = EnumState {
            doms,
            val: vec![usize::MAX; n],
            assigned: vec![false; n],
            vcount: vec![0; self.t.n],
            uncovered_v: self.t.n,
            ecount: vec![0; self.n_edges],
            uncovered_e: self.n_edges,
            open_edges,
            unassigned: n,
        };
        if self.pruned(&st) {
            return;
        }
        self.rec(&mut st, &mut f);
    }

    pub fn count(&self) -> BigUint {
        let mut c: u128 = 0;
        self.for_each(|_| c += 1);
        BigUint::from(c)
    }

    fn pruned(&self, st: &EnumState) -> bool {
        match self.cover {
            Cover::None => false,
            Cover::Vertices => st.uncovered_v > st.unassigned,
            Cover::VerticesAndEdges => {
                st.uncovered_v > st.unassigned || st.uncovered_e > st.open_edges
            }
        }
    }

    fn complete(&self, st: &EnumState) -> bool {
        match self.cover {
            Cover::None => true,
            Cover::Vertices => st.uncovered_v == 0,
            Cover::VerticesAndEdges => st.uncovered_v == 0 && st.uncovered_e == 0,
        }
    }

    fn rec<F: FnMut(&[usize])>(&self, st: &mut EnumState, f: &mut F) {
        if st.unassigned == 0 {
            if self.complete(st) {
                f(&st.val);
            }
            return;
        }
        let n = self.p.n();
        let v = (0..n)
            .filter(|&v| !st.assigned[v])
            .min_by_key(|&v| (st.doms[v].count_ones(), v))
            .expect("unassigned variable");
        let saved = st.doms.clone();
        let mut d = st.doms[v];
        while d != 0 {
            let x = d.trailing_zeros() as usize;
            d &= d - 1;
            // assign
            st.assigned[v] = true;
            st.val[v] = x;
            st.unassigned -= 1;
            st.vcount[x] += 1;
            if st.vcount[x] == 1 {
                st.uncovered_v -= 1;
            }
            let mut closed = 0;
            for &u in &self.p.adj[v] {
                if st.assigned[u] {
                    closed += 1;
                    let y = st.val[u];
                    if x != y && self.n_edges > 0 {
                        let e = self.edge_id[x * self.t.n + y];
                        st.ecount[e] += 1;
                        if st.ecount[e] == 1 {
                            st.uncovered_e -= 1;
                        }
                    }
                }
            }
            st.open_edges -= closed;
            st.doms[v] = 1u64 << x;
            let mut ok = true;
            for &u in &self.p.adj[v] {
                if !st.assigned[u] {
                    st.doms[u] &= self.t.adj[x];
                    if st.doms[u] == 0 {
                        ok = false;
                    }
                }
            }
            if ok {
                let rest: Vec<usize> = (0..n).filter(|&u| !st.assigned[u]).collect();
                let inset = inset_of(n, &rest);
                ok = arc_consistency(&self.p.adj, self.t, &mut st.doms, &rest, &inset);
            }
            if ok && !self.pruned(st) {
                self.rec(st, f);
            }
            // undo
            st.doms.copy_from_slice(&saved);
            st.open_edges += closed;
            for &u in &self.p.adj[v] {
                if st.assigned[u] {
                    let y = st.val[u];
                    if x != y && self.n_edges > 0 {
                        let e = self.edge_id[x * self.t.n + y];
                        st.ecount[e] -= 1;
                        if st.ecount[e] == 0 {
                            st.uncovered_e += 1;
                        }
                    }
                }
            }
            st.vcount[x] -= 1;
            if st.vcount[x] == 0 {
                st.uncovered_v += 1;
            }
            st.unassigned += 1;
            st.val[v] = usize::MAX;
            st.assigned[v] = false;
        }
    }
}

pub fn for_each_hom<F: FnMut(&[usize])>(inst: &ListedInstance, target: &Graph, f: F) -> Result<()> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    Enumerator::new(&p, &t, Cover::None).for_each(f);
    Ok(())
}

/// Enumerate-and-test surjective homomorphism count.
pub fn count_surjective(inst: &ListedInstance, target: &Graph) -> Result<BigUint> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    Ok(Enumerator::new(&p, &t, Cover::Vertices).count())
}

/// Enumerate-and-test compaction count.
pub fn count_compaction(inst: &ListedInstance, target: &Graph) -> Result<BigUint> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    Ok(Enumerator::new(&p, &t, Cover::VerticesAndEdges).count())
}

fn to_biguint(x: BigInt) -> Result<BigUint> {
    match x.sign() {
        Sign::Minus => Err(Error::Invalid("negative inclusion-exclusion total".into())),
        _ => Ok(x.magnitude().clone()),
    }
}

/// Surjective count by inclusion–exclusion over the image set W ⊆ V(H).
pub fn count_surjective_ie(inst: &ListedInstance, target: &Graph) -> Result<BigUint> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    Ok(surjective_ie(&p, &t))
}

pub fn surjective_ie(p: &Problem, t: &Target) -> BigUint {
    let n = t.n;
    let mut total = BigInt::zero();
    for w in 0u64..(1u64 << n) {
        let mut q = p.clone();
        q.doms.iter_mut().for_each(|d| *d &= w);
        let c = BigInt::from(count_problem(&q, t));
        if (n - w.count_ones() as usize) % 2 == 0 {
            total += c;
        } else {
            total -= c;
        }
    }
    to_biguint(total).expect("inclusion-exclusion is nonnegative")
}

/// Compaction count by inclusion–exclusion over pairs (W, F): W ⊆ V(H) and
/// F a set of non-loop edges removed from H[W]. Terms whose W misses an
/// endpoint of some non-loop edge cancel in pairs, so only W containing
/// every such endpoint are summed; for those, F ranges over all non-loop
/// edges of H.
pub fn count_compaction_ie(inst: &ListedInstance, target: &Graph) -> Result<BigUint> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    Ok(compaction_ie(&p, &t))
}

pub fn compaction_ie(p: &Problem, t: &Target) -> BigUint {
    let n = t.n;
    let edges = t.non_loop_edges();
    let must: u64 = edges.iter().fold(0, |m, &(a, b)| m | (1 << a) | (1 << b));
    let mut total = BigInt::zero();
    let mut cache: HashMap<u64, Target> = HashMap::new();
    for w in 0u64..(1u64 << n) {
        if w & must != must {
            continue;
        }
        for f in 0u64..(1u64 << edges.len()) {
            let tf = cache.entry(f).or_insert_with(|| {
                let drop: Vec<(usize, usize)> = edges
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| f >> i & 1 == 1)
                    .map(|(_, e)| *e)
                    .collect();
                t.without_edges(&drop)
            });
            let mut q = p.clone();
            q.doms.iter_mut().for_each(|d| *d &= w);
            let c = BigInt::from(count_problem(&q, tf));
            if ((n - w.count_ones() as usize) + f.count_ones() as usize) % 2 == 0 {
                total += c;
            } else {
                total -= c;
            }
        }
    }
    to_biguint(total).expect("inclusion-exclusion is nonnegative")
}

/// Brute force over all |V(H)|^|V(G)| maps. Used as a reference oracle.
pub fn count_naive(inst: &ListedInstance, target: &Graph, mode: CountMode) -> Result<BigUint> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    let n = p.n();
    let k = t.n;
    if (k as f64).powi(n as i32) > 5e7 {
        return Err(Error::Bound("naive enumeration too large".into()));
    }
    if mode == CountMode::Retraction && !inst.is_retraction_shaped() {
        return invalid("retraction lists must have size 1 or |V(H)|");
    }
    if n > 0 && k == 0 {
        return Ok(BigUint::zero());
    }
    let edges = inst.pattern.non_loop_edges();
    let tedges = t.non_loop_edges();
    let mut map = vec![0usize; n];
    let mut count: u64 = 0;
    loop {
        let lists_ok = mode == CountMode::Hom || (0..n).all(|v| p.doms[v] >> map[v] & 1 == 1);
        let edges_ok = edges.iter().all(|&(a, b)| t.adj[map[a]] >> map[b] & 1 == 1);
        if lists_ok && edges_ok {
            let ok = match mode {
                CountMode::Surjective => (0..k).all(|x| map.contains(&x)),
                CountMode::Compaction => {
                    (0..k).all(|x| map.contains(&x))
                        && tedges.iter().all(|&(x, y)| {
                            edges.iter().any(|&(a, b)| {
                                (map[a] == x && map[b] == y) || (map[a] == y && map[b] == x)
                            })
                        })
                }
                _ => true,
            };
            if ok {
                count += 1;
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return Ok(BigUint::from(count));
            }
            map[i] += 1;
            if map[i] < k {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

/// Dispatch by mode using the default methods.
pub fn count_mode(inst: &ListedInstance, target: &Graph, mode: CountMode) -> Result<BigUint> {
    match mode {
        CountMode::Hom | CountMode::ListHom => decompose_and_count(inst, target, mode),
        CountMode::Retraction => count_retraction(inst, target),
        CountMode::Surjective => count_surjective(inst, target),
        CountMode::Compaction => count_compaction(inst, target),
    }
}

/// Number of surjections from an a-set onto a b-set.
pub fn stirling_surjections(a: u64, b: u64) -> BigUint {
    let mut total = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=b {
        let term = &binom * BigInt::from(num_traits::pow(BigUint::from(b - j), a as usize));
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        binom = binom * BigInt::from(b - j) / BigInt::from(j + 1);
    }
    to_biguint(total).expect("surjection count is nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::from_parts(&[("a", false), ("b", false)], &[("a", "b")]).unwrap()
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling_surjections(3, 2), BigUint::from(6u32));
        assert_eq!(stirling_surjections(2, 3), BigUint::zero());
        assert_eq!(stirling_surjections(4, 2), BigUint::from(14u32));
        assert_eq!(stirling_surjections(0, 0), BigUint::one());
    }

    #[test]
    fn k2_into_k2() {
        let g = k2();
        assert_eq!(count_hom(&g, &g).unwrap(), BigUint::from(2u32));
        let inst = ListedInstance::full(g.clone(), &g).unwrap();
        assert_eq!(count_surjective(&inst, &g).unwrap(), BigUint::from(2u32));
        assert_eq!(count_compaction(&inst, &g).unwrap(), BigUint::from(2u32));
        assert_eq!(count_surjective_ie(&inst, &g).unwrap(), BigUint::from(2u32));
        assert_eq!(count_compaction_ie(&inst, &g).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn empty_pattern_counts_one() {
        let h = k2();
        assert_eq!(count_hom(&Graph::empty(), &h).unwrap(), BigUint::one());
    }

    #[test]
    fn target_components_sum() {
        let h = Graph::from_parts(&[("a", false), ("b", false), ("z", true)], &[("a", "b")]).unwrap();
        assert_eq!(count_hom(&k2(), &h).unwrap(), BigUint::from(3u32));
    }
}

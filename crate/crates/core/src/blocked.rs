//! Counting list homomorphisms of blocked instances without expanding them.
//!
//! Blocks joined by perfect matchings form groups of identical strands.
//! Groups of multiplicity 1 are ordinary vertices ("small"). Each larger
//! group contributes `f^m` where `f` counts one strand; groups tied together
//! by complete-bipartite couplings are counted by enumerating the image set
//! of every such block and inverting over the subset lattice.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::count::{count_problem, Cover, Enumerator, Problem, Target};
use crate::error::{Error, Result};
use crate::graph::{BlockedInstance, Coupling, Graph};

/// Largest total image-domain size enumerated for one coupled cluster.
pub const IMAGE_BITS_LIMIT: u32 = 20;

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

struct StrandGroup {
    blocks: Vec<usize>,
    mult: u64,
    adj: Vec<Vec<usize>>,
}

struct Cluster {
    groups: Vec<usize>,
    image: Vec<usize>,
    cb: Vec<(usize, usize)>,
}

struct Plan {
    t: Target,
    base: Vec<u64>,
    small: Vec<usize>,
    small_pos: Vec<usize>,
    small_adj: Vec<Vec<usize>>,
    restrict: Vec<Vec<usize>>,
    interface: Vec<usize>,
    groups: Vec<StrandGroup>,
    clusters: Vec<Cluster>,
}

fn plan(b: &BlockedInstance, target: &Graph) -> Result<Plan> {
    b.validate()?;
    let t = Target::new(target)?;
    let nb = b.blocks.len();
    let idx = b.block_index();
    let mut base = Vec::with_capacity(nb);
    for i in 0..nb {
        let m = match b.effective_list(i) {
            None => t.full(),
            Some(l) => {
                let mut m = 0u64;
                for x in &l {
                    m |= 1u64 << target.require(x)?;
                }
                m
            }
        };
        base.push(m);
    }
    if let Some(p) = b.pins.values().find(|p| target.index_of(p).is_none()) {
        return Err(Error::UnknownVertex(p.clone()));
    }
    let mut dsu = Dsu::new(nb);
    for (x, y, c) in &b.couplings {
        if *c == Coupling::PerfectMatching {
            dsu.union(idx[x.as_str()], idx[y.as_str()]);
        }
    }
    let mut root_group: HashMap<usize, usize> = HashMap::new();
    let mut groups: Vec<StrandGroup> = Vec::new();
    let mut group_of = vec![usize::MAX; nb];
    for i in 0..nb {
        let r = dsu.find(i);
        let g = *root_group.entry(r).or_insert_with(|| {
            groups.push(StrandGroup { blocks: Vec::new(), mult: b.blocks[i].mult, adj: Vec::new() });
            groups.len() - 1
        });
        group_of[i] = g;
        groups[g].blocks.push(i);
    }
    let is_small: Vec<bool> = (0..nb).map(|i| groups[group_of[i]].mult == 1).collect();
    let small: Vec<usize> = (0..nb).filter(|&i| is_small[i]).collect();
    let mut small_pos = vec![usize::MAX; nb];
    for (k, &i) in small.iter().enumerate() {
        small_pos[i] = k;
    }
    let mut small_adj = vec![Vec::new(); small.len()];
    let mut restrict = vec![Vec::new(); nb];
    let mut large_cb: Vec<(usize, usize)> = Vec::new();
    for g in groups.iter_mut() {
        g.adj = vec![Vec::new(); g.blocks.len()];
    }
    for (x, y, c) in &b.couplings {
        let (i, j) = (idx[x.as_str()], idx[y.as_str()]);
        match (is_small[i], is_small[j]) {
            (true, true) => {
                let (a, c2) = (small_pos[i], small_pos[j]);
                small_adj[a].push(c2);
                small_adj[c2].push(a);
            }
            (true, false) => restrict[j].push(i),
            (false, true) => restrict[i].push(j),
            (false, false) => match c {
                Coupling::PerfectMatching => {
                    let g = &mut groups[group_of[i]];
                    let pi = g.blocks.iter().position(|&q| q == i).expect("member");
                    let pj = g.blocks.iter().position(|&q| q == j).expect("member");
                    g.adj[pi].push(pj);
                    g.adj[pj].push(pi);
                }
                Coupling::CompleteBipartite => large_cb.push((i, j)),
                Coupling::Apex => unreachable!("validated: apex has a singleton side"),
            },
        }
    }
    for a in small_adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let mut interface: Vec<usize> = restrict.iter().flatten().copied().collect();
    interface.sort_unstable();
    interface.dedup();

    let ng = groups.len();
    let mut gd = Dsu::new(ng);
    for &(i, j) in &large_cb {
        gd.union(group_of[i], group_of[j]);
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut root_cluster: HashMap<usize, usize> = HashMap::new();
    for g in 0..ng {
        if groups[g].mult == 1 {
            continue;
        }
        let r = gd.find(g);
        let c = *root_cluster.entry(r).or_insert_with(|| {
            clusters.push(Cluster { groups: Vec::new(), image: Vec::new(), cb: Vec::new() });
            clusters.len() - 1
        });
        clusters[c].groups.push(g);
    }
    for &(i, j) in &large_cb {
        let c = root_cluster[&gd.find(group_of[i])];
        let cl = &mut clusters[c];
        for x in [i, j] {
            if !cl.image.contains(&x) {
                cl.image.push(x);
            }
        }
        cl.cb.push((i, j));
    }
    for cl in clusters.iter_mut() {
        cl.image.sort_unstable();
    }
    Ok(Plan { t, base, small, small_pos, small_adj, restrict, interface, groups, clusters })
}

struct PowCache(HashMap<(u128, u64), BigUint>);

impl PowCache {
    fn pow(&mut self, f: &BigUint, m: u64) -> BigUint {
        match u128::try_from(f) {
            Ok(k) => self
                .0
                .entry((k, m))
                .or_insert_with(|| num_traits::pow(f.clone(), m as usize))
                .clone(),
            Err(_) => num_traits::pow(f.clone(), m as usize),
        }
    }
}

impl Plan {
    fn strand_count(&self, g: usize, doms: &[u64]) -> BigUint {
        let grp = &self.groups[g];
        let p = Problem { adj: grp.adj.clone(), doms: grp.blocks.iter().map(|&i| doms[i]).collect() };
        count_problem(&p, &self.t)
    }

    fn cluster_count(&self, c: usize, doms: &[u64], pc: &mut PowCache) -> Result<BigUint> {
        let cl = &self.clusters[c];
        if cl.image.is_empty() {
            let mut acc = BigUint::one();
            for &g in &cl.groups {
                let f = self.strand_count(g, doms);
                acc *= pc.pow(&f, self.groups[g].mult);
            }
            return Ok(acc);
        }
        let bits: u32 = cl.image.iter().map(|&i| doms[i].count_ones()).sum();
        if bits > IMAGE_BITS_LIMIT {
            return Err(Error::Bound(format!(
                "coupled cluster needs {bits} image bits (limit {IMAGE_BITS_LIMIT})"
            )));
        }
        // bit layout: image block k owns a contiguous run of its domain's bits
        let mut layout: Vec<Vec<usize>> = Vec::new();
        for &i in &cl.image {
            let mut d = doms[i];
            let mut xs = Vec::new();
            while d != 0 {
                xs.push(d.trailing_zeros() as usize);
                d &= d - 1;
            }
            layout.push(xs);
        }
        let decode = |mask: u64| -> Vec<u64> {
            let mut out = Vec::with_capacity(layout.len());
            let mut off = 0;
            for xs in &layout {
                let mut r = 0u64;
                for (k, &x) in xs.iter().enumerate() {
                    if mask >> (off + k) & 1 == 1 {
                        r |= 1u64 << x;
                    }
                }
                off += xs.len();
                out.push(r);
            }
            out
        };
        let size = 1usize << bits;
        let mut memo: HashMap<(usize, Vec<u64>), BigUint> = HashMap::new();
        let mut a: Vec<BigInt> = Vec::with_capacity(size);
        let mut local = doms.to_vec();
        for mask in 0..size as u64 {
            let rs = decode(mask);
            for (k, &i) in cl.image.iter().enumerate() {
                local[i] = rs[k];
            }
            let mut within = BigUint::one();
            for &g in &cl.groups {
                let key: Vec<u64> = self.groups[g].blocks.iter().map(|&i| local[i]).collect();
                let f = memo
                    .entry((g, key))
                    .or_insert_with(|| self.strand_count(g, &local))
                    .clone();
                within *= pc.pow(&f, self.groups[g].mult);
                if within.is_zero() {
                    break;
                }
            }
            a.push(BigInt::from_biguint(Sign::Plus, within));
        }
        // Möbius inversion: a[R] becomes the count with image exactly R.
        for b in 0..bits {
            let bit = 1usize << b;
            for mask in 0..size {
                if mask & bit != 0 {
                    let lower = a[mask ^ bit].clone();
                    a[mask] -= lower;
                }
            }
        }
        let pos: HashMap<usize, usize> = cl.image.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut total = BigInt::zero();
        for mask in 0..size as u64 {
            if a[mask as usize].is_zero() {
                continue;
            }
            let rs = decode(mask);
            let valid = cl.cb.iter().all(|&(i, j)| {
                let (ri, rj) = (rs[pos[&i]], rs[pos[&j]]);
                let mut d = ri;
                while d != 0 {
                    let x = d.trailing_zeros() as usize;
                    d &= d - 1;
                    if rj & !self.t.adj[x] != 0 {
                        return false;
                    }
                }
                true
            });
            if valid {
                total += &a[mask as usize];
            }
        }
        match total.sign() {
            Sign::Minus => Err(Error::Invalid("negative cluster count".into())),
            _ => Ok(total.magnitude().clone()),
        }
    }

    fn small_problem(&self) -> Problem {
        Problem { adj: self.small_adj.clone(), doms: self.small.iter().map(|&i| self.base[i]).collect() }
    }
}

/// Exact list-homomorphism count of the expansion of `b` into `target`.
pub fn count_blocked(b: &BlockedInstance, target: &Graph) -> Result<BigUint> {
    let pl = plan(b, target)?;
    let small = pl.small_problem();
    if pl.clusters.is_empty() {
        return Ok(count_problem(&small, &pl.t));
    }
    // Interface vertices are the small vertices whose value restricts some
    // large block; enumerate them, then count everything else.
    let iface_pos: Vec<usize> = pl.interface.iter().map(|&i| pl.small_pos[i]).collect();
    let iface_problem = small.restrict(&iface_pos);
    let mut assignments: Vec<Vec<usize>> = Vec::new();
    Enumerator::new(&iface_problem, &pl.t, Cover::None).for_each(|a| assignments.push(a.to_vec()));
    let mut pc = PowCache(HashMap::new());
    let mut cluster_memo: HashMap<(usize, Vec<u64>), BigUint> = HashMap::new();
    let mut total = BigUint::zero();
    for asg in assignments {
        let mut sp = small.clone();
        for (k, &p) in iface_pos.iter().enumerate() {
            sp.doms[p] = 1u64 << asg[k];
        }
        let ext = count_problem(&sp, &pl.t);
        if ext.is_zero() {
            continue;
        }
        let mut doms = pl.base.clone();
        for (i, r) in pl.restrict.iter().enumerate() {
            for &s in r {
                let k = pl.interface.binary_search(&s).expect("interface member");
                doms[i] &= pl.t.adj[asg[k]];
            }
        }
        let mut prod = ext;
        for c in 0..pl.clusters.len() {
            let key: Vec<u64> = pl.clusters[c]
                .groups
                .iter()
                .flat_map(|&g| pl.groups[g].blocks.iter().map(|&i| doms[i]))
                .collect();
            let v = match cluster_memo.get(&(c, key.clone())) {
                Some(v) => v.clone(),
                None => {
                    let v = pl.cluster_count(c, &doms, &mut pc)?;
                    cluster_memo.insert((c, key), v.clone());
                    v
                }
            };
            if v.is_zero() {
                prod = BigUint::zero();
                break;
            }
            prod *= v;
        }
        total += prod;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::count_list_hom;

    fn path3() -> Graph {
        Graph::from_parts(&[("a", false), ("b", true), ("c", false)], &[("a", "b"), ("b", "c")]).unwrap()
    }

    #[test]
    fn single_block_is_a_power() {
        let mut b = BlockedInstance::default();
        b.add_block("X", 5);
        let h = path3();
        assert_eq!(count_blocked(&b, &h).unwrap(), BigUint::from(243u32));
    }

    #[test]
    fn coupled_blocks_match_expansion() {
        let h = path3();
        let mut b = BlockedInstance::default();
        b.add_block("s", 1)
            .add_block("A", 2)
            .add_block("B", 2)
            .add_block("C", 3)
            .couple("A", "B", Coupling::PerfectMatching)
            .couple("B", "C", Coupling::CompleteBipartite)
            .couple("s", "A", Coupling::Apex);
        let e = b.expand(&h, 100).unwrap();
        assert_eq!(count_blocked(&b, &h).unwrap(), count_list_hom(&e, &h).unwrap());
    }
}

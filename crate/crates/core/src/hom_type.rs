//! Types of homomorphisms from the block gadget J to H_k: the triple of
//! image pair sets on the three matched layers, with the counting formulas
//! for each type.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::count::{for_each_hom, stirling_surjections};
use crate::error::{invalid, Error, Result};
use crate::gadget::{build_j, hk, y_name, J_PARTS};
use crate::graph::{BlockedInstance, Graph};

pub type Pair = (String, String);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypePart {
    A,
    B,
    C,
    CPrime,
    BPrime,
    APrime,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HomType {
    pub t1: BTreeSet<Pair>,
    pub t2: BTreeSet<Pair>,
    pub t3: BTreeSet<Pair>,
}

fn firsts(s: &BTreeSet<Pair>) -> BTreeSet<String> {
    s.iter().map(|p| p.0.clone()).collect()
}

fn seconds(s: &BTreeSet<Pair>) -> BTreeSet<String> {
    s.iter().map(|p| p.1.clone()).collect()
}

fn reversed(s: &BTreeSet<Pair>) -> BTreeSet<Pair> {
    s.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
}

/// E(X, Y): ordered pairs (x, y) with {x, y} an edge (loops included).
pub fn edge_pairs(h: &Graph, x: &BTreeSet<String>, y: &BTreeSet<String>) -> BTreeSet<Pair> {
    let mut out = BTreeSet::new();
    for a in x {
        for b in y {
            if let (Some(i), Some(j)) = (h.index_of(a), h.index_of(b)) {
                if h.adjacent(i, j) {
                    out.insert((a.clone(), b.clone()));
                }
            }
        }
    }
    out
}

impl HomType {
    pub fn new(t1: BTreeSet<Pair>, t2: BTreeSet<Pair>, t3: BTreeSet<Pair>) -> Self {
        HomType { t1, t2, t3 }
    }

    /// (E(A,B), E(C,C'), E(B',A')).
    pub fn from_projections(h: &Graph, sets: [&BTreeSet<String>; 6]) -> Self {
        let [a, b, c, cp, bp, ap] = sets;
        HomType { t1: edge_pairs(h, a, b), t2: edge_pairs(h, c, cp), t3: edge_pairs(h, bp, ap) }
    }

    pub fn projection(&self, part: TypePart) -> BTreeSet<String> {
        match part {
            TypePart::A => firsts(&self.t1),
            TypePart::B => seconds(&self.t1),
            TypePart::C => firsts(&self.t2),
            TypePart::CPrime => seconds(&self.t2),
            TypePart::BPrime => firsts(&self.t3),
            TypePart::APrime => seconds(&self.t3),
        }
    }

    pub fn projections(&self) -> [BTreeSet<String>; 6] {
        [TypePart::A, TypePart::B, TypePart::C, TypePart::CPrime, TypePart::BPrime, TypePart::APrime]
            .map(|p| self.projection(p))
    }

    /// The symmetric partner (reverse T₃, reverse T₂, reverse T₁).
    pub fn mirror(&self) -> HomType {
        HomType { t1: reversed(&self.t3), t2: reversed(&self.t2), t3: reversed(&self.t1) }
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.t1.len(), self.t2.len(), self.t3.len()]
    }

    /// Canonical representative of {T, mirror(T)}.
    pub fn canonical(&self) -> HomType {
        let m = self.mirror();
        if m < *self {
            m
        } else {
            self.clone()
        }
    }

    fn check_pairs(&self, h: &Graph) -> Result<()> {
        for (x, y) in self.t1.iter().chain(&self.t2).chain(&self.t3) {
            let (i, j) = (h.require(x)?, h.require(y)?);
            if !h.adjacent(i, j) {
                return invalid(format!("pair ({x},{y}) is not an edge"));
            }
        }
        Ok(())
    }
}

fn subset(a: &BTreeSet<String>, b: &BTreeSet<String>) -> bool {
    a.is_subset(b)
}

fn all_adjacent(h: &Graph, x: &BTreeSet<String>, y: &BTreeSet<String>) -> bool {
    x.iter().all(|a| {
        y.iter().all(|b| {
            let (i, j) = (h.index_of(a).expect("vertex"), h.index_of(b).expect("vertex"));
            h.adjacent(i, j)
        })
    })
}

fn gamma_names(h: &Graph, v: &str) -> BTreeSet<String> {
    h.names_of(&h.gamma(h.index_of(v).expect("vertex")))
}

fn nonempty_unchecked(h: &Graph, t: &HomType) -> bool {
    if t.t1.is_empty() || t.t2.is_empty() || t.t3.is_empty() {
        return false;
    }
    let [a, b, c, cp, bp, ap] = t.projections();
    let gb = gamma_names(h, "b");
    let gg = gamma_names(h, "g");
    subset(&b, &gb)
        && subset(&c, &gb)
        && subset(&cp, &gb)
        && subset(&bp, &gb)
        && subset(&a, &gg)
        && subset(&ap, &gg)
        && all_adjacent(h, &b, &c)
        && all_adjacent(h, &bp, &cp)
}

/// The four-condition non-emptiness test over H_k.
pub fn is_nonempty_type(t: &HomType, k: usize) -> Result<bool> {
    let h = hk(k)?;
    t.check_pairs(&h)?;
    Ok(nonempty_unchecked(&h, t))
}

fn ordered_edges(h: &Graph) -> Vec<Pair> {
    let mut out = Vec::new();
    for i in 0..h.n() {
        for &j in h.neighbors(i) {
            out.push((h.name(i).to_string(), h.name(j).to_string()));
        }
    }
    out
}

fn maximal_in(h: &Graph, pairs: &[Pair], t: &HomType) -> bool {
    for slot in 0..3 {
        for p in pairs {
            let mut u = t.clone();
            let set = match slot {
                0 => &mut u.t1,
                1 => &mut u.t2,
                _ => &mut u.t3,
            };
            if !set.insert(p.clone()) {
                continue;
            }
            if nonempty_unchecked(h, &u) {
                return false;
            }
        }
    }
    true
}

/// True iff T is non-empty and no single added pair keeps it non-empty.
pub fn is_maximal_type(t: &HomType, k: usize) -> Result<bool> {
    let h = hk(k)?;
    t.check_pairs(&h)?;
    if !nonempty_unchecked(&h, t) {
        return Err(Error::Invalid("type is empty".into()));
    }
    Ok(maximal_in(&h, &ordered_edges(&h), t))
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Candidate images of C and C' for a maximal type: {b}, {r1,b}, {r2,b}, Γ(b).
pub fn c_menu() -> [BTreeSet<String>; 4] {
    [set(&["b"]), set(&["r1", "b"]), set(&["r2", "b"]), set(&["r1", "r2", "b", "g"])]
}

/// Table row order as (C, C') menu indices.
pub const TABLE_ORDER: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 2), (1, 1), (2, 2), (1, 3), (2, 3), (3, 3)];

fn type_for(h: &Graph, c: &BTreeSet<String>, cp: &BTreeSet<String>) -> HomType {
    let idx = |s: &BTreeSet<String>| -> BTreeSet<usize> { s.iter().map(|x| h.index_of(x).expect("v")).collect() };
    let b = h.index_of("b").expect("b");
    let g = h.index_of("g").expect("g");
    let gb = h.gamma(b);
    let gg = h.gamma(g);
    let common = |s: &BTreeSet<String>| -> BTreeSet<usize> {
        h.common_neighbors(&idx(s)).expect("nonempty").intersection(&gb).copied().collect()
    };
    let bset = common(c);
    let bpset = common(cp);
    let aset: BTreeSet<usize> = h.neighbor_union(&bset).intersection(&gg).copied().collect();
    let apset: BTreeSet<usize> = h.neighbor_union(&bpset).intersection(&gg).copied().collect();
    let (a, bn, bpn, ap) = (h.names_of(&aset), h.names_of(&bset), h.names_of(&bpset), h.names_of(&apset));
    HomType::from_projections(h, [&a, &bn, c, cp, &bpn, &ap])
}

/// The maximal types up to symmetry, in table order.
pub fn enumerate_maximal_types(k: usize) -> Result<Vec<HomType>> {
    let h = hk(k)?;
    let pairs = ordered_edges(&h);
    let menu = c_menu();
    let mut found: BTreeMap<(usize, usize), HomType> = BTreeMap::new();
    let mut seen: BTreeSet<HomType> = BTreeSet::new();
    let mut order: Vec<(usize, usize)> = TABLE_ORDER.to_vec();
    for i in 0..4 {
        for j in 0..4 {
            if !order.contains(&(i, j)) {
                order.push((i, j));
            }
        }
    }
    for (i, j) in order {
        let t = type_for(&h, &menu[i], &menu[j]);
        if !nonempty_unchecked(&h, &t) || !maximal_in(&h, &pairs, &t) {
            continue;
        }
        if seen.insert(t.canonical()) {
            found.insert((i, j), t);
        }
    }
    let mut out = Vec::new();
    for key in TABLE_ORDER {
        if let Some(t) = found.remove(&key) {
            out.push(t);
        }
    }
    out.extend(found.into_values());
    Ok(out)
}

/// Row i (1-based) of the maximal-type table for H_k.
pub fn table_row(i: usize, k: usize) -> Result<HomType> {
    if !(1..=10).contains(&i) {
        return invalid("row index must be in 1..=10");
    }
    let h = hk(k)?;
    let menu = c_menu();
    let (c, cp) = TABLE_ORDER[i - 1];
    Ok(type_for(&h, &menu[c], &menu[cp]))
}

/// N̂(T) = |T₁|^{pt} |T₂|^{qt} |T₃|^{pt}.
pub fn nhat(t: &HomType, p: u64, q: u64, tt: u64) -> BigUint {
    let [a, b, c] = t.sizes().map(|x| BigUint::from(x as u64));
    a.pow((p * tt) as u32) * b.pow((q * tt) as u32) * c.pow((p * tt) as u32)
}

/// N(T) as a product of surjection counts; valid for non-empty types.
pub fn n_exact(t: &HomType, p: u64, q: u64, tt: u64) -> BigUint {
    let [a, b, c] = t.sizes().map(|x| x as u64);
    stirling_surjections(p * tt, a) * stirling_surjections(q * tt, b) * stirling_surjections(p * tt, c)
}

/// Strand positions of each part of an expanded J, aligned by strand.
fn j_strands(b: &BlockedInstance, names: &[String]) -> [Vec<usize>; 6] {
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    J_PARTS.map(|part| {
        let bl = b.blocks.iter().find(|x| x.id == part).expect("block");
        BlockedInstance::member_names(bl).iter().map(|m| index[m.as_str()]).collect()
    })
}

pub const TYPE_ENUM_LIMIT: u64 = 100_000_000;

/// Enumerates all homomorphisms from the expanded J(p,q,t) to H_k and
/// buckets them by type.
pub fn brute_count_by_type(p: u64, q: u64, t: u64, k: usize) -> Result<BTreeMap<HomType, BigUint>> {
    let h = hk(k)?;
    let b = build_j(p, q, t)?;
    let inst = b.expand(&h, 200)?;
    let st = j_strands(&b, inst.pattern.names());
    let hn = h.names().to_vec();
    let mut out: BTreeMap<HomType, u64> = BTreeMap::new();
    let mut visited = 0u64;
    let mut overflow = false;
    for_each_hom(&inst, &h, |a| {
        visited += 1;
        if visited > TYPE_ENUM_LIMIT {
            overflow = true;
            return;
        }
        let pairs = |x: usize, y: usize| -> BTreeSet<Pair> {
            st[x].iter().zip(&st[y]).map(|(&i, &j)| (hn[a[i]].clone(), hn[a[j]].clone())).collect()
        };
        *out.entry(HomType::new(pairs(0, 1), pairs(2, 3), pairs(4, 5))).or_default() += 1;
    })?;
    if overflow {
        return Err(Error::Bound("type enumeration exceeded the leaf guard".into()));
    }
    Ok(out.into_iter().map(|(k, v)| (k, BigUint::from(v))).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DominanceRow {
    pub row: usize,
    /// N̂(T_i)/N̂(T_4) at each requested t, as "num/den" strings.
    pub ratios: Vec<String>,
    /// The t = 1 ratio; the ratio at t is its t-th power.
    pub per_step: String,
    pub per_step_f64: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub k: usize,
    pub p: u64,
    pub q: u64,
    pub ts: Vec<u64>,
    pub rows: Vec<DominanceRow>,
    pub gamma: f64,
    pub gamma_below_one: bool,
}

fn rational(n: BigUint, d: BigUint) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_f64(r: &BigRational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        let nb = r.numer().to_biguint().unwrap_or_default();
        let db = r.denom().to_biguint().unwrap_or_default();
        (crate::gadget::ln_big(&nb) - crate::gadget::ln_big(&db)).exp()
    }
}

pub fn dominance_report(k: usize, p: u64, q: u64, ts: &[u64]) -> Result<DominanceReport> {
    let t4 = table_row(4, k)?;
    let mut rows = Vec::new();
    let mut gamma_r: Option<BigRational> = None;
    for i in (1..=10).filter(|&i| i != 4) {
        let ti = table_row(i, k)?;
        let ratios =
            ts.iter().map(|&t| rational(nhat(&ti, p, q, t), nhat(&t4, p, q, t)).to_string()).collect();
        let step = rational(nhat(&ti, p, q, 1), nhat(&t4, p, q, 1));
        if gamma_r.as_ref().map_or(true, |g| step > *g) {
            gamma_r = Some(step.clone());
        }
        rows.push(DominanceRow { row: i, ratios, per_step: step.to_string(), per_step_f64: rat_f64(&step) });
    }
    let g = gamma_r.expect("nine rows");
    let below = g < BigRational::from_integer(1.into());
    Ok(DominanceReport { k, p, q, ts: ts.to_vec(), rows, gamma: rat_f64(&g), gamma_below_one: below })
}

/// N̂(T)/2 ≤ N(T) ≤ N̂(T) for every maximal type (and its mirror, which has
/// the same counts).
pub fn sandwich_check(k: usize, p: u64, q: u64, t: u64) -> Result<bool> {
    for ty in enumerate_maximal_types(k)? {
        let nh = nhat(&ty, p, q, t);
        let n = n_exact(&ty, p, q, t);
        if n > nh || BigUint::from(2u32) * &n < nh {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichScan {
    pub results: Vec<(u64, bool)>,
    /// Least t from which the sandwich holds through the end of the scan.
    pub t0: Option<u64>,
    pub monotone: bool,
}

pub fn sandwich_scan(k: usize, p: u64, q: u64, t_max: u64) -> Result<SandwichScan> {
    let mut results = Vec::new();
    for t in 1..=t_max {
        results.push((t, sandwich_check(k, p, q, t)?));
    }
    let first = results.iter().position(|r| r.1);
    let monotone = first.map_or(true, |f| results[f..].iter().all(|r| r.1));
    let t0 = match first {
        Some(f) if monotone => Some(results[f].0),
        _ => results.iter().rposition(|r| !r.1).and_then(|i| results.get(i + 1)).map(|r| r.0),
    };
    Ok(SandwichScan { results, t0, monotone })
}

/// Names of the y vertices of H_k.
pub fn ys(k: usize) -> BTreeSet<String> {
    (1..=k).map(y_name).collect()
}

impl HomType {
    /// Renders a projection tuple for reports.
    pub fn describe(&self) -> BTreeMap<&'static str, Vec<String>> {
        let p = self.projections();
        let mut m = BTreeMap::new();
        for (name, s) in ["A", "B", "C", "C'", "B'", "A'"].into_iter().zip(p) {
            m.insert(name, s.into_iter().collect());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn ten_rows() {
        for k in 1..=3 {
            assert_eq!(enumerate_maximal_types(k).unwrap().len(), 10);
        }
    }

    #[test]
    fn t4_counts() {
        let t4 = table_row(4, 1).unwrap();
        assert_eq!(t4.sizes(), [5, 4, 1]);
        assert_eq!(nhat(&t4, 1, 1, 1), BigUint::from(20u32));
        assert!(n_exact(&t4, 1, 1, 1).is_zero());
    }
}

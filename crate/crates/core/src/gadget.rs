//! Fixed target graphs and the gadget instances built on top of them:
//! the block gadget `J(p, q, t)`, the multiterminal-cut instance, the
//! large-cut instance and neighbourhood pinning.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::blocked::count_blocked;
use crate::count::{for_each_hom, Problem};
use crate::error::{invalid, Error, Result};
use crate::graph::{BlockedInstance, Coupling, Graph, GraphBuilder, ListedInstance};
use crate::hom_type::{HomType, TypePart};

/// Reflexive path c0-c1-c2 with an unlooped pendant `g` on c1.
pub fn twrench() -> Graph {
    Graph::from_parts(
        &[("c0", true), ("c1", true), ("c2", true), ("g", false)],
        &[("c0", "c1"), ("c1", "c2"), ("c1", "g")],
    )
    .expect("fixed graph")
}

/// Reflexive star: looped centre `c` with looped leaves `l1..lq`.
pub fn wr(q: usize) -> Result<Graph> {
    if q == 0 {
        return invalid("WR_q needs q >= 1");
    }
    let mut b = GraphBuilder::new();
    b.vertex("c", true);
    for i in 1..=q {
        b.vertex(format!("l{i}"), true);
        b.edge("c", format!("l{i}"));
    }
    b.build()
}

fn leg_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("v{i}_"),
    }
}

/// Irreflexive star with q legs of length 2, centre `w`. Leg i has inner
/// vertex `<L>0` and tip `<L>1`, with L = x, y, z for the first three legs.
pub fn jq(q: usize) -> Result<Graph> {
    if q < 3 {
        return invalid("J_q needs q >= 3");
    }
    let mut b = GraphBuilder::new();
    b.vertex("w", false);
    for i in 0..q {
        let l = leg_name(i);
        b.vertex(format!("{l}0"), false);
        b.vertex(format!("{l}1"), false);
        b.edge("w", format!("{l}0"));
        b.edge(format!("{l}0"), format!("{l}1"));
    }
    b.build()
}

pub fn j3() -> Graph {
    jq(3).expect("fixed graph")
}

pub fn y_name(i: usize) -> String {
    format!("y{i}")
}

/// The target H_k.
pub fn hk(k: usize) -> Result<Graph> {
    if k == 0 {
        return invalid("H_k needs k >= 1");
    }
    let mut b = GraphBuilder::new();
    for v in ["w1", "r1", "w2", "r2", "b"] {
        b.vertex(v, true);
    }
    for v in ["d1", "d2", "g"] {
        b.vertex(v, false);
    }
    let ys: Vec<String> = (1..=k).map(y_name).collect();
    for y in &ys {
        b.vertex(y.clone(), true);
        b.edge("g", y.clone());
    }
    for (x, y) in [("w1", "r1"), ("w2", "r2"), ("d1", "r1"), ("d2", "r2"), ("r1", "b"), ("r2", "b"), ("b", "g")] {
        b.edge(x, y);
    }
    for x in ["w1", "d1"] {
        for y in ["w2", "d2"] {
            b.edge(x, y);
        }
    }
    for x in ["w1", "d1", "w2", "d2"] {
        for y in &ys {
            b.edge(x, y.clone());
        }
    }
    b.build()
}

/// The graph H'_k: r1, b, r2 looped; g and the y_i unlooped.
pub fn hk_prime(k: usize) -> Result<Graph> {
    if k == 0 {
        return invalid("H'_k needs k >= 1");
    }
    let mut b = GraphBuilder::new();
    for v in ["r1", "b", "r2"] {
        b.vertex(v, true);
    }
    b.vertex("g", false);
    b.edge("r1", "b").edge("r2", "b").edge("b", "g");
    for i in 1..=k {
        b.vertex(y_name(i), false);
        b.edge("g", y_name(i));
    }
    b.build()
}

/// Reflexive path c0..c{Q+1} with an unlooped bristle g_i on c_i for i ∈ S.
pub fn pbrp_graph(q: usize, s: &BTreeSet<usize>) -> Result<Graph> {
    if q == 0 {
        return invalid("Q must be positive");
    }
    if s.iter().any(|&i| i == 0 || i > q) {
        return invalid("S must be a subset of [Q]");
    }
    let mut b = GraphBuilder::new();
    for i in 0..=q + 1 {
        b.vertex(format!("c{i}"), true);
        if i > 0 {
            b.edge(format!("c{}", i - 1), format!("c{i}"));
        }
    }
    for &i in s {
        b.vertex(format!("g{i}"), false);
        b.edge(format!("c{i}"), format!("g{i}"));
    }
    b.build()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedGraph {
    Jq(usize),
    Wr(usize),
    TwoWrench,
    Hk(usize),
    HkPrime(usize),
    Pbrp(usize, BTreeSet<usize>),
}

impl FixedGraph {
    /// Parses `jq:3`, `wr:3`, `twrench`, `hk:1`, `hkp:1`, `pbrp:4:1,3,4`.
    pub fn parse(s: &str) -> Result<FixedGraph> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| -> Result<usize> {
            x.parse().map_err(|_| Error::Invalid(format!("bad parameter `{x}`")))
        };
        match parts.as_slice() {
            ["jq", q] => Ok(FixedGraph::Jq(num(q)?)),
            ["wr", q] => Ok(FixedGraph::Wr(num(q)?)),
            ["twrench"] | ["2-wrench"] => Ok(FixedGraph::TwoWrench),
            ["hk", k] => Ok(FixedGraph::Hk(num(k)?)),
            ["hkp", k] => Ok(FixedGraph::HkPrime(num(k)?)),
            ["pbrp", q] => Ok(FixedGraph::Pbrp(num(q)?, BTreeSet::new())),
            ["pbrp", q, list] => {
                let set = list.split(',').filter(|x| !x.is_empty()).map(num).collect::<Result<_>>()?;
                Ok(FixedGraph::Pbrp(num(q)?, set))
            }
            _ => invalid(format!("unknown fixed graph `{s}`")),
        }
    }
}

pub fn build_fixed_graph(kind: &FixedGraph) -> Result<Graph> {
    match kind {
        FixedGraph::Jq(q) => jq(*q),
        FixedGraph::Wr(q) => wr(*q),
        FixedGraph::TwoWrench => Ok(twrench()),
        FixedGraph::Hk(k) => hk(*k),
        FixedGraph::HkPrime(k) => hk_prime(*k),
        FixedGraph::Pbrp(q, s) => pbrp_graph(*q, s),
    }
}

/// Block ids of J, in the order A, B, C, C', B', A'.
pub const J_PARTS: [&str; 6] = ["A", "B", "C", "C'", "B'", "A'"];

fn add_j_blocks(b: &mut BlockedInstance, prefix: &str, p: u64, q: u64, t: u64) {
    let n = |x: &str| format!("{prefix}{x}");
    for (part, m) in J_PARTS.iter().zip([p * t, p * t, q * t, q * t, p * t, p * t]) {
        b.add_block(n(part), m);
    }
    b.couple(n("A"), n("B"), Coupling::PerfectMatching);
    b.couple(n("C"), n("C'"), Coupling::PerfectMatching);
    b.couple(n("A'"), n("B'"), Coupling::PerfectMatching);
    b.couple(n("B"), n("C"), Coupling::CompleteBipartite);
    b.couple(n("B'"), n("C'"), Coupling::CompleteBipartite);
    b.couple("alpha", n("A"), Coupling::Apex);
    b.couple("alpha'", n("A'"), Coupling::Apex);
    for part in ["B", "C", "C'", "B'"] {
        b.couple("beta", n(part), Coupling::Apex);
    }
}

fn add_j_pins(b: &mut BlockedInstance) {
    for x in ["alpha", "alpha'", "beta"] {
        b.add_block(x, 1);
    }
    b.pin("alpha", "g").pin("alpha'", "g").pin("beta", "b");
}

/// The gadget J(p, q, t) with its pins to g, g and b.
pub fn build_j(p: u64, q: u64, t: u64) -> Result<BlockedInstance> {
    if p == 0 || q == 0 || t == 0 {
        return invalid("p, q, t must be positive");
    }
    let mut b = BlockedInstance::default();
    add_j_pins(&mut b);
    add_j_blocks(&mut b, "", p, q, t);
    b.validate()?;
    Ok(b)
}

/// Least (p, q) with p, q ≥ 32+12k and log_4(4+k) < q/p < log_{9/4}(4+k),
/// decided with exact integer powers.
pub fn choose_pq(k: u64) -> (u64, u64) {
    let lo = 32 + 12 * k;
    let base = BigUint::from(4 + k);
    let four = BigUint::from(4u32);
    let nine = BigUint::from(9u32);
    let mut p = lo;
    loop {
        let bp = base.pow(p as u32);
        let mut q = lo;
        while four.pow(q as u32) <= bp {
            q += 1;
        }
        if nine.pow(q as u32) < four.pow(q as u32) * &bp {
            return (p, q);
        }
        p += 1;
    }
}

/// Smallest r ≤ N with |r·λ_i − round(r·λ_i)| < N^{-1/d} for every i; when
/// only boundary hits exist, the smallest r meeting the bound with equality.
pub fn dirichlet_approx(lambdas: &[f64], n: u64) -> Result<(Vec<u64>, u64)> {
    if lambdas.is_empty() || n == 0 {
        return invalid("need at least one value and N >= 1");
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return invalid("values must be positive reals");
    }
    let bound = dirichlet_bound(lambdas.len(), n);
    let err = |r: u64| lambdas.iter().map(|l| (r as f64 * l - (r as f64 * l).round()).abs()).fold(0.0, f64::max);
    let found = (1..=n).find(|&r| err(r) < bound).or_else(|| (1..=n).find(|&r| err(r) <= bound));
    match found {
        Some(r) => Ok((lambdas.iter().map(|l| (r as f64 * l).round() as u64).collect(), r)),
        None => Err(Error::Invalid("no qualifying r found".into())),
    }
}

pub fn dirichlet_bound(d: usize, n: u64) -> f64 {
    1.0 / (n as f64).powf(1.0 / d as f64)
}

/// Labels of an induced J_3 inside some graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct J3Labels {
    pub w: String,
    pub x0: String,
    pub x1: String,
    pub y0: String,
    pub y1: String,
    pub z0: String,
    pub z1: String,
}

impl J3Labels {
    pub fn vertices(&self) -> [&str; 7] {
        [&self.w, &self.x0, &self.x1, &self.y0, &self.y1, &self.z0, &self.z1]
    }
}

/// First induced J_3 in index order of (w, x0 < y0 < z0, x1, y1, z1).
pub fn find_j3_labels(h: &Graph) -> Result<J3Labels> {
    find_j3_indices(h)
        .map(|v| J3Labels {
            w: h.name(v[0]).into(),
            x0: h.name(v[1]).into(),
            x1: h.name(v[2]).into(),
            y0: h.name(v[3]).into(),
            y1: h.name(v[4]).into(),
            z0: h.name(v[5]).into(),
            z1: h.name(v[6]).into(),
        })
        .ok_or_else(|| Error::Invalid("graph has no induced J_3".into()))
}

pub(crate) fn find_j3_indices(h: &Graph) -> Option<[usize; 7]> {
    let plain = |v: usize| !h.is_looped(v);
    for w in (0..h.n()).filter(|&w| plain(w)) {
        let nb: Vec<usize> = h.neighbors(w).iter().copied().filter(|&v| v != w && plain(v)).collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                for k in j + 1..nb.len() {
                    let mid = [nb[i], nb[j], nb[k]];
                    if mid.iter().enumerate().any(|(a, &x)| mid[a + 1..].iter().any(|&y| h.adjacent(x, y))) {
                        continue;
                    }
                    let tips: Vec<Vec<usize>> = mid
                        .iter()
                        .map(|&m| {
                            h.neighbors(m)
                                .iter()
                                .copied()
                                .filter(|&v| v != m && v != w && plain(v) && !h.adjacent(v, w))
                                .collect()
                        })
                        .collect();
                    for &a in &tips[0] {
                        for &b in &tips[1] {
                            for &c in &tips[2] {
                                let all = [w, mid[0], a, mid[1], b, mid[2], c];
                                if is_induced_j3(h, &all) {
                                    return Some(all);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

fn is_induced_j3(h: &Graph, v: &[usize; 7]) -> bool {
    let set: BTreeSet<usize> = v.iter().copied().collect();
    if set.len() != 7 || v.iter().any(|&x| h.is_looped(x)) {
        return false;
    }
    let want = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)];
    for a in 0..7 {
        for b in a + 1..7 {
            let e = want.contains(&(a, b));
            if h.adjacent(v[a], v[b]) != e {
                return false;
            }
        }
    }
    true
}

fn ceil_log2(q: usize) -> u64 {
    if q <= 1 {
        0
    } else {
        (usize::BITS - (q - 1).leading_zeros()) as u64
    }
}

/// Default precision parameter log_q e^{ε/42}.
pub fn default_cut_delta(eps: f64, q: usize) -> f64 {
    (eps / 42.0) / (q as f64).ln()
}

/// The multiterminal-cut reduction instance.
#[derive(Clone, Debug)]
pub struct CutReductionPlan {
    pub g: Graph,
    pub terminals: [String; 3],
    pub budget: u64,
    pub labels: J3Labels,
    /// |V(H)|.
    pub q: usize,
    pub s: u64,
    pub r: u64,
    /// s_α, s_β, s_γ.
    pub sizes: [u64; 3],
    pub lambdas: [f64; 3],
    /// d_x, d_y, d_z, d_w.
    pub degrees: [usize; 4],
    pub delta: f64,
    pub dirichlet_n: u64,
    pub blocked: BlockedInstance,
}

pub const OMEGA: &str = "@omega";

pub fn cut_block_id(u: &str, v: &str, kind: char) -> String {
    format!("@{u}~{v}:{kind}")
}

impl CutReductionPlan {
    /// Exponent of Z* = 2^{s·r·(|E(G)|−B)}; may be negative when B > |E(G)|.
    pub fn z_star_exponent(&self) -> i128 {
        self.s as i128 * self.r as i128 * (self.g.non_loop_edges().len() as i128 - self.budget as i128)
    }

    pub fn z_star(&self) -> BigRational {
        pow2_rational(self.z_star_exponent())
    }
}

pub(crate) fn pow2_rational(e: i128) -> BigRational {
    let two = BigInt::from(2u32);
    if e >= 0 {
        BigRational::from_integer(two.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), two.pow((-e) as u32))
    }
}

pub fn build_cut_instance(
    g: &Graph,
    terminals: [&str; 3],
    budget: u64,
    h: &Graph,
    delta: f64,
) -> Result<CutReductionPlan> {
    let t: Vec<usize> = terminals.iter().map(|x| g.require(x)).collect::<Result<_>>()?;
    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
        return invalid("terminals must be distinct");
    }
    if !h.is_square_free() {
        return invalid("target must be square-free");
    }
    if !g.is_irreflexive() {
        return invalid("base graph must be irreflexive");
    }
    if !g.is_connected() {
        return invalid("base graph must be connected");
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return invalid("precision must be positive");
    }
    let labels = find_j3_labels(h)?;
    let deg = |x: &str| h.neighbors(h.index_of(x).expect("label")).len();
    let degrees = [deg(&labels.x0), deg(&labels.y0), deg(&labels.z0), deg(&labels.w)];
    let n = g.n();
    let q = h.n();
    let edges = g.non_loop_edges();
    let s = 2 + edges.len() as u64 + ceil_log2(q) * n as u64;
    let lambdas = [0, 1, 2].map(|i| s as f64 / (degrees[i] as f64).log2());
    let nf = ((n * n) as f64 / delta).powi(3).ceil();
    let dirichlet_n = if nf >= u64::MAX as f64 { u64::MAX } else { nf as u64 };
    let (p, r) = dirichlet_approx(&lambdas, dirichlet_n)?;
    if p.iter().any(|&x| x == 0) {
        return invalid("Dirichlet approximation produced a zero block size");
    }
    let sizes = [p[0], p[1], p[2]];

    let mut b = BlockedInstance::default();
    for v in g.names() {
        b.add_block(v.clone(), 1);
    }
    b.add_block(OMEGA, 1);
    b.pin(OMEGA, labels.w.clone());
    for (ti, lab) in t.iter().zip([&labels.x0, &labels.y0, &labels.z0]) {
        b.pin(g.name(*ti), lab.clone());
    }
    for v in g.names() {
        b.couple(OMEGA, v.clone(), Coupling::Apex);
    }
    for (u, v) in edges {
        let (un, vn) = (g.name(u), g.name(v));
        for (i, kind) in ['a', 'b', 'c'].into_iter().enumerate() {
            let id = cut_block_id(un, vn, kind);
            b.add_block(id.clone(), sizes[i]);
            b.couple(un, id.clone(), Coupling::Apex);
            b.couple(vn, id.clone(), Coupling::Apex);
            if g.name(t[i]) != un && g.name(t[i]) != vn {
                b.couple(g.name(t[i]), id.clone(), Coupling::Apex);
            }
        }
    }
    b.validate()?;
    Ok(CutReductionPlan {
        g: g.clone(),
        terminals: terminals.map(str::to_string),
        budget,
        labels,
        q,
        s,
        r,
        sizes,
        lambdas,
        degrees,
        delta,
        dirichlet_n,
        blocked: b,
    })
}

/// Rounds a nonnegative rational to the nearest integer, ties downward.
pub fn round_nearest(x: &BigRational) -> BigUint {
    let fl = x.floor();
    let frac = x - &fl;
    let half = BigRational::new(BigInt::one(), BigInt::from(2u32));
    let v = if frac > half { fl + BigRational::one() } else { fl };
    v.to_integer().to_biguint().unwrap_or_default()
}

/// T̂ = nearest integer to Q̂/Z*, where Q̂ is one oracle answer at ε/42.
pub fn estimate_multiterminal_cuts<F>(plan: &CutReductionPlan, eps: f64, mut oracle: F) -> Result<BigUint>
where
    F: FnMut(&BlockedInstance, f64) -> Result<BigUint>,
{
    if plan.budget as usize > plan.g.non_loop_edges().len() {
        return Ok(BigUint::zero());
    }
    let qhat = oracle(&plan.blocked, eps / 42.0)?;
    let ratio = BigRational::from_integer(BigInt::from(qhat)) / plan.z_star();
    Ok(round_nearest(&ratio))
}

/// Exact blocked oracle for the cut estimator.
pub fn exact_blocked_oracle(h: &Graph) -> impl FnMut(&BlockedInstance, f64) -> Result<BigUint> + '_ {
    move |b, _| count_blocked(b, h)
}

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
            self.0[ra] = rb;
        }
    }
}

fn components_without(n: usize, edges: &[(usize, usize)], removed: u64) -> Dsu {
    let mut d = Dsu::new(n);
    for (i, &(a, b)) in edges.iter().enumerate() {
        if removed >> i & 1 == 0 {
            d.union(a, b);
        }
    }
    d
}

fn separates(d: &mut Dsu, t: &[usize; 3]) -> bool {
    let r = t.map(|x| d.find(x));
    r[0] != r[1] && r[1] != r[2] && r[0] != r[2]
}

fn terminal_indices(g: &Graph, terminals: [&str; 3]) -> Result<[usize; 3]> {
    let t = [g.require(terminals[0])?, g.require(terminals[1])?, g.require(terminals[2])?];
    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
        return invalid("terminals must be distinct");
    }
    Ok(t)
}

/// Number of size-B edge sets that pairwise separate the three terminals.
pub fn count_multiterminal_cuts_bruteforce(g: &Graph, terminals: [&str; 3], budget: u64) -> Result<BigUint> {
    let t = terminal_indices(g, terminals)?;
    let edges = g.non_loop_edges();
    if edges.len() > 20 {
        return Err(Error::Bound(format!("{} edges (limit 20)", edges.len())));
    }
    let mut count = 0u64;
    for mask in 0u64..(1u64 << edges.len()) {
        if mask.count_ones() as u64 != budget {
            continue;
        }
        let mut d = components_without(g.n(), &edges, mask);
        if separates(&mut d, &t) {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Smallest multiterminal cut size.
pub fn min_multiterminal_cut(g: &Graph, terminals: [&str; 3]) -> Result<u64> {
    let edges = g.non_loop_edges();
    for b in 0..=edges.len() as u64 {
        if !count_multiterminal_cuts_bruteforce(g, terminals, b)?.is_zero() {
            return Ok(b);
        }
    }
    invalid("terminals cannot be separated")
}

#[derive(Clone, Debug)]
pub struct PsiRecord {
    /// Colour of each base-graph vertex, by index.
    pub colouring: Vec<String>,
    /// Monochromatic edges coloured x0, y0, z0.
    pub mono: [usize; 3],
    /// Exact number of extensions of this colouring to the whole instance.
    pub extensions: BigUint,
}

#[derive(Clone, Debug)]
pub struct CutRecord {
    pub cut: Vec<(String, String)>,
    pub kappa: usize,
    pub psi: Vec<PsiRecord>,
}

/// Every multiterminal cut of the plan's base graph with the colourings
/// ψ: V(G) → Γ(w) whose bichromatic edge set is that cut.
#[derive(Clone, Debug)]
pub struct CutAnalysis {
    pub records: Vec<CutRecord>,
}

pub fn analyze_cuts(plan: &CutReductionPlan, h: &Graph) -> Result<CutAnalysis> {
    let g = &plan.g;
    let n = g.n();
    let edges = g.non_loop_edges();
    if edges.len() > 20 {
        return Err(Error::Bound(format!("{} edges (limit 20)", edges.len())));
    }
    let t = terminal_indices(g, [&plan.terminals[0], &plan.terminals[1], &plan.terminals[2]])?;
    let hi = |x: &str| h.index_of(x).expect("label");
    let w = hi(&plan.labels.w);
    let anchors = [hi(&plan.labels.x0), hi(&plan.labels.y0), hi(&plan.labels.z0)];
    let palette: Vec<usize> = h.neighbors(w).to_vec();
    if (palette.len() as f64).powi(n as i32 - 3) > 2e6 {
        return Err(Error::Bound("too many colourings".into()));
    }
    let masks = h.adj_masks()?;
    let mut by_cut: BTreeMap<u64, Vec<PsiRecord>> = BTreeMap::new();
    let free: Vec<usize> = (0..n).filter(|v| !t.contains(v)).collect();
    let mut col = vec![0usize; n];
    for (k, &v) in t.iter().enumerate() {
        col[v] = anchors[k];
    }
    if anchors.iter().any(|a| !palette.contains(a)) {
        return invalid("terminal labels are not neighbours of w");
    }
    let mut idx = vec![0usize; free.len()];
    loop {
        for (k, &v) in free.iter().enumerate() {
            col[v] = palette[idx[k]];
        }
        let mut cut = 0u64;
        let mut mono = [0usize; 3];
        let mut ext = BigUint::one();
        for (i, &(a, b)) in edges.iter().enumerate() {
            if col[a] != col[b] {
                cut |= 1 << i;
            }
            for k in 0..3 {
                if col[a] == col[b] && col[a] == anchors[k] {
                    mono[k] += 1;
                }
                let f = (masks[col[a]] & masks[col[b]] & masks[anchors[k]]).count_ones();
                ext *= BigUint::from(f).pow(plan.sizes[k] as u32);
            }
        }
        by_cut.entry(cut).or_default().push(PsiRecord {
            colouring: col.iter().map(|&c| h.name(c).to_string()).collect(),
            mono,
            extensions: ext,
        });
        let mut k = 0;
        loop {
            if k == free.len() {
                break;
            }
            idx[k] += 1;
            if idx[k] < palette.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == free.len() {
            break;
        }
    }
    let mut records = Vec::new();
    for mask in 0u64..(1u64 << edges.len()) {
        let mut d = components_without(n, &edges, mask);
        if !separates(&mut d, &t) {
            continue;
        }
        let kappa = (0..n).filter(|&v| d.find(v) == v).count();
        let cut = (0..edges.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (g.name(edges[i].0).to_string(), g.name(edges[i].1).to_string()))
            .collect();
        records.push(CutRecord { cut, kappa, psi: by_cut.remove(&mask).unwrap_or_default() });
    }
    if !by_cut.is_empty() {
        return Err(Error::Invalid("a colouring's bichromatic set is not a multiterminal cut".into()));
    }
    Ok(CutAnalysis { records })
}

impl CutAnalysis {
    /// Σ over cuts and colourings of the exact extension counts; equals the
    /// homomorphism count of the instance.
    pub fn exact_total(&self) -> BigUint {
        self.records.iter().flat_map(|r| r.psi.iter()).map(|p| &p.extensions).sum()
    }

    /// Z = T·Z* + Σ_{|E'|>B} Σ_ψ 2^{s·r·(|X|+|Y|+|Z|)}.
    pub fn idealized_z(&self, plan: &CutReductionPlan) -> BigRational {
        let b = plan.budget as usize;
        let t = self.records.iter().filter(|r| r.cut.len() == b).count();
        let mut z = plan.z_star() * BigRational::from_integer(BigInt::from(t));
        for r in self.records.iter().filter(|r| r.cut.len() > b) {
            for p in &r.psi {
                let m: usize = p.mono.iter().sum();
                z += pow2_rational(plan.s as i128 * plan.r as i128 * m as i128);
            }
        }
        z
    }

    pub fn cuts_of_size(&self, b: usize) -> usize {
        self.records.iter().filter(|r| r.cut.len() == b).count()
    }
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(x: &BigRational) -> f64 {
    let n = x.numer().to_biguint().unwrap_or_default();
    let d = x.denom().to_biguint().unwrap_or_default();
    ln_big(&n) - ln_big(&d)
}

/// Counts homomorphisms of the single-edge gadget of `e` with its endpoints
/// pinned to `cu`, `cv` (and ω, terminals pinned as in the plan).
pub fn edge_gadget_count(plan: &CutReductionPlan, h: &Graph, e: (&str, &str), cu: &str, cv: &str) -> Result<BigUint> {
    let mut b = BlockedInstance::default();
    let (u, v) = e;
    let mut singles: BTreeSet<String> = [u.to_string(), v.to_string(), OMEGA.to_string()].into();
    singles.extend(plan.terminals.iter().cloned());
    for x in &singles {
        b.add_block(x.clone(), 1);
    }
    for (x, tgt) in &plan.blocked.pins {
        if singles.contains(x) {
            b.pin(x.clone(), tgt.clone());
        }
    }
    b.pin(u, cu).pin(v, cv);
    let wanted: Vec<String> = ['a', 'b', 'c'].iter().map(|&k| cut_block_id(u, v, k)).collect();
    for bl in &plan.blocked.blocks {
        if wanted.contains(&bl.id) {
            b.blocks.push(bl.clone());
        }
    }
    for (x, y, c) in &plan.blocked.couplings {
        if wanted.contains(y) && singles.contains(x) {
            b.couple(x.clone(), y.clone(), *c);
        }
    }
    b.validate()?;
    count_blocked(&b, h)
}

/// The #LargeCut reduction instance.
#[derive(Clone, Debug)]
pub struct LargeCutPlan {
    pub g: Graph,
    pub cut_size: u64,
    pub k: u64,
    pub p: u64,
    pub q: u64,
    pub t: u64,
    pub s: u64,
    pub blocked: BlockedInstance,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LargeCutOverrides {
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub t: Option<u64>,
    pub s: Option<u64>,
}

pub fn vertex_block_id(u: &str, part: &str) -> String {
    format!("{u}/{part}")
}

pub fn edge_block_id(u: &str, v: &str, primed: bool) -> String {
    if primed {
        format!("{u}~{v}/S'")
    } else {
        format!("{u}~{v}/S")
    }
}

pub fn build_largecut_instance(g: &Graph, cut_size: u64, k: u64, ov: LargeCutOverrides) -> Result<LargeCutPlan> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if !g.is_irreflexive() {
        return invalid("base graph must be irreflexive");
    }
    if g.n() == 0 || !g.is_connected() {
        return invalid("base graph must be connected and nonempty");
    }
    let n = g.n() as u64;
    let (dp, dq) = if ov.p.is_some() && ov.q.is_some() { (0, 0) } else { choose_pq(k) };
    let p = ov.p.unwrap_or(dp);
    let q = ov.q.unwrap_or(dq);
    let t = ov.t.unwrap_or(n.pow(4));
    let s = ov.s.unwrap_or(n + 1);
    if p == 0 || q == 0 || t == 0 || s == 0 {
        return invalid("parameters must be positive");
    }
    let mut b = BlockedInstance::default();
    add_j_pins(&mut b);
    for u in g.names() {
        add_j_blocks(&mut b, &format!("{u}/"), p, q, t);
    }
    for (u, v) in g.non_loop_edges() {
        let (un, vn) = (g.name(u), g.name(v));
        let se = edge_block_id(un, vn, false);
        let sp = edge_block_id(un, vn, true);
        b.add_block(se.clone(), s);
        b.add_block(sp.clone(), s);
        b.couple(vertex_block_id(un, "C"), se.clone(), Coupling::CompleteBipartite);
        b.couple(vertex_block_id(un, "C'"), sp.clone(), Coupling::CompleteBipartite);
        b.couple(vertex_block_id(vn, "C"), sp.clone(), Coupling::CompleteBipartite);
        b.couple(vertex_block_id(vn, "C'"), se.clone(), Coupling::CompleteBipartite);
        b.couple("beta", se, Coupling::Apex);
        b.couple("beta", sp, Coupling::Apex);
    }
    b.validate()?;
    Ok(LargeCutPlan { g: g.clone(), cut_size, k, p, q, t, s, blocked: b })
}

/// Number of vertex bipartitions (unordered) whose cut has exactly K edges.
pub fn count_large_cuts_bruteforce(g: &Graph, cut_size: u64) -> Result<BigUint> {
    let n = g.n();
    if n > 8 {
        return Err(Error::Bound(format!("{n} vertices (limit 8)")));
    }
    if n == 0 {
        return Ok(BigUint::from(u64::from(cut_size == 0)));
    }
    let edges = g.non_loop_edges();
    let mut count = 0u64;
    // fix vertex 0 on the left to count unordered bipartitions
    for mask in 0u64..(1u64 << (n - 1)) {
        let side = |v: usize| v > 0 && (mask >> (v - 1)) & 1 == 1;
        let c = edges.iter().filter(|&&(a, b)| side(a) != side(b)).count() as u64;
        if c == cut_size {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Leaf guard for explicit enumeration of large-cut plans.
pub const LARGECUT_ENUM_LIMIT: u128 = 100_000_000;

/// Counts homomorphisms of the expanded plan into H_k whose restriction to
/// every vertex gadget has type T₄ or its mirror, and whose induced
/// bipartition cuts exactly ℓ edges.
pub fn full_hom_count_by_cutsize(plan: &LargeCutPlan, ell: u64) -> Result<BigUint> {
    let h = hk(plan.k as usize)?;
    let t4 = crate::hom_type::table_row(4, plan.k as usize)?;
    let t4m = t4.mirror();
    let mut inst = plan.blocked.expand(&h, 2000)?;
    let names = inst.pattern.names().to_vec();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    // restrict lists to the union of the two types' projections
    for u in plan.g.names() {
        for part in J_PARTS {
            let allowed: BTreeSet<String> =
                t4.projection(part_of(part)).union(&t4m.projection(part_of(part))).cloned().collect();
            let bl = plan.blocked.blocks.iter().find(|b| b.id == vertex_block_id(u, part)).expect("block");
            for m in BlockedInstance::member_names(bl) {
                inst.set_list(index[m.as_str()], Some(allowed.clone()));
            }
        }
    }
    let prob = Problem::new(&inst, &h)?;
    let leaves: f64 = prob.doms.iter().map(|d| d.count_ones() as f64).product();
    if leaves > LARGECUT_ENUM_LIMIT as f64 * 1e6 {
        return Err(Error::Bound("large-cut enumeration too large".into()));
    }
    // strand positions per vertex gadget
    let strands = |u: &str, part: &str| -> Vec<usize> {
        let bl = plan.blocked.blocks.iter().find(|b| b.id == vertex_block_id(u, part)).expect("block");
        BlockedInstance::member_names(bl).iter().map(|m| index[m.as_str()]).collect()
    };
    let per_vertex: Vec<[Vec<usize>; 6]> =
        plan.g.names().iter().map(|u| J_PARTS.map(|part| strands(u, part))).collect();
    let edges = plan.g.non_loop_edges();
    let hn: Vec<String> = h.names().to_vec();
    let mut count = 0u64;
    let mut visited = 0u128;
    let mut overflow = false;
    for_each_hom(&inst, &h, |a| {
        visited += 1;
        if visited > LARGECUT_ENUM_LIMIT {
            overflow = true;
            return;
        }
        let mut side = Vec::with_capacity(per_vertex.len());
        for pv in &per_vertex {
            let pairs = |x: usize, y: usize| -> BTreeSet<(String, String)> {
                pv[x].iter().zip(&pv[y]).map(|(&i, &j)| (hn[a[i]].clone(), hn[a[j]].clone())).collect()
            };
            let ty = HomType::new(pairs(0, 1), pairs(2, 3), pairs(4, 5));
            if ty == t4 {
                side.push(false);
            } else if ty == t4m {
                side.push(true);
            } else {
                return;
            }
        }
        let c = edges.iter().filter(|&&(x, y)| side[x] != side[y]).count() as u64;
        if c == ell {
            count += 1;
        }
    })?;
    if overflow {
        return Err(Error::Bound("large-cut enumeration exceeded the leaf guard".into()));
    }
    Ok(BigUint::from(count))
}

fn part_of(part: &str) -> TypePart {
    match part {
        "A" => TypePart::A,
        "B" => TypePart::B,
        "C" => TypePart::C,
        "C'" => TypePart::CPrime,
        "B'" => TypePart::BPrime,
        _ => TypePart::APrime,
    }
}

/// G plus an apex pinned to `u`; its retraction count equals hom(G, H[Γ(u)]).
pub fn pin_neighborhood_instance(g: &Graph, h: &Graph, u: &str) -> Result<ListedInstance> {
    h.require(u)?;
    if !g.is_irreflexive() {
        return invalid("pattern must be irreflexive");
    }
    let mut apex = "@apex".to_string();
    while g.index_of(&apex).is_some() {
        apex.push('_');
    }
    let mut b = g.to_builder();
    b.vertex(apex.clone(), false);
    for v in g.names() {
        b.edge(apex.clone(), v.clone());
    }
    let pattern = b.build()?;
    let lists = BTreeMap::from([(apex, BTreeSet::from([u.to_string()]))]);
    ListedInstance::new(pattern, &lists, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hk_sizes() {
        let h = hk(1).unwrap();
        assert_eq!(h.n(), 9);
        assert_eq!(h.loop_count(), 6);
        assert_eq!(h.non_loop_edges().len(), 16);
        assert_eq!(h.edge_count(), 22);
        let hp = hk_prime(1).unwrap();
        assert_eq!((hp.n(), hp.loop_count(), hp.non_loop_edges().len()), (5, 3, 4));
    }

    #[test]
    fn pq_for_k1() {
        assert_eq!(choose_pq(1), (44, 52));
    }

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_approx(&[0.5], 4).unwrap(), (vec![1], 2));
        assert_eq!(dirichlet_approx(&[1.5], 2).unwrap(), (vec![3], 2));
    }

    #[test]
    fn j_expansion_size() {
        let h = hk(1).unwrap();
        assert_eq!(build_j(1, 1, 1).unwrap().expand(&h, 100).unwrap().pattern.n(), 9);
        assert_eq!(build_j(2, 3, 1).unwrap().expand(&h, 100).unwrap().pattern.n(), 17);
    }

    #[test]
    fn j3_labels_identity() {
        let l = find_j3_labels(&j3()).unwrap();
        assert_eq!(l.vertices(), ["w", "x0", "x1", "y0", "y1", "z0", "z1"]);
    }
}

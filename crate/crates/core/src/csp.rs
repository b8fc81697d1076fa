//! Boolean CSPs over {Imp, δ0, δ1}: exact counting, graphs and digraphs
//! built from pairs of instances, the parsimonious translation of
//! retraction instances, the bristled-path construction, and the two
//! reduction wrappers (trivial-component stripping and subtraction).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::count::count_list_hom;
use crate::error::{invalid, Error, Result};
use crate::gadget::pbrp_graph;
use crate::graph::{DiGraph, Graph, GraphBuilder, ListedInstance};

pub const CSP_VARIABLE_LIMIT: usize = 24;

/// Separator inside product variable names `(v,x)`.
pub const PRODUCT_SEPARATOR: char = ',';

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    vars: Vec<String>,
    index: HashMap<String, usize>,
    imps: Vec<(usize, usize)>,
    pins: BTreeMap<usize, bool>,
}

impl CspInstance {
    pub fn new(vars: Vec<String>, imps: Vec<(String, String)>, pins: Vec<(String, bool)>) -> Result<CspInstance> {
        let mut index = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        let get = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownVertex(s.to_string()));
        let mut ic = Vec::new();
        for (x, y) in &imps {
            ic.push((get(x)?, get(y)?));
        }
        ic.sort_unstable();
        ic.dedup();
        let mut pm = BTreeMap::new();
        for (x, v) in &pins {
            if pm.insert(get(x)?, *v).is_some() {
                return invalid(format!("more than one pin on `{x}`"));
            }
        }
        Ok(CspInstance { vars, index, imps: ic, pins: pm })
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn imps(&self) -> &[(usize, usize)] {
        &self.imps
    }

    pub fn imp_names(&self) -> Vec<(String, String)> {
        self.imps.iter().map(|&(x, y)| (self.vars[x].clone(), self.vars[y].clone())).collect()
    }

    pub fn pin_names(&self) -> Vec<(String, bool)> {
        self.pins.iter().map(|(&x, &v)| (self.vars[x].clone(), v)).collect()
    }

    pub fn has_pins(&self) -> bool {
        !self.pins.is_empty()
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Whether a full assignment (bit i = variable i) satisfies everything.
    pub fn satisfies(&self, bits: &[bool]) -> bool {
        self.imps.iter().all(|&(x, y)| !bits[x] || bits[y])
            && self.pins.iter().all(|(&x, &v)| bits[x] == v)
    }

    pub fn count(&self) -> Result<BigUint> {
        count_csp(self)
    }
}

fn propagate(
    vals: &mut [Option<bool>],
    start: (usize, bool),
    succ: &[Vec<usize>],
    pred: &[Vec<usize>],
) -> bool {
    let mut stack = vec![start];
    while let Some((x, v)) = stack.pop() {
        match vals[x] {
            Some(w) if w == v => continue,
            Some(_) => return false,
            None => vals[x] = Some(v),
        }
        if v {
            stack.extend(succ[x].iter().map(|&y| (y, true)));
        } else {
            stack.extend(pred[x].iter().map(|&y| (y, false)));
        }
    }
    true
}

fn count_rec(vals: &mut Vec<Option<bool>>, succ: &[Vec<usize>], pred: &[Vec<usize>]) -> u64 {
    let Some(x) = vals.iter().position(Option::is_none) else {
        return 1;
    };
    let mut total = 0;
    for v in [false, true] {
        let mut nv = vals.clone();
        if propagate(&mut nv, (x, v), succ, pred) {
            total += count_rec(&mut nv, succ, pred);
        }
    }
    total
}

/// Exact number of satisfying assignments.
pub fn count_csp(i: &CspInstance) -> Result<BigUint> {
    let n = i.vars.len();
    if n > CSP_VARIABLE_LIMIT {
        return Err(Error::Bound(format!("{n} variables (limit {CSP_VARIABLE_LIMIT})")));
    }
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for &(x, y) in &i.imps {
        succ[x].push(y);
        pred[y].push(x);
    }
    let mut vals = vec![None; n];
    for (&x, &v) in &i.pins {
        if !propagate(&mut vals, (x, v), &succ, &pred) {
            return Ok(BigUint::zero());
        }
    }
    Ok(BigUint::from(count_rec(&mut vals, &succ, &pred)))
}

fn same_variables(a: &CspInstance, b: &CspInstance) -> Result<()> {
    if a.vars != b.vars {
        return invalid("instances must share the same ordered variable set");
    }
    Ok(())
}

/// Satisfying assignments of an Imp-only instance, as bit vectors in
/// increasing binary order.
pub fn solutions(iv: &CspInstance) -> Result<Vec<Vec<bool>>> {
    let n = iv.vars.len();
    if n > 16 {
        return Err(Error::Bound(format!("{n} variables (limit 16 for graph building)")));
    }
    let mut out = Vec::new();
    for m in 0u32..(1u32 << n) {
        let bits: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
        if iv.satisfies(&bits) {
            out.push(bits);
        }
    }
    Ok(out)
}

/// Vertex name of an assignment: its bits in variable order.
pub fn assignment_name(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_assignment(name: &str) -> Option<Vec<bool>> {
    name.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

fn edge_ok(ie: &[(usize, usize)], s: &[bool], t: &[bool]) -> bool {
    ie.iter().all(|&(x, y)| (!s[x] || t[y]) && (!t[x] || s[y]))
}

fn arc_ok(f: &[(usize, usize)], b: &[(usize, usize)], s: &[bool], t: &[bool]) -> bool {
    f.iter().all(|&(x, y)| !s[x] || t[y]) && b.iter().all(|&(x, y)| !t[x] || s[y])
}

fn require_unpinned(i: &CspInstance) -> Result<()> {
    if i.has_pins() {
        return invalid("graph construction takes Imp-only instances");
    }
    Ok(())
}

/// The graph whose vertices are the solutions of `iv` and whose edges
/// (loops included) are the pairs satisfying every constraint of `ie` in
/// both directions.
pub fn build_graph_from_csp(iv: &CspInstance, ie: &CspInstance) -> Result<Graph> {
    same_variables(iv, ie)?;
    require_unpinned(iv)?;
    require_unpinned(ie)?;
    let sols = solutions(iv)?;
    let mut b = GraphBuilder::new();
    for s in &sols {
        b.vertex(assignment_name(s), edge_ok(&ie.imps, s, s));
    }
    for (a, s) in sols.iter().enumerate() {
        for t in &sols[a + 1..] {
            if edge_ok(&ie.imps, s, t) {
                b.edge(assignment_name(s), assignment_name(t));
            }
        }
    }
    b.build()
}

/// Directed variant: arc (σ,σ′) iff forward constraints hold from σ to σ′
/// and backward constraints hold from σ′ to σ.
pub fn build_digraph_from_csp(iv: &CspInstance, fwd: &CspInstance, bwd: &CspInstance) -> Result<DiGraph> {
    same_variables(iv, fwd)?;
    same_variables(iv, bwd)?;
    for i in [iv, fwd, bwd] {
        require_unpinned(i)?;
    }
    let sols = solutions(iv)?;
    let names: Vec<String> = sols.iter().map(|s| assignment_name(s)).collect();
    let mut arcs = Vec::new();
    for (a, s) in sols.iter().enumerate() {
        for (c, t) in sols.iter().enumerate() {
            if arc_ok(&fwd.imps, &bwd.imps, s, t) {
                arcs.push((names[a].clone(), names[c].clone()));
            }
        }
    }
    DiGraph::new(&names, &arcs)
}

pub fn product_variable(v: &str, x: &str) -> String {
    format!("({v}{PRODUCT_SEPARATOR}{x})")
}

fn check_id(s: &str) -> Result<()> {
    if s.contains(PRODUCT_SEPARATOR) || s.contains('(') || s.contains(')') {
        return invalid(format!("identifier `{s}` uses a reserved character"));
    }
    Ok(())
}

fn pinned_assignment(list: Option<&BTreeSet<String>>, sols: &[Vec<bool>], full: usize) -> Result<Option<Vec<bool>>> {
    match list {
        None => Ok(None),
        Some(l) if l.len() == full => Ok(None),
        Some(l) if l.len() == 1 => {
            let name = l.iter().next().expect("one element");
            match parse_assignment(name) {
                Some(bits) if sols.contains(&bits) => Ok(Some(bits)),
                _ => invalid(format!("pinned value `{name}` is not a vertex of the built graph")),
            }
        }
        Some(_) => invalid("retraction lists must have size 1 or |V(H)|"),
    }
}

fn translate_core(
    vertices: &[String],
    arcs: &[(String, String)],
    pins: &[Option<Vec<bool>>],
    iv: &CspInstance,
    fwd: &[(usize, usize)],
    bwd: &[(usize, usize)],
) -> Result<CspInstance> {
    let xs = &iv.vars;
    for v in vertices.iter().chain(xs.iter()) {
        check_id(v)?;
    }
    let mut vars = Vec::new();
    for v in vertices {
        for x in xs {
            vars.push(product_variable(v, x));
        }
    }
    let mut imps = Vec::new();
    for v in vertices {
        for &(x, y) in &iv.imps {
            imps.push((product_variable(v, &xs[x]), product_variable(v, &xs[y])));
        }
    }
    for (u, v) in arcs {
        for &(x, y) in fwd {
            imps.push((product_variable(u, &xs[x]), product_variable(v, &xs[y])));
        }
        for &(x, y) in bwd {
            imps.push((product_variable(v, &xs[x]), product_variable(u, &xs[y])));
        }
    }
    let mut pinv = Vec::new();
    for (k, v) in vertices.iter().enumerate() {
        if let Some(bits) = &pins[k] {
            for (j, x) in xs.iter().enumerate() {
                pinv.push((product_variable(v, x), bits[j]));
            }
        }
    }
    CspInstance::new(vars, imps, pinv)
}

/// Parsimonious translation of a retraction instance over the graph built
/// from (iv, ie) into a CSP instance over V(G) × X.
pub fn translate_ret_to_csp(inst: &ListedInstance, iv: &CspInstance, ie: &CspInstance) -> Result<CspInstance> {
    same_variables(iv, ie)?;
    let sols = solutions(iv)?;
    let g = &inst.pattern;
    let vertices: Vec<String> = g.names().to_vec();
    let pins = (0..g.n())
        .map(|i| pinned_assignment(inst.list(i), &sols, sols.len()))
        .collect::<Result<Vec<_>>>()?;
    let arcs: Vec<(String, String)> =
        g.non_loop_edges().iter().map(|&(a, b)| (g.name(a).to_string(), g.name(b).to_string())).collect();
    // an undirected edge carries the constraint in both orientations
    translate_core(&vertices, &arcs, &pins, iv, &ie.imps, &ie.imps)
}

/// Directed retraction instance: an irreflexive digraph pattern with lists.
#[derive(Clone, Debug)]
pub struct DirectedInstance {
    pub pattern: DiGraph,
    pub lists: BTreeMap<String, BTreeSet<String>>,
}

pub fn translate_ret_to_csp_directed(
    inst: &DirectedInstance,
    iv: &CspInstance,
    fwd: &CspInstance,
    bwd: &CspInstance,
) -> Result<CspInstance> {
    same_variables(iv, fwd)?;
    same_variables(iv, bwd)?;
    let sols = solutions(iv)?;
    let g = &inst.pattern;
    let vertices: Vec<String> = g.names().to_vec();
    let pins = vertices
        .iter()
        .map(|v| pinned_assignment(inst.lists.get(v), &sols, sols.len()))
        .collect::<Result<Vec<_>>>()?;
    let arcs: Vec<(String, String)> =
        g.arcs().iter().map(|&(a, b)| (g.names()[a].clone(), g.names()[b].clone())).collect();
    translate_core(&vertices, &arcs, &pins, iv, &fwd.imps, &bwd.imps)
}

/// Exact directed list-homomorphism count by plain backtracking.
pub fn count_directed(inst: &DirectedInstance, target: &DiGraph) -> Result<BigUint> {
    let g = &inst.pattern;
    let n = g.n();
    let mut doms: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in g.names() {
        match inst.lists.get(v) {
            None => doms.push((0..target.n()).collect()),
            Some(l) => {
                let mut d = Vec::new();
                for t in l {
                    d.push(target.index_of(t).ok_or_else(|| Error::UnknownVertex(t.clone()))?);
                }
                d.sort_unstable();
                doms.push(d);
            }
        }
    }
    let arcs = g.arcs();
    if arcs.iter().any(|&(a, b)| a == b) {
        return invalid("directed pattern must be irreflexive");
    }
    fn rec(k: usize, val: &mut Vec<usize>, doms: &[Vec<usize>], arcs: &[(usize, usize)], t: &DiGraph) -> u64 {
        if k == doms.len() {
            return 1;
        }
        let mut total = 0;
        for &x in &doms[k] {
            val[k] = x;
            let ok = arcs.iter().all(|&(a, b)| {
                if a == k && b < k {
                    t.has_arc(x, val[b])
                } else if b == k && a < k {
                    t.has_arc(val[a], x)
                } else {
                    true
                }
            });
            if ok {
                total += rec(k + 1, val, doms, arcs, t);
            }
        }
        total
    }
    let mut val = vec![0; n];
    Ok(BigUint::from(rec(0, &mut val, &doms, &arcs, target)))
}

/// Variables x0..xQ; iv gets Imp(x_i, x_{i-1}) for i outside S, ie gets
/// Imp(x_j, x_i) for every i < j. An empty S yields a plain reflexive path.
pub fn pbrp_csp(q: usize, s: &BTreeSet<usize>) -> Result<(CspInstance, CspInstance)> {
    if q == 0 {
        return invalid("Q must be positive");
    }
    if s.iter().any(|&i| i == 0 || i > q) {
        return invalid("S must be a subset of [Q]");
    }
    let vars: Vec<String> = (0..=q).map(|i| format!("x{i}")).collect();
    let mut iv = Vec::new();
    for i in 1..=q {
        if !s.contains(&i) {
            iv.push((vars[i].clone(), vars[i - 1].clone()));
        }
    }
    let mut ie = Vec::new();
    for i in 0..=q {
        for j in (i + 1)..=q {
            ie.push((vars[j].clone(), vars[i].clone()));
        }
    }
    Ok((CspInstance::new(vars.clone(), iv, vec![])?, CspInstance::new(vars, ie, vec![])?))
}

/// Path vertex σ_i: x_j = 1 iff j < i (i = 0..Q+1).
pub fn pbrp_path_assignment(q: usize, i: usize) -> Vec<bool> {
    (0..=q).map(|j| j < i).collect()
}

/// Bristle vertex σ′_i: x_j = 1 iff j ≤ i and j ≠ i−1.
pub fn pbrp_bristle_assignment(q: usize, i: usize) -> Vec<bool> {
    (0..=q).map(|j| j <= i && j + 1 != i).collect()
}

/// Checks that the graph built from `pbrp_csp(q, s)` is the bristled path
/// (identified through the σ/σ′ labelling) plus isolated unlooped vertices.
pub fn check_pbrp_structure(q: usize, s: &BTreeSet<usize>) -> Result<bool> {
    let (iv, ie) = pbrp_csp(q, s)?;
    let h = build_graph_from_csp(&iv, &ie)?;
    let reference = pbrp_graph(q, s)?;
    let mut label: HashMap<String, String> = HashMap::new();
    for i in 0..=q + 1 {
        label.insert(format!("c{i}"), assignment_name(&pbrp_path_assignment(q, i)));
    }
    for &i in s {
        label.insert(format!("g{i}"), assignment_name(&pbrp_bristle_assignment(q, i)));
    }
    let image: BTreeSet<&String> = label.values().collect();
    if image.len() != label.len() {
        return Ok(false);
    }
    let mut mapped = Vec::new();
    for name in reference.names() {
        match h.index_of(&label[name]) {
            Some(i) => mapped.push(i),
            None => return Ok(false),
        }
    }
    for a in 0..reference.n() {
        if reference.is_looped(a) != h.is_looped(mapped[a]) {
            return Ok(false);
        }
        for b in 0..reference.n() {
            if reference.adjacent(a, b) != h.adjacent(mapped[a], mapped[b]) {
                return Ok(false);
            }
        }
    }
    // the labelled vertices form a whole component; the rest are isolated
    let inside: BTreeSet<usize> = mapped.iter().copied().collect();
    for c in h.components() {
        let cs: BTreeSet<usize> = c.iter().copied().collect();
        if cs == inside {
            continue;
        }
        if c.len() != 1 || h.is_looped(c[0]) {
            return Ok(false);
        }
    }
    Ok(h.components().iter().any(|c| c.iter().copied().collect::<BTreeSet<_>>() == inside))
}

/// Result of removing trivial components: the core plus the removed pieces.
#[derive(Clone, Debug)]
pub struct StrippedSpec {
    pub components: Vec<Graph>,
}

impl StrippedSpec {
    /// f(G) = Σ hom(G, C) over the removed components.
    pub fn eval(&self, g: &Graph) -> Result<BigUint> {
        let mut total = BigUint::zero();
        for c in &self.components {
            let inst = ListedInstance::full(g.clone(), c)?;
            total += count_list_hom(&inst, c)?;
        }
        Ok(total)
    }
}

fn is_trivial_component(c: &Graph) -> bool {
    match c.n() {
        1 => true,
        2 => c.is_irreflexive() && c.non_loop_edges().len() == 1,
        _ => false,
    }
}

/// Splits off singleton components (looped or not) and unlooped edges.
pub fn strip_trivial_components(h: &Graph) -> Result<(Graph, StrippedSpec)> {
    let comps = h.component_graphs();
    let nontrivial: Vec<usize> = (0..comps.len()).filter(|&i| !is_trivial_component(&comps[i])).collect();
    let core_idx = match nontrivial.len() {
        0 if comps.is_empty() => return Ok((Graph::empty(), StrippedSpec { components: vec![] })),
        0 => 0,
        1 => nontrivial[0],
        _ => return invalid("more than one non-trivial component"),
    };
    let core = comps[core_idx].clone();
    let rest = comps.into_iter().enumerate().filter(|(i, _)| *i != core_idx).map(|(_, c)| c).collect();
    Ok((core, StrippedSpec { components: rest }))
}

/// hom(G, H′) = hom(G, H) − f(G) with exact inputs.
pub fn subtract_wrapper(count_big: &BigUint, f_value: &BigUint) -> Result<BigUint> {
    if f_value > count_big {
        return invalid("subtrahend exceeds the count");
    }
    Ok(count_big - f_value)
}

/// Oracle precision used by the approximate subtraction for offset k ≥ 1.
pub fn subtract_precision(eps: f64, k: &BigUint) -> f64 {
    let k: f64 = k.to_string().parse().unwrap_or(f64::INFINITY);
    eps / (16.0 * k)
}

/// Approximate subtraction: with k = 0 the oracle answer is returned as is;
/// otherwise the oracle is queried at precision ε/(16k) and k is
/// subtracted (saturating at zero).
pub fn approx_subtract<F>(eps: f64, k: &BigUint, mut oracle: F) -> Result<BigUint>
where
    F: FnMut(f64) -> Result<BigUint>,
{
    if k.is_zero() {
        return oracle(eps);
    }
    let r = oracle(subtract_precision(eps, k))?;
    Ok(if &r > k { r - k } else { BigUint::zero() })
}

/// Convenience for tests: the Imp-only CSP on given variables.
pub fn imp_instance(vars: &[&str], imps: &[(&str, &str)]) -> Result<CspInstance> {
    CspInstance::new(
        vars.iter().map(|s| s.to_string()).collect(),
        imps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        vec![],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn small_counts() {
        assert_eq!(count_csp(&imp_instance(&["x"], &[]).unwrap()).unwrap(), BigUint::from(2u32));
        assert_eq!(count_csp(&imp_instance(&["x", "y"], &[("x", "y")]).unwrap()).unwrap(), BigUint::from(3u32));
        let c = CspInstance::new(
            vec!["x".into(), "y".into()],
            vec![("x".into(), "y".into())],
            vec![("x".into(), true)],
        )
        .unwrap();
        assert_eq!(count_csp(&c).unwrap(), BigUint::one());
    }

    #[test]
    fn single_variable_self_implication() {
        let iv = imp_instance(&["x"], &[]).unwrap();
        let ie = imp_instance(&["x"], &[("x", "x")]).unwrap();
        let h = build_graph_from_csp(&iv, &ie).unwrap();
        assert_eq!(h.n(), 2);
        assert!(h.is_looped(0) && h.is_looped(1));
        assert!(h.non_loop_edges().is_empty());
        let d = build_digraph_from_csp(&iv, &ie, &imp_instance(&["x"], &[]).unwrap()).unwrap();
        assert_eq!(d.arcs(), vec![(0, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn subtraction() {
        let n = |x: u32| BigUint::from(x);
        assert_eq!(subtract_wrapper(&n(9), &n(1)).unwrap(), n(8));
        assert_eq!(subtract_wrapper(&n(3), &n(3)).unwrap(), n(0));
        assert!(subtract_wrapper(&n(0), &n(1)).is_err());
    }
}

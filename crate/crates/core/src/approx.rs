//! Approximate counting on top of a counting oracle: median powering,
//! sequential-pinning sampling, and the Monte Carlo union estimator for
//! compactions and surjective homomorphisms.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use serde::Serialize;

use crate::count::{compaction_ie, count_problem, surjective_ie, Cover, Enumerator, Problem, Target};
use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, ListedInstance};
use crate::rng::stream;

/// Median powering uses `POWERING_C · ln(1/δ)` oracle calls.
pub const POWERING_C: f64 = 72.0;
/// Log capacity; the call counter keeps running past it.
pub const ORACLE_LOG_CAP: usize = 4096;
/// Subsets of the pattern considered while building the cover index.
pub const T_SUBSET_LIMIT: u64 = 5_000_000;
/// Homomorphisms enumerated to build the exact first-occurrence table.
pub const EXACT_TABLE_LIMIT: u64 = 50_000_000;
/// Oracle calls allowed before `Sampler::Auto` switches to aggregated draws.
pub const JVV_AUTO_BUDGET: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OracleBehavior {
    Exact,
    Noisy { eps0: f64, delta0: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleCall {
    pub free_vars: usize,
    pub eps: f64,
    pub value: BigUint,
}

/// Approximate counter for list homomorphisms backed by the exact counter.
/// The noisy variant answers within `e^{±ε₀}` of the truth with probability
/// at least `1 − δ₀`, at its own fixed precision (the requested precision is
/// only logged).
pub struct CountingOracle {
    behavior: OracleBehavior,
    rng: Option<ChaCha8Rng>,
    calls: u64,
    log: Vec<OracleCall>,
}

impl CountingOracle {
    pub fn exact() -> CountingOracle {
        CountingOracle { behavior: OracleBehavior::Exact, rng: None, calls: 0, log: Vec::new() }
    }

    pub fn noisy(eps0: f64, delta0: f64, seed: u64) -> Result<CountingOracle> {
        if !(eps0 > 0.0 && eps0 < 1.0) || !(0.0..1.0).contains(&delta0) {
            return invalid("noisy oracle needs ε₀ ∈ (0,1) and δ₀ ∈ [0,1)");
        }
        Ok(CountingOracle {
            behavior: OracleBehavior::Noisy { eps0, delta0, seed },
            rng: Some(stream(seed, u64::MAX, 0)),
            calls: 0,
            log: Vec::new(),
        })
    }

    /// `exact` or `noisy:<ε₀>,<δ₀>`.
    pub fn parse(spec: &str, seed: u64) -> Result<CountingOracle> {
        if spec == "exact" {
            return Ok(Self::exact());
        }
        let rest = spec.strip_prefix("noisy:").ok_or_else(|| Error::Invalid(format!("unknown oracle `{spec}`")))?;
        let (a, b) = rest.split_once(',').ok_or_else(|| Error::Invalid("expected noisy:<ε₀>,<δ₀>".into()))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Invalid(format!("`{s}`: {e}")));
        Self::noisy(num(a)?, num(b)?, seed)
    }

    pub fn behavior(&self) -> OracleBehavior {
        self.behavior
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.behavior, OracleBehavior::Exact)
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn log(&self) -> &[OracleCall] {
        &self.log
    }

    pub fn count(&mut self, p: &Problem, t: &Target, eps: f64) -> BigUint {
        let truth = count_problem(p, t);
        let value = match (self.behavior, self.rng.as_mut()) {
            (OracleBehavior::Noisy { eps0, delta0, .. }, Some(rng)) => perturb(&truth, eps0, delta0, rng),
            _ => truth,
        };
        self.calls += 1;
        if self.log.len() < ORACLE_LOG_CAP {
            let free_vars = p.doms.iter().filter(|d| d.count_ones() > 1).count();
            self.log.push(OracleCall { free_vars, eps, value: value.clone() });
        }
        value
    }

    pub fn count_instance(&mut self, inst: &ListedInstance, target: &Graph, eps: f64) -> Result<BigUint> {
        Ok(self.count(&Problem::new(inst, target)?, &Target::new(target)?, eps))
    }
}

fn times_float(x: &BigUint, f: f64) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone())) * BigRational::from_float(f).unwrap_or_else(BigRational::zero)
}

fn to_biguint(x: &BigRational) -> BigUint {
    x.to_integer().to_biguint().unwrap_or_default()
}

fn perturb(truth: &BigUint, eps0: f64, delta0: f64, rng: &mut ChaCha8Rng) -> BigUint {
    if truth.is_zero() {
        return BigUint::zero();
    }
    let fail = rng.random::<f64>() < delta0;
    let u: f64 = rng.random_range(-eps0..=eps0);
    if fail {
        let sign = if u < 0.0 { -1.0 } else { 1.0 };
        return to_biguint(&times_float(truth, (sign * 3.0 * eps0).exp()).round());
    }
    let lo = to_biguint(&times_float(truth, (-eps0).exp()).ceil());
    let hi = to_biguint(&times_float(truth, eps0.exp()).floor());
    let x = to_biguint(&times_float(truth, u.exp()).round());
    x.clamp(lo, hi)
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        invalid(format!("{name} must lie in (0,1), got {x}"))
    }
}

/// Number of oracle calls whose median is taken.
pub fn powering_calls(delta: f64) -> u64 {
    if delta >= 0.25 {
        return 1;
    }
    // each call errs with probability ≤ 1/4; Chernoff on the median
    ((POWERING_C * (1.0 / delta).ln()).ceil() as u64) | 1
}

/// Median of independent oracle answers; one call when the oracle is
/// deterministic or δ ≥ 1/4.
pub fn powered_count(oracle: &mut CountingOracle, p: &Problem, t: &Target, eps: f64, delta: f64) -> Result<BigUint> {
    check_unit("ε", eps)?;
    check_unit("δ", delta)?;
    let k = if oracle.is_deterministic() { 1 } else { powering_calls(delta) };
    let mut xs: Vec<BigUint> = (0..k).map(|_| oracle.count(p, t, eps)).collect();
    xs.sort();
    Ok(xs.swap_remove(xs.len() / 2))
}

pub fn powered_count_instance(
    oracle: &mut CountingOracle,
    inst: &ListedInstance,
    target: &Graph,
    eps: f64,
    delta: f64,
) -> Result<BigUint> {
    powered_count(oracle, &Problem::new(inst, target)?, &Target::new(target)?, eps, delta)
}

/// Scales big weights into f64 while keeping their ratios.
fn float_weights(ws: &[BigUint]) -> Vec<f64> {
    let bits = ws.iter().map(|w| w.bits()).max().unwrap_or(0);
    let shift = bits.saturating_sub(60);
    ws.iter().map(|w| (w >> shift).to_f64().unwrap_or(0.0)).collect()
}

fn is_hom(p: &Problem, t: &Target, sigma: &[usize]) -> bool {
    (0..p.n()).all(|u| {
        p.doms[u] >> sigma[u] & 1 == 1 && p.adj[u].iter().all(|&v| t.adj[sigma[u]] >> sigma[v] & 1 == 1)
    })
}

/// Sequentially pins each vertex with more than one candidate, choosing a
/// value with probability proportional to the oracle count of the pinned
/// instance. The completed map is verified and the walk restarted on failure.
pub fn sample_hom(oracle: &mut CountingOracle, p: &Problem, t: &Target, eps: f64, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if oracle.count(p, t, eps).is_zero() {
        return Err(Error::Oracle("instance has no homomorphism".into()));
    }
    'attempt: for _ in 0..64 {
        let mut q = p.clone();
        for v in 0..q.n() {
            if q.doms[v].count_ones() <= 1 {
                continue;
            }
            let cands: Vec<usize> = (0..t.n).filter(|&s| q.doms[v] >> s & 1 == 1).collect();
            let counts: Vec<BigUint> = cands
                .iter()
                .map(|&s| {
                    let saved = q.doms[v];
                    q.doms[v] = 1u64 << s;
                    let c = oracle.count(&q, t, eps);
                    q.doms[v] = saved;
                    c
                })
                .collect();
            let ws = float_weights(&counts);
            let total: f64 = ws.iter().sum();
            if total <= 0.0 {
                continue 'attempt;
            }
            let mut x = rng.random::<f64>() * total;
            let mut pick = cands[cands.len() - 1];
            for (k, &w) in ws.iter().enumerate() {
                if w > 0.0 && x < w {
                    pick = cands[k];
                    break;
                }
                x -= w;
            }
            q.doms[v] = 1u64 << pick;
        }
        let sigma: Vec<usize> = q.doms.iter().map(|d| d.trailing_zeros() as usize).collect();
        if q.doms.iter().all(|d| d.count_ones() == 1) && is_hom(p, t, &sigma) {
            return Ok(sigma);
        }
    }
    Err(Error::Oracle("sampler failed to produce a homomorphism".into()))
}

pub fn sample_hom_instance(
    oracle: &mut CountingOracle,
    inst: &ListedInstance,
    target: &Graph,
    eps: f64,
    seed: u64,
) -> Result<BTreeMap<String, String>> {
    let p = Problem::new(inst, target)?;
    let t = Target::new(target)?;
    let sigma = sample_hom(oracle, &p, &t, eps, &mut stream(seed, 0, 0))?;
    Ok(sigma
        .iter()
        .enumerate()
        .map(|(u, &s)| (inst.pattern.name(u).to_string(), target.name(s).to_string()))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    Surjective,
    Compaction,
}

impl CoverMode {
    pub fn parse(s: &str) -> Option<CoverMode> {
        match s {
            "sur" | "surjective" => Some(CoverMode::Surjective),
            "comp" | "compaction" => Some(CoverMode::Compaction),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CoverMode::Surjective => "sur",
            CoverMode::Compaction => "comp",
        }
    }

    fn cover(self) -> Cover {
        match self {
            CoverMode::Surjective => Cover::Vertices,
            CoverMode::Compaction => Cover::VerticesAndEdges,
        }
    }
}

/// A subset U of pattern vertices (ascending) and a cover τ of G[U].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TEntry {
    pub u: Vec<usize>,
    pub tau: Vec<usize>,
}

/// Range of |U| for the cover index.
pub fn subset_sizes(t: &Target, n: usize, mode: CoverMode) -> std::ops::RangeInclusive<usize> {
    match mode {
        CoverMode::Surjective => t.n..=t.n,
        CoverMode::Compaction => {
            let loops = (0..t.n).filter(|&i| t.adj[i] >> i & 1 == 1).count();
            let edges = t.non_loop_edges().len() + loops;
            t.n..=(t.n + 2 * edges).min(n)
        }
    }
}

fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial_sum(n: usize, ks: std::ops::RangeInclusive<usize>) -> u64 {
    let mut total: u64 = 0;
    for k in ks {
        let mut c: u128 = 1;
        for i in 0..k.min(n) {
            c = c * (n - i) as u128 / (i + 1) as u128;
            if c > u64::MAX as u128 {
                return u64::MAX;
            }
        }
        if k <= n {
            total = total.saturating_add(c as u64);
        }
    }
    total
}

/// All (U, τ) ordered by |U|, then U lexicographically, then τ.
pub fn enumerate_t_problem(p: &Problem, t: &Target, mode: CoverMode) -> Result<Vec<TEntry>> {
    let sizes = subset_sizes(t, p.n(), mode);
    let subsets = binomial_sum(p.n(), sizes.clone());
    if subsets > T_SUBSET_LIMIT {
        return Err(Error::Bound(format!("{subsets} candidate subsets (limit {T_SUBSET_LIMIT})")));
    }
    let mut out = Vec::new();
    for k in sizes {
        for_each_subset(p.n(), k, |u| {
            let sub = p.restrict(u);
            let mut taus: Vec<Vec<usize>> = Vec::new();
            Enumerator::new(&sub, t, mode.cover()).for_each(|tau| taus.push(tau.to_vec()));
            taus.sort();
            out.extend(taus.into_iter().map(|tau| TEntry { u: u.to_vec(), tau }));
        });
    }
    Ok(out)
}

pub fn enumerate_t(inst: &ListedInstance, target: &Graph, mode: CoverMode) -> Result<Vec<TEntry>> {
    enumerate_t_problem(&Problem::new(inst, target)?, &Target::new(target)?, mode)
}

/// Finds the first index i with σ|U_i = τ_i.
#[derive(Clone, Debug, Default)]
struct FirstIndex {
    groups: Vec<(Vec<usize>, HashMap<Vec<usize>, usize>)>,
}

impl FirstIndex {
    fn new(entries: &[TEntry]) -> FirstIndex {
        let mut groups: Vec<(Vec<usize>, HashMap<Vec<usize>, usize>)> = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            if groups.last().map_or(true, |g| g.0 != e.u) {
                groups.push((e.u.clone(), HashMap::new()));
            }
            groups.last_mut().expect("group").1.insert(e.tau.clone(), i);
        }
        FirstIndex { groups }
    }

    fn first(&self, sigma: &[usize]) -> Option<usize> {
        self.all(sigma).next()
    }

    fn all<'a>(&'a self, sigma: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
        self.groups.iter().filter_map(move |(u, map)| {
            let key: Vec<usize> = u.iter().map(|&x| sigma[x]).collect();
            map.get(&key).copied()
        })
    }
}

/// Exact |Ω_i| and the number of σ whose first covering index is i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactTable {
    pub sizes: Vec<BigUint>,
    pub first: Vec<BigUint>,
}

impl ExactTable {
    /// |Ω⁺| = Σ |Ω_i|.
    pub fn omega_plus(&self) -> BigUint {
        self.sizes.iter().sum()
    }

    /// |Ω| = Σ first-occurrence counts; equals the true count.
    pub fn omega_first(&self) -> BigUint {
        self.first.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    /// One sequential-pinning sample per draw, counted by the oracle.
    Jvv,
    /// Exactly uniform σ within each Ω_i, drawn in aggregate: the number of
    /// draws landing on each index and the number of first-occurrence hits
    /// are binomial, which is the same law as drawing one at a time.
    Aggregate,
    Auto,
}

impl Sampler {
    pub fn parse(s: &str) -> Option<Sampler> {
        match s {
            "jvv" => Some(Sampler::Jvv),
            "aggregate" => Some(Sampler::Aggregate),
            "auto" => Some(Sampler::Auto),
            _ => None,
        }
    }
}

/// Everything the estimator fixes before sampling.
#[derive(Clone, Debug)]
pub struct CoveragePlan {
    pub mode: CoverMode,
    pub eps: f64,
    pub delta: f64,
    pub eps1: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub entries: Vec<TEntry>,
    pub omegas: Vec<BigUint>,
    pub omega: BigUint,
    pub m: u64,
    /// ε′/(2|V(H)|ⁿ), handed to the sampler.
    pub sample_eps: f64,
    problem: Problem,
    target: Target,
    index: FirstIndex,
}

#[derive(Clone, Debug)]
pub struct CoverageRun {
    pub mode: CoverMode,
    pub t: usize,
    pub omegas: Vec<BigUint>,
    pub omega: BigUint,
    pub m: u64,
    pub successes: u64,
    pub y: BigRational,
    pub seed: u64,
    pub sampler: Sampler,
}

impl CoverageRun {
    pub fn y_f64(&self) -> f64 {
        self.y.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn sample_count(t: usize, eps1: f64, delta1: f64) -> u64 {
    (6.0 * t as f64 * (2.0 / delta1).ln() / (eps1 * eps1)).ceil() as u64
}

impl CoveragePlan {
    pub fn prepare(
        problem: Problem,
        target: Target,
        mode: CoverMode,
        eps: f64,
        delta: f64,
        oracle: &mut CountingOracle,
    ) -> Result<CoveragePlan> {
        check_unit("ε", eps)?;
        check_unit("δ", delta)?;
        let entries = enumerate_t_problem(&problem, &target, mode)?;
        let t = entries.len();
        let eps1 = eps / 12.0;
        let delta1 = delta / 2.0;
        let delta2 = if t == 0 { delta1 } else { delta1 / t as f64 };
        let index = FirstIndex::new(&entries);
        let mut plan = CoveragePlan {
            mode,
            eps,
            delta,
            eps1,
            delta1,
            delta2,
            entries,
            omegas: Vec::new(),
            omega: BigUint::zero(),
            m: 0,
            sample_eps: eps1 / (2.0 * (target.n as f64).powi(problem.n() as i32)),
            problem,
            target,
            index,
        };
        if t == 0 {
            return Ok(plan);
        }
        for i in 0..t {
            let q = plan.pinned(i);
            let w = powered_count(oracle, &q, &plan.target, eps1, delta2)?;
            plan.omega += &w;
            plan.omegas.push(w);
        }
        plan.m = sample_count(t, eps1, delta1);
        Ok(plan)
    }

    pub fn t(&self) -> usize {
        self.entries.len()
    }

    /// The instance with U_i pinned to τ_i.
    pub fn pinned(&self, i: usize) -> Problem {
        let mut q = self.problem.clone();
        let e = &self.entries[i];
        for (k, &u) in e.u.iter().enumerate() {
            q.doms[u] = 1u64 << e.tau[k];
        }
        q
    }

    pub fn first_index(&self, sigma: &[usize]) -> Option<usize> {
        self.index.first(sigma)
    }

    pub fn exact_table(&self) -> Result<ExactTable> {
        let t = self.t();
        let total = match self.mode {
            CoverMode::Surjective => surjective_ie(&self.problem, &self.target),
            CoverMode::Compaction => compaction_ie(&self.problem, &self.target),
        };
        if total > BigUint::from(EXACT_TABLE_LIMIT) {
            return Err(Error::Bound(format!("{total} covers to tabulate (limit {EXACT_TABLE_LIMIT})")));
        }
        let mut sizes = vec![0u64; t];
        let mut first = vec![0u64; t];
        let mut orphans = 0u64;
        Enumerator::new(&self.problem, &self.target, self.mode.cover()).for_each(|sigma| {
            let mut hit = false;
            for i in self.index.all(sigma) {
                if !hit {
                    first[i] += 1;
                    hit = true;
                }
                sizes[i] += 1;
            }
            if !hit {
                orphans += 1;
            }
        });
        if orphans > 0 {
            return Err(Error::Invalid(format!("{orphans} covers missed by the index")));
        }
        Ok(ExactTable {
            sizes: sizes.into_iter().map(BigUint::from).collect(),
            first: first.into_iter().map(BigUint::from).collect(),
        })
    }

    /// E[Y] in closed form when σ is exactly uniform on each Ω_i:
    /// Σ_i ω_i · c_i / |Ω_i|.
    pub fn expected_y(&self, table: &ExactTable) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.t() {
            if table.sizes[i].is_zero() {
                continue;
            }
            let num = BigInt::from(&self.omegas[i] * &table.first[i]);
            acc += BigRational::new(num, BigInt::from(table.sizes[i].clone()));
        }
        acc
    }

    fn resolve(&self, s: Sampler) -> Sampler {
        match s {
            Sampler::Auto => {
                let per = (self.problem.n() * self.target.n + 1) as u64;
                if self.m.saturating_mul(per) <= JVV_AUTO_BUDGET {
                    Sampler::Jvv
                } else {
                    Sampler::Aggregate
                }
            }
            other => other,
        }
    }

    pub fn run(&self, oracle: &mut CountingOracle, seed: u64, sampler: Sampler, table: Option<&ExactTable>) -> Result<CoverageRun> {
        let sampler = self.resolve(sampler);
        let mut run = CoverageRun {
            mode: self.mode,
            t: self.t(),
            omegas: self.omegas.clone(),
            omega: self.omega.clone(),
            m: self.m,
            successes: 0,
            y: BigRational::zero(),
            seed,
            sampler,
        };
        if self.t() == 0 || self.omega.is_zero() {
            return Ok(run);
        }
        run.successes = match sampler {
            Sampler::Jvv => self.run_jvv(oracle, seed)?,
            _ => match table {
                Some(tb) => self.run_aggregate(tb, seed)?,
                None => self.run_aggregate(&self.exact_table()?, seed)?,
            },
        };
        run.y = BigRational::new(
            BigInt::from(&self.omega * BigUint::from(run.successes)),
            BigInt::from(self.m),
        );
        Ok(run)
    }

    fn run_jvv(&self, oracle: &mut CountingOracle, seed: u64) -> Result<u64> {
        let pick = WeightedIndex::new(float_weights(&self.omegas)).map_err(|e| Error::Oracle(e.to_string()))?;
        let mut hits = 0u64;
        for j in 0..self.m {
            let i = pick.sample(&mut stream(seed, j, 0));
            let q = self.pinned(i);
            let sigma = sample_hom(oracle, &q, &self.target, self.sample_eps, &mut stream(seed, j, 1))?;
            if self.index.first(&sigma) == Some(i) {
                hits += 1;
            }
        }
        Ok(hits)
    }

    fn run_aggregate(&self, table: &ExactTable, seed: u64) -> Result<u64> {
        let mut rng = stream(seed, 0, 1);
        let ws = float_weights(&self.omegas);
        let mut suffix = vec![0.0; ws.len() + 1];
        for i in (0..ws.len()).rev() {
            suffix[i] = suffix[i + 1] + ws[i];
        }
        let bin = |n: u64, p: f64, rng: &mut ChaCha8Rng| -> Result<u64> {
            if n == 0 || p <= 0.0 {
                return Ok(0);
            }
            if p >= 1.0 {
                return Ok(n);
            }
            Ok(Binomial::new(n, p).map_err(|e| Error::Oracle(e.to_string()))?.sample(rng))
        };
        let mut left = self.m;
        let mut hits = 0u64;
        for i in 0..ws.len() {
            if left == 0 {
                break;
            }
            let share = if suffix[i] > 0.0 { ws[i] / suffix[i] } else { 0.0 };
            let n_i = if i + 1 == ws.len() { left } else { bin(left, share, &mut rng)? };
            left -= n_i;
            if n_i > 0 && !table.sizes[i].is_zero() {
                let q = ratio_f64(&table.first[i], &table.sizes[i]);
                hits += bin(n_i, q, &mut rng)?;
            }
        }
        Ok(hits)
    }
}

fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    let w = float_weights(&[a.clone(), b.clone()]);
    if w[1] == 0.0 {
        0.0
    } else {
        w[0] / w[1]
    }
}

/// Monte Carlo estimate of the number of surjective homomorphisms or
/// compactions of a listed instance.
pub fn coverage_mc(
    inst: &ListedInstance,
    target: &Graph,
    mode: CoverMode,
    eps: f64,
    delta: f64,
    oracle: &mut CountingOracle,
    seed: u64,
    sampler: Sampler,
) -> Result<(CoveragePlan, CoverageRun)> {
    let plan = CoveragePlan::prepare(Problem::new(inst, target)?, Target::new(target)?, mode, eps, delta, oracle)?;
    let run = plan.run(oracle, seed, sampler, None)?;
    Ok((plan, run))
}

/// Disjoint union of the pattern with a loop-free copy of the target whose
/// vertices are pinned to their originals. Homomorphisms of the input
/// correspond to surjective homomorphisms (and compactions) of the result.
pub fn lhom_padding(inst: &ListedInstance, target: &Graph) -> Result<ListedInstance> {
    let mut k = 0usize;
    let prefix = loop {
        let p = if k == 0 { "@h:".to_string() } else { format!("@h{k}:") };
        if !inst.pattern.names().iter().any(|x| x.starts_with(&p)) {
            break p;
        }
        k += 1;
    };
    let pattern = inst.pattern.disjoint_union(&target.without_loops(), &prefix)?;
    let mut lists = inst.lists_map();
    for name in target.names() {
        lists.insert(format!("{prefix}{name}"), [name.clone()].into_iter().collect());
    }
    ListedInstance::new(pattern, &lists, target)
}

/// 1+ε ≤ e^ε ≤ 1+2ε and 1−ε ≤ e^{−ε} ≤ 1−ε/2.
pub fn accuracy_bounds_hold(eps: f64) -> bool {
    let up = eps.exp();
    let down = (-eps).exp();
    1.0 + eps <= up && up <= 1.0 + 2.0 * eps && 1.0 - eps <= down && down <= 1.0 - eps / 2.0
}

/// Relative window check `e^{-ε} ≤ x/truth ≤ e^{ε}`, exact for zero truth.
pub fn within_factor(x: &BigRational, truth: &BigUint, eps: f64) -> bool {
    if truth.is_zero() {
        return x.is_zero();
    }
    let tr = BigRational::from_integer(BigInt::from(truth.clone()));
    let lo = tr.clone() * BigRational::from_float((-eps).exp()).unwrap_or_else(BigRational::one);
    let hi = tr * BigRational::from_float(eps.exp()).unwrap_or_else(BigRational::one);
    *x >= lo && *x <= hi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::from_parts(&[("a", false), ("b", false)], &[("a", "b")]).unwrap()
    }

    #[test]
    fn k2_cover_index() {
        let inst = ListedInstance::full(k2(), &k2()).unwrap();
        assert_eq!(enumerate_t(&inst, &k2(), CoverMode::Surjective).unwrap().len(), 2);
        assert_eq!(enumerate_t(&inst, &k2(), CoverMode::Compaction).unwrap().len(), 2);
        let single = Graph::from_parts(&[("a", false)], &[]).unwrap();
        let inst = ListedInstance::full(single, &k2()).unwrap();
        assert!(enumerate_t(&inst, &k2(), CoverMode::Surjective).unwrap().is_empty());
    }

    #[test]
    fn exact_expectation_on_k2() {
        let inst = ListedInstance::full(k2(), &k2()).unwrap();
        let mut o = CountingOracle::exact();
        let (plan, run) = coverage_mc(&inst, &k2(), CoverMode::Compaction, 0.2, 0.1, &mut o, 3, Sampler::Auto).unwrap();
        let table = plan.exact_table().unwrap();
        assert_eq!(plan.expected_y(&table), BigRational::from_integer(2.into()));
        assert!(within_factor(&run.y, &BigUint::from(2u32), 0.2));
    }

    #[test]
    fn accuracy_grid() {
        for k in 1..100 {
            assert!(accuracy_bounds_hold(k as f64 / 100.0));
        }
    }
}

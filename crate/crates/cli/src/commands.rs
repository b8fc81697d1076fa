use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use retraction_core::approx::{coverage_mc, CountingOracle, CoverMode, Sampler};
use retraction_core::blocked::count_blocked;
use retraction_core::classify::classify;
use retraction_core::count::{count_compaction_ie, count_mode, count_naive, count_surjective_ie, CountMode};
use retraction_core::csp::{
    build_digraph_from_csp, build_graph_from_csp, check_pbrp_structure, count_csp, pbrp_csp, translate_ret_to_csp,
};
use retraction_core::gadget::{
    analyze_cuts, build_cut_instance, build_fixed_graph, build_j, build_largecut_instance, choose_pq,
    count_large_cuts_bruteforce, count_multiterminal_cuts_bruteforce, default_cut_delta, dirichlet_approx,
    dirichlet_bound, estimate_multiterminal_cuts, ln_big, round_nearest, FixedGraph, LargeCutOverrides,
};
use retraction_core::hom_type::{
    brute_count_by_type, dominance_report, enumerate_maximal_types, sandwich_scan, n_exact, nhat, table_row,
};
use retraction_core::io::{
    parse_blocked, parse_csp, parse_graph, parse_instance, serialize_blocked, serialize_csp, serialize_graph,
};
use retraction_core::rng::stream;
use retraction_core::verify::{resolve_target, run_criterion};
use retraction_core::{BlockedInstance, Graph, ListedInstance};

use crate::{plan, ApproxArgs, Command, CountArgs, CspCmd, EstimateCmd, GadgetCmd, TypesCmd};

/// Cap on expanded vertices when an `exact` oracle must expand a blocked instance.
const EXPAND_LIMIT: u128 = 4096;

pub fn dispatch(cmd: &Command) -> Result<Value> {
    match cmd {
        Command::Classify { target } => {
            let h = read_graph(target)?;
            Ok(serde_json::to_value(classify(&h)?)?)
        }
        Command::Count(a) => count(a),
        Command::Approx(a) => approx(a),
        Command::Gadget(g) => gadget(g),
        Command::Estimate(e) => estimate(e),
        Command::Csp(c) => csp(c),
        Command::Types(t) => types(t),
        Command::Verify { target, quick, seed } => verify(target, *quick, *seed),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn big(x: &BigUint) -> String {
    x.to_string()
}

/// Target path: explicit flag, else the `target` record resolved next to the file.
fn target_path(explicit: &Option<PathBuf>, recorded: Option<&str>, base: &Path) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.clone());
    }
    let rec = recorded.ok_or_else(|| anyhow!("no target given (-H) and the file has no `target` record"))?;
    Ok(base.parent().unwrap_or(Path::new(".")).join(rec))
}

fn load_instance(pattern: &Path, target: &Option<PathBuf>, lists: &Option<PathBuf>) -> Result<(ListedInstance, Graph)> {
    let mut text = read(pattern)?;
    if let Some(l) = lists {
        text.push('\n');
        text.push_str(&read(l)?);
    }
    let raw = parse_instance(&text).with_context(|| format!("parsing {}", pattern.display()))?;
    let h = read_graph(&target_path(target, raw.target.as_deref(), pattern)?)?;
    let inst = raw.resolve(&h)?;
    Ok((inst, h))
}

fn count(a: &CountArgs) -> Result<Value> {
    let mode = CountMode::parse(&a.mode).ok_or_else(|| anyhow!("unknown mode `{}`", a.mode))?;
    let value = match a.method.as_str() {
        "blocked" => {
            if !matches!(mode, CountMode::ListHom | CountMode::Retraction) {
                bail!("blocked instances are counted in lhom or ret mode");
            }
            let (rec, b) = parse_blocked(&read(&a.pattern)?)?;
            let h = read_graph(&target_path(&a.target, rec.as_deref(), &a.pattern)?)?;
            count_blocked(&b, &h)?
        }
        method => {
            let (inst, h) = load_instance(&a.pattern, &a.target, &a.lists)?;
            if mode == CountMode::Retraction && !inst.is_retraction_shaped() {
                bail!("retraction mode needs lists of size 1 or |V(H)|");
            }
            match method {
                "bt" => count_mode(&inst, &h, mode)?,
                "enum" => count_naive(&inst, &h, mode)?,
                "ie" => match mode {
                    CountMode::Surjective => count_surjective_ie(&inst, &h)?,
                    CountMode::Compaction => count_compaction_ie(&inst, &h)?,
                    _ => bail!("inclusion-exclusion applies to sur and comp"),
                },
                other => bail!("unknown method `{other}`"),
            }
        }
    };
    Ok(json!({ "count": big(&value), "mode": a.mode, "method": a.method }))
}

fn ratio_json(r: &BigRational) -> Value {
    json!({ "rational": r.to_string(), "decimal": rational_f64(r) })
}

fn rational_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let n = r.numer().to_biguint().unwrap_or_default();
            let d = r.denom().to_biguint().unwrap_or_default();
            (ln_big(&n) - ln_big(&d)).exp()
        }
    }
}

fn approx(a: &ApproxArgs) -> Result<Value> {
    let mode = CoverMode::parse(&a.mode).ok_or_else(|| anyhow!("mode must be sur or comp"))?;
    let sampler = Sampler::parse(&a.sampler).ok_or_else(|| anyhow!("unknown sampler `{}`", a.sampler))?;
    let (inst, h) = load_instance(&a.pattern, &a.target, &a.lists)?;
    let mut oracle = CountingOracle::parse(&a.oracle, a.seed)?;
    let (plan, run) = coverage_mc(&inst, &h, mode, a.epsilon, a.delta, &mut oracle, a.seed, sampler)?;
    let mut out = json!({
        "mode": mode.as_str(),
        "epsilon": a.epsilon,
        "delta": a.delta,
        "seed": a.seed,
        "oracle": a.oracle,
        "sampler": run.sampler,
        "Y": ratio_json(&run.y),
        "t": run.t,
        "m": run.m,
        "omega": big(&run.omega),
        "successes": run.successes,
        "eps1": plan.eps1,
        "delta1": plan.delta1,
        "oracle_calls": oracle.calls(),
    });
    if a.check {
        let truth = count_mode(&inst, &h, if mode == CoverMode::Surjective { CountMode::Surjective } else { CountMode::Compaction })?;
        out["exact"] = json!(big(&truth));
        if !truth.is_zero() {
            let r = run.y.clone() / BigRational::from_integer(BigInt::from(truth));
            out["ratio"] = json!(rational_f64(&r));
        }
    }
    Ok(out)
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn blocked_summary(b: &BlockedInstance) -> Value {
    json!({
        "blocks": b.blocks.len(),
        "couplings": b.couplings.len(),
        "pins": b.pins.len(),
        "vertices": b.vertex_count().to_string(),
    })
}

fn gadget(cmd: &GadgetCmd) -> Result<Value> {
    match cmd {
        GadgetCmd::CutInstance { graph, terminals, budget, target, delta_prime, epsilon, plan: plan_out, emit: out } => {
            let g = read_graph(graph)?;
            let h = read_graph(target)?;
            let terms: Vec<&str> = terminals.split(',').map(str::trim).collect();
            if terms.len() != 3 {
                bail!("--terminals needs three comma separated vertices");
            }
            let delta = delta_prime.unwrap_or_else(|| default_cut_delta(*epsilon, h.n()));
            let p = build_cut_instance(&g, [terms[0], terms[1], terms[2]], *budget, &h, delta)?;
            let doc = plan::cut_plan_json(&p, &h);
            if let Some(path) = plan_out {
                std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
            }
            emit(out, &serialize_blocked(&p.blocked, None))?;
            Ok(json!({
                "plan": doc,
                "s": p.s,
                "r": p.r,
                "sizes": p.sizes,
                "lambdas": p.lambdas,
                "degrees": p.degrees,
                "dirichlet_n": p.dirichlet_n,
                "z_star_log2": p.z_star_exponent().to_string(),
                "blocked": blocked_summary(&p.blocked),
            }))
        }
        GadgetCmd::LargecutInstance { graph, cut_size, k, p, q, t, s, plan: plan_out, emit: out } => {
            let g = read_graph(graph)?;
            let ov = LargeCutOverrides { p: *p, q: *q, t: *t, s: *s };
            let lp = build_largecut_instance(&g, *cut_size, *k, ov)?;
            let doc = plan::largecut_plan_json(&lp);
            if let Some(path) = plan_out {
                std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
            }
            emit(out, &serialize_blocked(&lp.blocked, None))?;
            Ok(json!({ "plan": doc, "blocked": blocked_summary(&lp.blocked) }))
        }
        GadgetCmd::Fixed { kind, emit: out } => {
            let g = build_fixed_graph(&FixedGraph::parse(kind)?)?;
            let text = serialize_graph(&g);
            emit(out, &text)?;
            Ok(json!({
                "kind": kind,
                "vertices": g.n(),
                "loops": g.loop_count(),
                "non_loop_edges": g.non_loop_edges().len(),
                "graph": text,
            }))
        }
        GadgetCmd::JBlock { p, q, t, emit: out } => {
            let b = build_j(*p, *q, *t)?;
            let text = serialize_blocked(&b, None);
            emit(out, &text)?;
            Ok(json!({ "p": p, "q": q, "t": t, "blocked": blocked_summary(&b), "instance": text }))
        }
        GadgetCmd::Dirichlet { lambdas, n } => {
            let ls: Vec<f64> = lambdas
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| anyhow!("bad number `{x}`")))
                .collect::<Result<_>>()?;
            let (p, r) = dirichlet_approx(&ls, *n)?;
            let err = ls.iter().zip(&p).map(|(&l, &pi)| (r as f64 * l - pi as f64).abs()).fold(0.0, f64::max);
            Ok(json!({ "r": r, "p": p, "max_error": err, "bound": dirichlet_bound(ls.len(), *n) }))
        }
    }
}

/// Builds the blocked-instance oracle named by `spec`.
fn blocked_oracle<'a>(spec: &str, h: &'a Graph) -> Result<Box<dyn FnMut(&BlockedInstance, f64) -> retraction_core::Result<BigUint> + 'a>> {
    match spec {
        "exact-blocked" => Ok(Box::new(move |b, _| count_blocked(b, h))),
        "exact" => Ok(Box::new(move |b, _| {
            let inst = b.expand(h, EXPAND_LIMIT)?;
            retraction_core::count::count_list_hom(&inst, h)
        })),
        s if s.starts_with("noisy:") => {
            let seed: u64 = s[6..].parse().map_err(|_| anyhow!("noisy oracle needs an integer seed"))?;
            Ok(Box::new(move |b, eps| {
                let c = count_blocked(b, h)?;
                let u: f64 = stream(seed, 0, 0).random_range(-1.0..=1.0);
                let f = BigRational::from_float((u * eps).exp()).expect("finite");
                Ok((BigRational::from_integer(BigInt::from(c)) * f).floor().to_integer().to_biguint().unwrap_or_default())
            }))
        }
        other => bail!("unknown oracle `{other}`"),
    }
}

fn estimate(cmd: &EstimateCmd) -> Result<Value> {
    match cmd {
        EstimateCmd::Cuts { plan: path, oracle, epsilon, check } => {
            let (p, h) = plan::rebuild_cut(&plan::load(path)?)?;
            let mut answer = None;
            let mut inner = blocked_oracle(oracle, &h)?;
            let est = estimate_multiterminal_cuts(&p, *epsilon, |b, e| {
                let v = inner(b, e)?;
                answer = Some(v.clone());
                Ok(v)
            })?;
            let mut out = json!({
                "estimate": big(&est),
                "oracle": oracle,
                "epsilon": epsilon,
                "z_star_log2": p.z_star_exponent().to_string(),
            });
            if let Some(q) = &answer {
                out["oracle_answer"] = json!(big(q));
                let r = BigRational::from_integer(BigInt::from(q.clone())) / p.z_star();
                out["ratio"] = ratio_json(&r);
            }
            if *check {
                let t = count_multiterminal_cuts_bruteforce(&p.g, p.terminals.each_ref().map(String::as_str), p.budget)?;
                out["bruteforce"] = json!(big(&t));
                if p.g.n() <= 6 {
                    let a = analyze_cuts(&p, &h)?;
                    out["cuts_analysed"] = json!(a.records.len());
                }
            }
            Ok(out)
        }
        EstimateCmd::Largecut { plan: path, oracle, epsilon, check } => {
            let lp = plan::rebuild_largecut(&plan::load(path)?)?;
            let h = retraction_core::gadget::hk(lp.k as usize)?;
            let t4 = table_row(4, lp.k as usize)?;
            let nt4 = n_exact(&t4, lp.p, lp.q, lp.t);
            if nt4.is_zero() {
                bail!("N(T4) = 0 at p={}, q={}, t={}; the estimator is undefined", lp.p, lp.q, lp.t);
            }
            let denom = BigUint::from(2u32)
                * nt4.pow(lp.g.n() as u32)
                * BigUint::from(4u32).pow((lp.s * lp.cut_size) as u32);
            let mut inner = blocked_oracle(oracle, &h)?;
            let z = inner(&lp.blocked, epsilon / 21.0)?;
            let r = BigRational::new(BigInt::from(z.clone()), BigInt::from(denom.clone()));
            let mut out = json!({
                "estimate": big(&round_nearest(&r)),
                "oracle_answer": big(&z),
                "normaliser": big(&denom),
                "ratio": ratio_json(&r),
            });
            if *check {
                out["bruteforce"] = json!(big(&count_large_cuts_bruteforce(&lp.g, lp.cut_size)?));
            }
            Ok(out)
        }
    }
}

fn csp(cmd: &CspCmd) -> Result<Value> {
    let load = |p: &Path| -> Result<retraction_core::csp::CspInstance> {
        parse_csp(&read(p)?).with_context(|| format!("parsing {}", p.display()))
    };
    match cmd {
        CspCmd::BuildGraph { iv, ie, fwd, bwd, emit: out } => {
            let iv = load(iv)?;
            match (ie, fwd, bwd) {
                (Some(ie), None, None) => {
                    let g = build_graph_from_csp(&iv, &load(ie)?)?;
                    let text = serialize_graph(&g);
                    emit(out, &text)?;
                    Ok(json!({ "vertices": g.n(), "graph": text }))
                }
                (None, Some(f), Some(b)) => {
                    let d = build_digraph_from_csp(&iv, &load(f)?, &load(b)?)?;
                    let arcs: Vec<[&str; 2]> =
                        d.arcs().into_iter().map(|(a, b)| [d.names()[a].as_str(), d.names()[b].as_str()]).collect();
                    Ok(json!({ "vertices": d.names(), "arcs": arcs }))
                }
                _ => bail!("give either --ie, or both --fwd and --bwd"),
            }
        }
        CspCmd::Translate { iv, ie, pattern, emit: out } => {
            let (iv, ie) = (load(iv)?, load(ie)?);
            let h = build_graph_from_csp(&iv, &ie)?;
            let raw = parse_instance(&read(pattern)?)?;
            let inst = raw.resolve(&h)?;
            let c = translate_ret_to_csp(&inst, &iv, &ie)?;
            let text = serialize_csp(&c);
            emit(out, &text)?;
            Ok(json!({ "csp": text }))
        }
        CspCmd::Pbrp { q, s } => {
            let set: BTreeSet<usize> = s
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse().map_err(|_| anyhow!("bad index `{x}`")))
                .collect::<Result<_>>()?;
            let (iv, ie) = pbrp_csp(*q, &set)?;
            let g = build_graph_from_csp(&iv, &ie)?;
            Ok(json!({
                "iv": serialize_csp(&iv),
                "ie": serialize_csp(&ie),
                "graph": serialize_graph(&g),
                "structure_ok": check_pbrp_structure(*q, &set)?,
            }))
        }
        CspCmd::Count { file } => Ok(json!({ "count": big(&count_csp(&load(file)?)?) })),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| anyhow!("bad number `{x}`")))
        .collect()
}

fn types(cmd: &TypesCmd) -> Result<Value> {
    match cmd {
        TypesCmd::Table { k } => {
            let rows: Vec<Value> = (1..=10)
                .map(|i| -> Result<Value> {
                    let t = table_row(i, *k)?;
                    Ok(json!({ "row": i, "type": t, "nhat_bases": t.sizes() }))
                })
                .collect::<Result<_>>()?;
            let found = enumerate_maximal_types(*k)?;
            Ok(json!({ "k": k, "maximal_types_found": found.len(), "rows": rows }))
        }
        TypesCmd::Verify { k, grid } => {
            let mut out = Vec::new();
            let mut all = true;
            for triple in grid.split(';').filter(|x| !x.trim().is_empty()) {
                let v: Vec<u64> = parse_list(triple)?;
                let [p, q, t] = v[..] else { bail!("grid entries are p,q,t triples") };
                let brute = brute_count_by_type(p, q, t, *k)?;
                let mismatches = brute.iter().filter(|(ty, c)| n_exact(ty, p, q, t) != **c).count();
                all &= mismatches == 0;
                out.push(json!({
                    "p": p, "q": q, "t": t,
                    "types": brute.len(),
                    "homomorphisms": big(&brute.values().sum()),
                    "mismatches": mismatches,
                }));
            }
            Ok(json!({ "k": k, "passed": all, "grid": out }))
        }
        TypesCmd::Dominance { k, p, q, ts, scan } => {
            let (dp, dq) = choose_pq(*k as u64);
            let (p, q) = (p.unwrap_or(dp), q.unwrap_or(dq));
            let ts: Vec<u64> = parse_list(ts)?;
            let rep = dominance_report(*k, p, q, &ts)?;
            let sc = sandwich_scan(*k, p, q, *scan)?;
            let t4 = table_row(4, *k)?;
            Ok(json!({
                "dominance": rep,
                "sandwich": sc,
                "nhat_t4": ts.iter().map(|&t| big(&nhat(&t4, p, q, t))).collect::<Vec<_>>(),
            }))
        }
    }
}

fn worker_threads() -> usize {
    std::env::var("RETRACTION_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn verify(target: &str, quick: bool, seed: u64) -> Result<Value> {
    let ids = resolve_target(target).ok_or_else(|| anyhow!("unknown verify target `{target}`"))?;
    let next = AtomicUsize::new(0);
    let reports = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..worker_threads().min(ids.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&id) = ids.get(i) else { break };
                let r = run_criterion(id, quick, seed);
                reports.lock().expect("poisoned").push(r);
            });
        }
    });
    let mut reports = reports.into_inner().expect("poisoned");
    reports.sort_by_key(|r| r.id);
    let summary: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().map(|c| format!("{}: {}", c.name, if c.passed { "pass" } else { "fail" })))
        .collect();
    Ok(json!({
        "target": target,
        "quick": quick,
        "seed": seed,
        "passed": reports.iter().all(|r| r.passed),
        "summary": summary,
        "criteria": reports,
    }))
}

//! Plan files: the construction inputs of a reduction, so a plan can be
//! rebuilt deterministically by `estimate`.

use anyhow::{bail, Context, Result};
use retraction_core::gadget::{
    build_cut_instance, build_largecut_instance, CutReductionPlan, LargeCutOverrides, LargeCutPlan,
};
use retraction_core::io::{parse_graph, serialize_graph};
use retraction_core::Graph;
use serde_json::{json, Value};

pub fn cut_plan_json(plan: &CutReductionPlan, h: &Graph) -> Value {
    json!({
        "kind": "cut",
        "graph": serialize_graph(&plan.g),
        "target": serialize_graph(h),
        "terminals": plan.terminals,
        "budget": plan.budget,
        "delta_prime": plan.delta,
    })
}

pub fn largecut_plan_json(plan: &LargeCutPlan) -> Value {
    json!({
        "kind": "largecut",
        "graph": serialize_graph(&plan.g),
        "cut_size": plan.cut_size,
        "k": plan.k,
        "p": plan.p,
        "q": plan.q,
        "t": plan.t,
        "s": plan.s,
    })
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).with_context(|| format!("plan is missing `{k}`"))
}

fn u64_field(v: &Value, k: &str) -> Result<u64> {
    field(v, k)?.as_u64().with_context(|| format!("`{k}` is not an integer"))
}

fn graph_field(v: &Value, k: &str) -> Result<Graph> {
    let text = field(v, k)?.as_str().with_context(|| format!("`{k}` is not a string"))?;
    Ok(parse_graph(text)?)
}

pub fn load(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing plan {}", path.display()))
}

pub fn rebuild_cut(v: &Value) -> Result<(CutReductionPlan, Graph)> {
    if field(v, "kind")? != "cut" {
        bail!("not a cut plan");
    }
    let g = graph_field(v, "graph")?;
    let h = graph_field(v, "target")?;
    let terms: Vec<String> = serde_json::from_value(field(v, "terminals")?.clone())?;
    if terms.len() != 3 {
        bail!("a cut plan needs three terminals");
    }
    let delta = field(v, "delta_prime")?.as_f64().context("`delta_prime` is not a number")?;
    let plan = build_cut_instance(&g, [&terms[0], &terms[1], &terms[2]], u64_field(v, "budget")?, &h, delta)?;
    Ok((plan, h))
}

pub fn rebuild_largecut(v: &Value) -> Result<LargeCutPlan> {
    if field(v, "kind")? != "largecut" {
        bail!("not a large-cut plan");
    }
    let g = graph_field(v, "graph")?;
    let ov = LargeCutOverrides {
        p: Some(u64_field(v, "p")?),
        q: Some(u64_field(v, "q")?),
        t: Some(u64_field(v, "t")?),
        s: Some(u64_field(v, "s")?),
    };
    Ok(build_largecut_instance(&g, u64_field(v, "cut_size")?, u64_field(v, "k")?, ov)?)
}

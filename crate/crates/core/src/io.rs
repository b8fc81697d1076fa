//! Line-oriented text formats for graphs, listed instances, blocked
//! instances and CSP instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::csp::CspInstance;
use crate::error::{Error, Result};
use crate::graph::{Block, BlockedInstance, Coupling, Graph, GraphBuilder, ListedInstance};

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

fn parse_list(s: &str) -> Option<BTreeSet<String>> {
    if s == "*" {
        None
    } else if s == "-" {
        Some(BTreeSet::new())
    } else {
        Some(s.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect())
    }
}

/// Raw pattern file: an optional target path, a graph, and list records.
#[derive(Clone, Debug)]
pub struct RawInstance {
    pub target: Option<String>,
    pub pattern: Graph,
    pub lists: BTreeMap<String, BTreeSet<String>>,
}

impl RawInstance {
    pub fn resolve(&self, target: &Graph) -> Result<ListedInstance> {
        ListedInstance::new(self.pattern.clone(), &self.lists, target)
    }
}

fn graph_record(b: &mut GraphBuilder, line: usize, f: &[&str]) -> Result<bool> {
    match f[0] {
        "v" => {
            match f.len() {
                2 => b.vertex(f[1], false),
                3 if f[2] == "loop" => b.vertex(f[1], true),
                _ => return perr(line, "expected `v <id> [loop]`"),
            };
            Ok(true)
        }
        "e" => {
            if f.len() != 3 {
                return perr(line, "expected `e <id> <id>`");
            }
            b.edge(f[1], f[2]);
            Ok(true)
        }
        _ => Ok(false),
    }
}

fn finish(b: &GraphBuilder, edges: &[(usize, String, String)], vertices: &BTreeSet<String>) -> Result<Graph> {
    for (line, x, y) in edges {
        for v in [x, y] {
            if !vertices.contains(v) {
                return perr(*line, format!("edge endpoint `{v}` undeclared"));
            }
        }
    }
    b.build().map_err(|e| match e {
        Error::DuplicateVertex(v) => Error::Parse { line: 0, msg: format!("duplicate vertex `{v}`") },
        other => other,
    })
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let inst = parse_instance(text)?;
    if !inst.lists.is_empty() || inst.target.is_some() {
        return perr(0, "graph file contains instance records");
    }
    Ok(inst.pattern)
}

pub fn parse_instance(text: &str) -> Result<RawInstance> {
    let mut b = GraphBuilder::new();
    let mut target = None;
    let mut lists = BTreeMap::new();
    let mut edges = Vec::new();
    let mut vertices = BTreeSet::new();
    let mut list_lines = Vec::new();
    for (line, f) in records(text) {
        if f[0] == "v" && f.len() >= 2 && !vertices.insert(f[1].to_string()) {
            return perr(line, format!("duplicate vertex `{}`", f[1]));
        }
        if graph_record(&mut b, line, &f)? {
            if f[0] == "e" {
                edges.push((line, f[1].to_string(), f[2].to_string()));
            }
            continue;
        }
        match f[0] {
            "target" if f.len() == 2 => target = Some(f[1].to_string()),
            "l" if f.len() == 3 => {
                list_lines.push((line, f[1].to_string()));
                if let Some(l) = parse_list(f[2]) {
                    lists.insert(f[1].to_string(), l);
                }
            }
            _ => return perr(line, format!("unrecognised record `{}`", f.join(" "))),
        }
    }
    for (line, v) in list_lines {
        if !vertices.contains(&v) {
            return perr(line, format!("list for undeclared vertex `{v}`"));
        }
    }
    let pattern = finish(&b, &edges, &vertices)?;
    Ok(RawInstance { target, pattern, lists })
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut s = String::new();
    for i in 0..g.n() {
        if g.is_looped(i) {
            let _ = writeln!(s, "v {} loop", g.name(i));
        } else {
            let _ = writeln!(s, "v {}", g.name(i));
        }
    }
    for (i, j) in g.non_loop_edges() {
        let _ = writeln!(s, "e {} {}", g.name(i), g.name(j));
    }
    s
}

fn render_list(l: Option<&BTreeSet<String>>) -> String {
    match l {
        None => "*".to_string(),
        Some(l) if l.is_empty() => "-".to_string(),
        Some(l) => l.iter().cloned().collect::<Vec<_>>().join(","),
    }
}

pub fn serialize_instance(inst: &ListedInstance, target_path: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(t) = target_path {
        let _ = writeln!(s, "target {t}");
    }
    s.push_str(&serialize_graph(&inst.pattern));
    for i in 0..inst.pattern.n() {
        let _ = writeln!(s, "l {} {}", inst.pattern.name(i), render_list(inst.list(i)));
    }
    s
}

pub fn parse_blocked(text: &str) -> Result<(Option<String>, BlockedInstance)> {
    let mut b = BlockedInstance::default();
    let mut target = None;
    for (line, f) in records(text) {
        match (f[0], f.len()) {
            ("target", 2) => target = Some(f[1].to_string()),
            ("b", 4) => {
                let mult: u64 = f[2]
                    .parse()
                    .map_err(|_| Error::Parse { line, msg: format!("bad multiplicity `{}`", f[2]) })?;
                b.blocks.push(Block { id: f[1].to_string(), mult, list: parse_list(f[3]) });
            }
            ("c", 4) => {
                let c = Coupling::from_tag(f[3])
                    .ok_or_else(|| Error::Parse { line, msg: format!("bad coupling `{}`", f[3]) })?;
                b.couple(f[1], f[2], c);
            }
            ("p", 3) => {
                b.pin(f[1], f[2]);
            }
            _ => return perr(line, format!("unrecognised record `{}`", f.join(" "))),
        }
    }
    b.validate()?;
    Ok((target, b))
}

pub fn serialize_blocked(b: &BlockedInstance, target_path: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(t) = target_path {
        let _ = writeln!(s, "target {t}");
    }
    for bl in &b.blocks {
        let _ = writeln!(s, "b {} {} {}", bl.id, bl.mult, render_list(bl.list.as_ref()));
    }
    for (x, y, c) in &b.couplings {
        let _ = writeln!(s, "c {x} {y} {}", c.tag());
    }
    for (x, t) in &b.pins {
        let _ = writeln!(s, "p {x} {t}");
    }
    s
}

pub fn parse_csp(text: &str) -> Result<CspInstance> {
    let mut vars = Vec::new();
    let mut imps = Vec::new();
    let mut pins = Vec::new();
    for (line, f) in records(text) {
        match (f[0], f.len()) {
            ("x", 2) => vars.push(f[1].to_string()),
            ("imp", 3) => imps.push((f[1].to_string(), f[2].to_string())),
            ("pin", 3) => {
                let v = match f[2] {
                    "0" => false,
                    "1" => true,
                    _ => return perr(line, "pin value must be 0 or 1"),
                };
                pins.push((f[1].to_string(), v));
            }
            _ => return perr(line, format!("unrecognised record `{}`", f.join(" "))),
        }
    }
    CspInstance::new(vars, imps, pins)
}

pub fn serialize_csp(c: &CspInstance) -> String {
    let mut s = String::new();
    for v in c.variables() {
        let _ = writeln!(s, "x {v}");
    }
    for (x, y) in c.imp_names() {
        let _ = writeln!(s, "imp {x} {y}");
    }
    for (x, v) in c.pin_names() {
        let _ = writeln!(s, "pin {x} {}", u8::from(v));
    }
    s
}

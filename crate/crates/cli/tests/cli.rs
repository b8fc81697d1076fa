use std::path::PathBuf;
use std::process::{Command, Output};

use retraction_core::gadget::{build_fixed_graph, FixedGraph};
use retraction_core::io::serialize_graph;
use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retraction-lab")).args(args).current_dir(fixtures()).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn classify_fixture() {
    let out = run(&["classify", "-H", "twrench.hg"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["class"], "BIS_EQUIVALENT", "{v}");
}

#[test]
fn count_edge_into_edge() {
    let out = run(&["count", "-G", "k2.hg", "-H", "k2.hg"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["count"], "2");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "--bogus"]).status.code(), Some(2));
    let out = run(&["classify", "-H", "missing.hg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].is_string());
    assert_eq!(run(&["count", "--mode", "nonsense", "-G", "k2.hg", "-H", "k2.hg"]).status.code(), Some(1));
}

#[test]
fn no_meta_is_reproducible() {
    let args = ["--no-meta", "approx", "--mode", "sur", "-G", "c4.hg", "-H", "p3.hg", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("meta").is_none());
}

#[test]
fn quick_verify_of_one_suite() {
    let out = run(&["--no-meta", "verify", "classify", "--quick"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.contains("\"passed\": false"), "{text}");
}

#[test]
fn fixtures_match_generators() {
    for (file, kind) in [
        ("twrench.hg", "twrench"),
        ("j3.hg", "jq:3"),
        ("wr3.hg", "wr:3"),
        ("h1.hg", "hk:1"),
        ("h2.hg", "hk:2"),
        ("h1prime.hg", "hkp:1"),
        ("pbrp_4_134.hg", "pbrp:4:1,3,4"),
    ] {
        let g = build_fixed_graph(&FixedGraph::parse(kind).unwrap()).unwrap();
        let on_disk = std::fs::read_to_string(fixtures().join(file)).unwrap();
        assert_eq!(on_disk.trim_end(), serialize_graph(&g).trim_end(), "{file}");
    }
}

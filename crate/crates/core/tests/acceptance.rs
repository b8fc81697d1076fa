use retraction_core::verify::{run_criterion, CRITERIA, DEFAULT_SEED};

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (id, name, _) in CRITERIA {
        let report = run_criterion(id, false, DEFAULT_SEED);
        let status = if report.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {id:>2} {name} ({:.1}s)", report.seconds);
        for c in &report.checks {
            println!("       {} {}: {}", if c.passed { "ok " } else { "BAD" }, c.name, c.detail);
            if let Some(cx) = &c.counterexample {
                println!("       counterexample:\n{cx}");
            }
        }
        if !report.passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

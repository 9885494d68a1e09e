//! Runs the full acceptance suite and prints one line per criterion.
//! Set `SPINENT_QUICK=1` to substitute N = 12 for the larger chains.

use spinent::verify::{run_all, VerifyOptions};

#[test]
fn acceptance_criteria() {
    let quick = std::env::var("SPINENT_QUICK").map(|v| v == "1").unwrap_or(false);
    let results = run_all(&VerifyOptions { quick });
    println!();
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

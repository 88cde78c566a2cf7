//! Acceptance suite: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;

use qdtau::suite::{run, Tier};

fn main() -> ExitCode {
    let results = run(Tier::Full);
    for r in &results {
        println!("{}  ({:.1}s, budget {:.0}s)", r.line(), r.seconds, r.budget_seconds);
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

//! One pass/fail line per acceptance criterion, at full size. Runs without
//! the libtest harness so the lines always reach the terminal.

use std::process::ExitCode;

use pursuit::suite::{run, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::full();
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let r = run(id, &cfg);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}

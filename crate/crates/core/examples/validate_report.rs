// The invariant suites behind `momrep validate`, summarized.

use momrep::cli::validate::run_all;

pub fn run_example() -> momrep::Result<bool> {
    let report = run_all();
    for suite in &report.suites {
        println!("{:<12} {}", suite.name, if suite.passed { "pass" } else { "FAIL" });
        for c in &suite.checks {
            println!("    {:<36} {:.3e} <= {:.1e}", c.name, c.measured, c.tolerance);
        }
    }
    Ok(report.passed)
}

#[allow(dead_code)]
fn main() -> momrep::Result<()> {
    run_example().map(|_| ())
}

// Running verification suites from code and reading their reports.

use confquant::verify::{run_suite, Suite, VerifyOptions};

pub fn run_example() -> confquant::Result<()> {
    for suite in [Suite::Commutators, Suite::Ideal, Suite::CurvatureTransforms] {
        let opts = VerifyOptions::default().with_n(2).with_seed(7);
        let report = run_suite(suite, &opts)?;
        println!(
            "{}: {} cases, {} failures ({:.2}s)",
            report.suite,
            report.cases_run,
            report.failures.len(),
            report.elapsed_seconds
        );
        assert!(report.passed());
    }
    let report = run_suite(Suite::Ideal, &VerifyOptions::default().with_n(3))?;
    for note in &report.notes {
        println!("  {note}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> confquant::Result<()> {
    run_example()
}

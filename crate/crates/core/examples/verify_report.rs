// A verification suite run as a library call, printed as a table.

use wmorse::verify::{run_suite, Suite, VerifyOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_suite(Suite::Whittaker, &VerifyOptions::default());
    for c in &report.checks {
        println!("{:?} {:<32} measured {:.2e} threshold {:.0e}", c.status, c.name, c.measured.unwrap_or(f64::NAN), c.threshold);
    }
    println!("suite {} passed: {}", report.suite, report.passed);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

//! A full verification report as JSON, then a one-line verdict per check.

use dpgs::verify::verify;
use dpgs::{Dimension, DoublePowerParams, SolverControls};

fn main() -> Result<(), dpgs::Error> {
    let omega = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3.0 / 16.0);
    let params = DoublePowerParams::new(omega, 2.0, 3.0)?;
    let report = verify(&params, Dimension::THREE, &SolverControls::default())?;
    println!("{}", report.to_json());
    for c in &report.checks {
        println!("{} {:<24} margin {:+.3e}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.margin);
    }
    println!("overall: {}", report.overall);
    Ok(())
}

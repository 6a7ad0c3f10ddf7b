//! The six distinguished points of the double-power nonlinearity, by closed
//! form and by root finding.

use dpgs::roots::{closed_forms_q2p1, critical_points};
use dpgs::{Dimension, DoublePowerParams, RootControls};

fn main() -> Result<(), dpgs::Error> {
    let params = DoublePowerParams::canonical();
    println!("omega = {}, p = {}, q = {}", params.omega(), params.p(), params.q());
    println!("{:>2} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "n", "b", "c", "beta", "theta", "B", "C");
    for n in 1..=5 {
        let n = Dimension::new(n)?;
        let closed = closed_forms_q2p1(&params, n)?;
        let found = critical_points(&params, n, RootControls::default())?;
        println!(
            "{:>2} {:>12.9} {:>12.9} {:>12.9} {:>12.9} {:>12.9} {:>12.9}",
            n.get(), closed.b, closed.c, closed.beta, closed.theta, closed.big_b, closed.big_c
        );
        let worst = [
            closed.b - found.b,
            closed.c - found.c,
            closed.beta - found.beta,
            closed.theta - found.theta,
            closed.big_b - found.big_b,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        println!("   closed form vs root finding: {worst:.1e}");
    }
    Ok(())
}

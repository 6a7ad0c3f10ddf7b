//! Shoots for the ground state and prints a coarse profile.
//!
//! ```text
//! cargo run --example ground_state -- 3 0.1875 2 3
//! ```

use dpgs::shooting::find_ground_state;
use dpgs::{Dimension, DoublePowerParams, SolverControls};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (n, omega, p, q) = match args[..] {
        [] => (3.0, 3.0 / 16.0, 2.0, 3.0),
        [n, omega, p, q] => (n, omega, p, q),
        _ => return Err("usage: ground_state [N OMEGA P Q]".into()),
    };
    let params = DoublePowerParams::new(omega, p, q)?;
    let n = Dimension::new(n as u32)?;
    let gs = find_ground_state(&params, n, &SolverControls::default())?;

    println!("alpha      = {:.12}", gs.alpha);
    println!("c - alpha  = {:.3e}", gs.c_minus_alpha);
    println!("bisections = {}, tail restarts = {}", gs.iterations, gs.restarts);
    println!("outcome    = {:?}", gs.outcome);
    println!("decay rate = {:.4} (limit {:.4})", gs.decay_rate, -omega.sqrt());
    println!();
    let end = gs.trajectory.r_end();
    for k in 0..=12 {
        let r = end * f64::from(k) / 12.0;
        if let Some(s) = gs.trajectory.eval(r.max(gs.trajectory.samples()[0].r)) {
            println!("r = {:>8.3}  u = {:.6e}  u' = {:+.6e}", s.r, s.u, s.du);
        }
    }
    Ok(())
}

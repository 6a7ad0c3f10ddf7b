//! Sweeps ω towards the existence threshold and tracks `‖u‖∞` against `B` and `c`.

use dpgs::roots::critical_points;
use dpgs::shooting::find_ground_state;
use dpgs::{Dimension, DoublePowerParams, RootControls, SolverControls};
use rayon::prelude::*;

fn main() -> Result<(), dpgs::Error> {
    let (p, q) = (2.0, 3.0);
    let n = Dimension::THREE;
    let threshold = DoublePowerParams::new(0.1, p, q)?.existence_threshold();
    let omegas: Vec<f64> = (1..=12).map(|k| threshold * f64::from(k) / 13.0).collect();

    let rows = omegas
        .par_iter()
        .map(|&omega| {
            let params = DoublePowerParams::new(omega, p, q)?;
            let cp = critical_points(&params, n, RootControls::default())?;
            let gs = find_ground_state(&params, n, &SolverControls::default())?;
            Ok((omega, cp, gs.alpha, gs.c_minus_alpha))
        })
        .collect::<Result<Vec<_>, dpgs::Error>>()?;

    println!("omega,B,alpha,c,c_minus_alpha");
    for (omega, cp, alpha, gap) in rows {
        println!("{omega:.6},{:.9},{alpha:.9},{:.9},{gap:.3e}", cp.big_b, cp.c);
    }
    Ok(())
}

//! Close to the existence threshold the ground state hugs `c` for a long
//! stretch and `c - ‖u‖∞` drops far below the spacing of floats near `c`.

use dpgs::shooting::find_ground_state;
use dpgs::{Dimension, DoublePowerParams, SolverControls};

fn main() -> Result<(), dpgs::Error> {
    let ctl = SolverControls::default();
    for omega in [0.18, 0.2, 0.21, 0.215, 0.218, 0.22] {
        let params = DoublePowerParams::new(omega, 2.0, 3.0)?;
        let gs = find_ground_state(&params, Dimension::THREE, &ctl)?;
        // Radius where u falls to half of its maximum.
        let front = gs
            .trajectory
            .samples()
            .iter()
            .find(|s| s.u < 0.5 * gs.alpha)
            .map_or(f64::NAN, |s| s.r);
        println!(
            "omega = {omega:<6} c - alpha = {:.3e}  front at r = {front:7.3}  restarts = {}",
            gs.c_minus_alpha, gs.restarts
        );
    }
    Ok(())
}

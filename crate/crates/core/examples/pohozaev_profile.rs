//! The Pohozaev function along the ground state, written as CSV to stdout.
//! `P` starts at zero, rises, turns once where `u = B` and stays positive.

use std::io::stdout;

use dpgs::pohozaev::{check_positivity, identity_residual, PohozaevProfile, PROFILE_DR};
use dpgs::shooting::find_ground_state;
use dpgs::{Dimension, DoublePowerParams, SolverControls};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = DoublePowerParams::canonical();
    let n = Dimension::THREE;
    let gs = find_ground_state(&params, n, &SolverControls::default())?;
    let fine = gs.trajectory.resample(PROFILE_DR)?;

    let pos = check_positivity(&gs.trajectory, &params, n)?;
    eprintln!("min P = {:.3e}, turning point at r = {:?} (u = {:?})", pos.min_p_all, pos.r_turn, pos.u_at_turn);
    eprintln!("identity residual = {:.3e}", identity_residual(&fine, &params, n)?);

    let every_tenth = gs.trajectory.resample(10.0 * PROFILE_DR)?;
    PohozaevProfile::new(&every_tenth, &params, n).write_csv(stdout().lock())?;
    Ok(())
}

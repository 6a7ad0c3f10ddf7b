//! Radial ground states of `Δu + f(u) = 0` in `ℝⁿ` with the double-power
//! nonlinearity `f(u) = -ωu + u^p - u^q`.
//!
//! The crate is organised bottom-up:
//!
//! - [`nonlinearity`]: `f`, `F`, the Pohozaev trinomial `Σ` and closed-form thresholds.
//! - [`roots`]: bracketed root finding and the critical points `b, c, β, θ, B, C`.
//! - [`shooting`]: the radial ODE, an adaptive Dormand–Prince integrator and
//!   bisection on `u(0)` for the ground state.
//! - [`pohozaev`]: the Pohozaev function `P(r)` along trajectories.
//! - [`verify`]: one-call reports asserting the bounds on `‖u‖∞`.
//! - [`cli`]: the `dpgs` command line front end.
//!
//! ```
//! use dpgs::{Dimension, DoublePowerParams, roots};
//!
//! let params = DoublePowerParams::canonical();
//! let cp = roots::closed_forms_q2p1(&params, Dimension::THREE).unwrap();
//! assert!((cp.big_b - 0.5).abs() < 1e-12);
//! ```

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod nonlinearity;
pub mod pohozaev;
pub mod roots;
pub mod shooting;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use nonlinearity::{Dimension, DoublePowerParams, PohozaevCoeffs, RadialProblem};
pub use roots::{CriticalPoints, RootControls};
pub use shooting::{GroundState, ShootOutcome, SolverControls};

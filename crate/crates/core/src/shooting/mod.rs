//! Shooting for the radial ground state.
//!
//! The radial equation `u'' + ((n-1)/r)u' + f(u) = 0`, `u'(0) = 0` is integrated
//! as the first-order system `(u, v)' = (v, -((n-1)/r)v - f(u))` from a series
//! start just off the origin. Each trajectory is classified as an overshoot
//! (reaches `u = 0`), an undershoot (turns back or is trapped with negative
//! energy) or converged (decays below a floor). Bisection on `α = u(0)` then
//! isolates the ground state.
//!
//! `α` is only known to `alpha_tol`, and the distance to the ground state grows
//! like `e^{√ω r}`, so a single trajectory tracks the decaying solution only
//! down to moderate `u`. The returned trajectory is therefore assembled in
//! segments: where the overshoot/undershoot pair separates, the shoot is
//! restarted from states on the segment between the two and bisected there,
//! which recovers full floating-point resolution for the next stretch of the
//! tail.

mod dopri;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{pow, Dimension, DoublePowerParams};
use crate::roots::{zeros_of_f, zeros_of_primitive, RootControls};

pub use dopri::DenseSegment;
pub use trajectory::{Sample, Trajectory};

use dopri::{step_factor, try_step, State};

/// Relative separation at which an overshoot/undershoot pair stops being
/// trusted as a representative of the ground state.
const SEPARATION_TOL: f64 = 1e-12;
const MAX_SEGMENTS: usize = 40;
const MAX_STEPS: usize = 2_000_000;
const MAX_BISECTIONS: usize = 200;
const EVENT_TOL: f64 = 1e-12;
const MAX_STEP: f64 = 0.02;
/// Below `PLATEAU_GAP · c` the gap `c - u` is integrated directly, so shots
/// with `c - α` far below the spacing of floats near `c` stay distinct.
const PLATEAU_GAP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverControls {
    pub rtol: f64,
    pub atol: f64,
    pub r_max: f64,
    /// Radius of the series start; `None` means `1e-4 · c`.
    pub h0: Option<f64>,
    pub alpha_tol: f64,
    pub u_floor: f64,
}

impl Default for SolverControls {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            r_max: 200.0,
            h0: None,
            alpha_tol: 1e-10,
            u_floor: 1e-8,
        }
    }
}

impl SolverControls {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.rtol, self.atol, self.r_max, self.alpha_tol, self.u_floor];
        if positive.iter().any(|x| !(*x > 0.0 && x.is_finite()))
            || self.h0.is_some_and(|h| !(h > 0.0 && h.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "solver controls must all be positive and finite (got {self:?})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShootOutcome {
    /// `u` reached zero with `u' < 0` at `radius`.
    Overshoot { radius: f64 },
    /// The trajectory turned back (or became trapped) at `radius`.
    Undershoot { radius: f64 },
    /// Decayed below the acceptance floor at `radius`.
    Converged { radius: f64 },
}

impl ShootOutcome {
    pub fn radius(&self) -> f64 {
        match *self {
            ShootOutcome::Overshoot { radius }
            | ShootOutcome::Undershoot { radius }
            | ShootOutcome::Converged { radius } => radius,
        }
    }

    pub fn is_overshoot(&self) -> bool {
        matches!(self, ShootOutcome::Overshoot { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ShootOutcome::Overshoot { .. } => "overshoot",
            ShootOutcome::Undershoot { .. } => "undershoot",
            ShootOutcome::Converged { .. } => "converged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    /// `u(0) = ‖u‖∞`, the midpoint of the final bisection bracket.
    pub alpha: f64,
    /// `c - α` at full relative precision; near the existence threshold
    /// `α` itself rounds to `c`.
    pub c_minus_alpha: f64,
    pub trajectory: Trajectory,
    pub bracket_width: f64,
    pub iterations: usize,
    pub decay_rate: f64,
    /// Number of tail restarts used to assemble `trajectory`.
    pub restarts: usize,
    /// How the assembled trajectory ended.
    pub outcome: ShootOutcome,
}

/// Second-order series start `u(h) = α - f(α)h²/(2n)`, `u'(h) = -f(α)h/n`.
pub fn step_off_origin(params: &DoublePowerParams, n: Dimension, alpha: f64, h0: f64) -> Result<Sample> {
    if !(alpha > 0.0) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
        });
    }
    if !(h0 > 0.0) {
        return Err(Error::Domain { what: "h0", value: h0 });
    }
    let nf = n.as_f64();
    let fa = params.f(alpha);
    Ok(Sample {
        r: h0,
        u: alpha - fa * h0 * h0 / (2.0 * nf),
        du: -fa * h0 / nf,
    })
}

/// Integrates from the series start at `α` until the trajectory is classified.
pub fn integrate(
    params: &DoublePowerParams,
    n: Dimension,
    alpha: f64,
    controls: &SolverControls,
) -> Result<(Trajectory, ShootOutcome)> {
    controls.validate()?;
    let shooter = Shooter::new(params, n, controls)?;
    if !(alpha > 0.0 && alpha <= shooter.c) {
        return Err(Error::Domain {
            what: "alpha (need 0 < alpha <= c)",
            value: alpha,
        });
    }
    shooter.shoot_alpha(alpha)
}

/// Locates the ground state by bisection on `α`.
pub fn find_ground_state(
    params: &DoublePowerParams,
    n: Dimension,
    controls: &SolverControls,
) -> Result<GroundState> {
    params.require_existence()?;
    controls.validate()?;
    let mut shooter = Shooter::new(params, n, controls)?;
    shooter.floor_rule = false;
    let (beta, _) = zeros_of_primitive(params, RootControls::default())?;
    let (b, c) = (shooter.b, shooter.c);
    if controls.alpha_tol >= c - beta {
        return Err(Error::InvalidParameter(format!(
            "alpha_tol {} must be below c - beta = {}",
            controls.alpha_tol,
            c - beta
        )));
    }

    // For n = 1 the energy is conserved and the ground state starts exactly
    // at β, so the undershoot end sits inside (b, β) where F(α) < 0.
    let lo = if n.get() == 1 { 0.5 * (b + beta) } else { beta + 1e-12 * c };
    let mut under = Shot::from_alpha(c, lo);
    let (mut traj_under, out_under) = shooter.shoot(under, None)?;
    let mut over = Shot::from_gap(c, 1e-6 * c);
    let (mut traj_over, mut out_over) = shooter.shoot(over, None)?;
    while !out_over.is_overshoot() && over.gap > 1e-280 {
        over = Shot::from_gap(c, over.gap * 1e-6);
        (traj_over, out_over) = shooter.shoot(over, None)?;
    }
    if out_under.is_overshoot() || !out_over.is_overshoot() {
        return Err(Error::Dichotomy {
            lo,
            hi: over.alpha,
            lo_outcome: out_under.label().into(),
            hi_outcome: out_over.label().into(),
        });
    }

    // Shots reaching r_max without crossing zero are kept on the undershoot side.
    let mut iterations = 0;
    while Shot::width(c, over, under) > controls.alpha_tol {
        if iterations >= MAX_BISECTIONS {
            return Err(Error::NoConvergence { iterations });
        }
        let mid = Shot::midpoint(c, over, under);
        if mid.same(over, c) || mid.same(under, c) {
            break;
        }
        iterations += 1;
        let (traj, outcome) = shooter.shoot(mid, None)?;
        if outcome.is_overshoot() {
            (over, traj_over) = (mid, traj);
        } else {
            (under, traj_under) = (mid, traj);
        }
    }
    let bracket_width = Shot::width(c, over, under);

    // The reported bracket stops at alpha_tol; the trajectory pair is refined
    // down to adjacent distinct shots so the tail starts from the tightest pair.
    loop {
        let mid = Shot::midpoint(c, over, under);
        if mid.same(over, c) || mid.same(under, c) {
            break;
        }
        let (traj, outcome) = shooter.shoot(mid, None)?;
        if outcome.is_overshoot() {
            (over, traj_over) = (mid, traj);
        } else {
            (under, traj_under) = (mid, traj);
        }
    }
    // The absolute tolerance says little about a gap far below it; take the
    // gap from the refined pair.
    let c_minus_alpha = 0.5 * (over.gap + under.gap);
    let alpha = if under.on_plateau(c) { c - c_minus_alpha } else { 0.5 * (over.alpha + under.alpha) };
    let (trajectory, restarts, outcome) = shooter.assemble_tail(traj_over, traj_under, under)?;
    let decay = decay_rate(&trajectory)?;
    Ok(GroundState {
        alpha,
        c_minus_alpha,
        trajectory,
        bracket_width,
        iterations,
        decay_rate: decay,
        restarts,
        outcome,
    })
}

/// Least-squares slope of `ln u` against `r` over the samples with `r > r_end/2`.
///
/// Linearizing at infinity gives `u ~ r^{-(n-1)/2} e^{-√ω r}`, so the slope
/// approaches `-√ω` from below as the tail moves outward.
pub fn decay_rate(traj: &Trajectory) -> Result<f64> {
    let half = 0.5 * traj.r_end();
    let tail: Vec<(f64, f64)> = traj
        .samples()
        .iter()
        .filter(|s| s.r > half && s.u > 0.0)
        .map(|s| (s.r, s.u.ln()))
        .collect();
    if tail.len() < 10 {
        return Err(Error::InsufficientSamples {
            needed: 10,
            got: tail.len(),
        });
    }
    let m = tail.len() as f64;
    let (mx, my) = tail
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let (sxy, sxx) = tail.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    Ok(sxy / sxx)
}

/// A shooting height kept in both coordinates: `alpha` carries full precision
/// away from `c`, `gap = c - alpha` next to it.
#[derive(Debug, Clone, Copy)]
struct Shot {
    alpha: f64,
    gap: f64,
}

impl Shot {
    fn from_alpha(c: f64, alpha: f64) -> Self {
        Shot { alpha, gap: c - alpha }
    }

    fn from_gap(c: f64, gap: f64) -> Self {
        Shot { alpha: c - gap, gap }
    }

    fn on_plateau(&self, c: f64) -> bool {
        self.gap < PLATEAU_GAP * c
    }

    fn width(c: f64, over: Shot, under: Shot) -> f64 {
        if under.on_plateau(c) {
            under.gap - over.gap
        } else {
            over.alpha - under.alpha
        }
    }

    /// Geometric in the gap while the bracket spans decades, arithmetic after.
    fn midpoint(c: f64, over: Shot, under: Shot) -> Shot {
        if under.gap > 2.0 * over.gap {
            Shot::from_gap(c, (over.gap * under.gap).sqrt())
        } else {
            Shot {
                alpha: 0.5 * (over.alpha + under.alpha),
                gap: 0.5 * (over.gap + under.gap),
            }
        }
    }

    /// Whether two shots launch the same trajectory.
    fn same(&self, other: Shot, c: f64) -> bool {
        if self.on_plateau(c) || other.on_plateau(c) {
            self.gap == other.gap
        } else {
            self.alpha == other.alpha
        }
    }
}

enum Plateau {
    /// Classified before leaving the plateau.
    Classified(Trajectory, ShootOutcome),
    /// Left the plateau; carries the next step size.
    Left(Trajectory, f64),
}

struct Shooter<'a> {
    params: &'a DoublePowerParams,
    n: f64,
    b: f64,
    c: f64,
    h0: f64,
    controls: &'a SolverControls,
    /// Stop at the acceptance floor. Off while bracketing the ground state,
    /// where a trajectory passing the floor may still cross zero just after.
    floor_rule: bool,
}

impl<'a> Shooter<'a> {
    fn new(params: &'a DoublePowerParams, n: Dimension, controls: &'a SolverControls) -> Result<Self> {
        let (b, c) = zeros_of_f(params, RootControls::default())?;
        // The plateau phase measures u against c, so c is polished to rounding level.
        let (p, q, omega) = (params.p(), params.q(), params.omega());
        let mut c = c;
        for _ in 0..3 {
            let slope = -omega + p * pow(c, p - 1.0) - q * pow(c, q - 1.0);
            c -= params.f(c) / slope;
        }
        Ok(Self {
            params,
            n: n.as_f64(),
            b,
            c,
            h0: controls.h0.unwrap_or(1e-4 * c),
            controls,
            floor_rule: true,
        })
    }

    fn rhs(&self, r: f64, y: &State) -> State {
        [y[1], -(self.n - 1.0) / r * y[1] - self.params.f_odd(y[0])]
    }

    fn energy(&self, u: f64, v: f64) -> f64 {
        0.5 * v * v + self.params.primitive_even(u)
    }

    fn shoot_alpha(&self, alpha: f64) -> Result<(Trajectory, ShootOutcome)> {
        self.shoot(Shot::from_alpha(self.c, alpha), None)
    }

    /// Shoots from `shot`, crossing the plateau near `c` in the deviation
    /// `w = c - u` when the gap is small.
    fn shoot(&self, shot: Shot, r_stop: Option<f64>) -> Result<(Trajectory, ShootOutcome)> {
        if !shot.on_plateau(self.c) {
            let start = step_off_origin(self.params, Dimension::new(self.n as u32)?, shot.alpha, self.h0)?;
            return self.run_until(start, self.h0, r_stop);
        }
        let (mut traj, h) = match self.run_plateau(shot.gap, r_stop)? {
            Plateau::Classified(traj, outcome) => return Ok((traj, outcome)),
            Plateau::Left(traj, h) => (traj, h),
        };
        let start = *traj.last().expect("plateau phase records its start");
        let (rest, outcome) = self.run_until(start, h, r_stop)?;
        traj.extend(rest);
        Ok((traj, outcome))
    }

    /// `f(c - w)` without the cancellation of evaluating `f` next to `c`.
    /// The rounding-level residual `f(c)` is dropped, which puts the
    /// equilibrium at exactly `w = 0`.
    fn f_below_c(&self, w: f64) -> f64 {
        let (c, p, q) = (self.c, self.params.p(), self.params.q());
        let x = (-w / c).ln_1p();
        self.params.omega() * w + pow(c, p) * (p * x).exp_m1() - pow(c, q) * (q * x).exp_m1()
    }

    /// Integrates `w'' = -((n-1)/r)w' + f(c - w)` from the series start until
    /// `w` reaches `PLATEAU_GAP · c`. Samples are stored as `(u, u')`.
    fn run_plateau(&self, gap: f64, r_stop: Option<f64>) -> Result<Plateau> {
        let ctl = self.controls;
        let rhs = |r: f64, y: &State| [y[1], -(self.n - 1.0) / r * y[1] + self.f_below_c(y[0])];
        let (r0, g0) = (self.h0, self.f_below_c(gap));
        let mut y = [gap + g0 * r0 * r0 / (2.0 * self.n), g0 * r0 / self.n];
        let mut r = r0;
        let mut traj = Trajectory::with_start(Sample { r, u: self.c - y[0], du: -y[1] });
        let mut k = rhs(r, &y);
        let mut h = self.h0;
        let w_exit = PLATEAU_GAP * self.c;
        let r_limit = r_stop.unwrap_or(ctl.r_max).min(ctl.r_max);
        // w grows from the gap itself, so the absolute tolerance scales with it.
        let atol = ctl.atol * (gap / self.c).max(f64::MIN_POSITIVE);
        for _ in 0..MAX_STEPS {
            if r >= r_limit {
                return Ok(Plateau::Classified(traj, ShootOutcome::Undershoot { radius: r }));
            }
            h = h.min(r_limit - r).min(MAX_STEP);
            if h < 1e-14 * r.max(1.0) {
                return Err(Error::IntegrationFailure {
                    r,
                    reason: format!("step size underflow on the plateau (h={h:e})"),
                });
            }
            let step = try_step(&rhs, r, &y, &k, h, ctl.rtol, atol);
            if !step.err.is_finite() || !step.y.iter().all(|x| x.is_finite()) || step.y[0] >= self.c {
                h *= 0.1;
                continue;
            }
            if step.err > 1.0 {
                h *= step_factor(step.err, false);
                continue;
            }
            let y_old = y;
            y = step.y;
            k = step.k_last;
            r += h;
            h *= step_factor(step.err, true);
            traj.push_step(Sample { r, u: self.c - y[0], du: -y[1] }, step.dense.reflected(self.c));
            if y[0] >= w_exit {
                return Ok(Plateau::Left(traj, h));
            }
            // u above c, or u' changing sign, settles it as for run_until.
            let above_c = y[0] < 0.0;
            let turned = r_stop.is_none() && y[1] <= 0.0 && y_old[1] > 0.0;
            if above_c || turned {
                return Ok(Plateau::Classified(traj, ShootOutcome::Undershoot { radius: r }));
            }
        }
        Err(Error::IntegrationFailure {
            r,
            reason: format!("more than {MAX_STEPS} steps"),
        })
    }

    fn run(&self, start: Sample, h_init: f64) -> Result<(Trajectory, ShootOutcome)> {
        self.run_until(start, h_init, None)
    }

    /// Integrates from `start`, recording every accepted step. With `r_stop`
    /// set, the undershoot and floor rules are disabled and integration
    /// continues to `r_stop`, a zero of `u`, or `u > c`.
    fn run_until(
        &self,
        start: Sample,
        h_init: f64,
        r_stop: Option<f64>,
    ) -> Result<(Trajectory, ShootOutcome)> {
        let ctl = self.controls;
        let rhs = |r: f64, y: &State| self.rhs(r, y);
        let mut traj = Trajectory::with_start(start);
        let (mut r, mut y) = (start.r, [start.u, start.du]);
        let mut k = rhs(r, &y);
        let mut h = h_init;

        let r_limit = r_stop.unwrap_or(ctl.r_max).min(ctl.r_max);
        for _ in 0..MAX_STEPS {
            if r >= r_limit {
                let outcome = if y[0] < ctl.u_floor.sqrt() {
                    ShootOutcome::Converged { radius: r }
                } else {
                    ShootOutcome::Undershoot { radius: r }
                };
                return Ok((traj, outcome));
            }
            h = h.min(r_limit - r).min(MAX_STEP);
            if h < 1e-14 * r.max(1.0) {
                return Err(Error::IntegrationFailure {
                    r,
                    reason: format!("step size underflow (h={h:e})"),
                });
            }
            let step = try_step(&rhs, r, &y, &k, h, ctl.rtol, ctl.atol);
            if !step.err.is_finite() || !step.y.iter().all(|x| x.is_finite()) {
                h *= 0.1;
                continue;
            }
            if step.err > 1.0 {
                h *= step_factor(step.err, false);
                continue;
            }
            let r_new = r + h;
            let y_old = y;
            let seg = step.dense;
            y = step.y;
            k = step.k_last;
            r = r_new;
            h *= step_factor(step.err, true);

            if y[0] <= 0.0 {
                let rc = refine_event(&seg, 0, y_old[0]);
                let [u, du] = seg.eval(rc);
                traj.push_step(Sample { r: rc.max(seg.start()), u, du }, seg);
                return Ok((traj, ShootOutcome::Overshoot { radius: rc }));
            }
            traj.push_step(Sample { r, u: y[0], du: y[1] }, seg);
            if r_stop.is_some() {
                // Above c it has separated from any trajectory starting below c.
                if y[0] > self.c {
                    return Ok((traj, ShootOutcome::Undershoot { radius: r }));
                }
                continue;
            }
            // Above b a rise only counts once u' changes sign, or above c
            // where f < 0 drives blow-up.
            let turned_back = if y[0] < self.b {
                y[1] >= 0.0 || self.energy(y[0], y[1]) < 0.0
            } else {
                (y[1] >= 0.0 && y_old[1] < 0.0) || (y[1] > 0.0 && y[0] > self.c)
            };
            if turned_back {
                let radius = if y[1] >= 0.0 && y_old[1] < 0.0 {
                    refine_event(&seg, 1, y_old[1])
                } else {
                    r
                };
                return Ok((traj, ShootOutcome::Undershoot { radius }));
            }
            if self.floor_rule && y[0] < ctl.u_floor && y[1].abs() < ctl.u_floor {
                return Ok((traj, ShootOutcome::Converged { radius: r }));
            }
        }
        Err(Error::IntegrationFailure {
            r,
            reason: format!("more than {MAX_STEPS} steps"),
        })
    }

    /// Builds the ground-state trajectory from the final overshoot/undershoot
    /// pair, restarting at separation points until the tail converges.
    fn assemble_tail(
        &self,
        mut over: Trajectory,
        mut under: Trajectory,
        under_shot: Shot,
    ) -> Result<(Trajectory, usize, ShootOutcome)> {
        let mut kept: Option<Trajectory> = None;
        let mut restarts = 0;
        let mut last_step = self.h0;

        loop {
            if under.r_end() < over.r_end() {
                under = if restarts == 0 {
                    self.shoot(under_shot, Some(over.r_end()))?.0
                } else {
                    let first = under.samples()[0];
                    self.run_until(first, last_step, Some(over.r_end()))?.0
                };
            }
            let split = separation_index(&over, &under);
            let split_sample = over.samples()[split];
            if split > 0 {
                last_step = split_sample.r - over.samples()[split - 1].r;
            }
            over.truncate(split_sample.r);
            match kept.as_mut() {
                None => kept = Some(over),
                Some(k) => k.extend(over),
            }
            let k = kept.as_ref().expect("kept set above");
            let converged = split_sample.u < self.controls.u_floor
                && split_sample.du.abs() < self.controls.u_floor;
            if converged || split_sample.r >= self.controls.r_max {
                let outcome = ShootOutcome::Converged { radius: k.r_end() };
                return Ok((kept.expect("kept set above"), restarts, outcome));
            }
            if restarts >= MAX_SEGMENTS || split == 0 {
                let outcome = ShootOutcome::Undershoot { radius: k.r_end() };
                return Ok((kept.expect("kept set above"), restarts, outcome));
            }

            restarts += 1;
            let under_state = under.eval(split_sample.r).unwrap_or(split_sample);
            (over, under) = self.bisect_between(split_sample, under_state, last_step)?;
        }
    }

    /// Bisection along the segment between two states at the same radius,
    /// `(1-s)·over + s·under`, down to adjacent floats in `s`. If the endpoints
    /// do not classify as (overshoot, non-overshoot) their slopes are pushed
    /// apart first. Returns the final (overshoot, non-overshoot) pair.
    fn bisect_between(&self, mut over: Sample, mut under: Sample, h: f64) -> Result<(Trajectory, Trajectory)> {
        let mut nudge = (under.du - over.du)
            .abs()
            .max((under.u - over.u).abs())
            .max(1e-14 * over.du.abs())
            .max(f64::MIN_POSITIVE);
        let mut widen = 0;
        let (mut t_over, mut t_under) = loop {
            let (to, oo) = self.run(over, h)?;
            let (tu, ou) = self.run(under, h)?;
            if oo.is_overshoot() && !ou.is_overshoot() {
                break (to, tu);
            }
            widen += 1;
            if widen > 60 {
                return Err(Error::Dichotomy {
                    lo: under.du,
                    hi: over.du,
                    lo_outcome: ou.label().into(),
                    hi_outcome: oo.label().into(),
                });
            }
            if !oo.is_overshoot() {
                over.du -= nudge;
            }
            if ou.is_overshoot() {
                under.du += nudge;
            }
            nudge *= 2.0;
        };

        let state = |s: f64| Sample {
            r: over.r,
            u: over.u + s * (under.u - over.u),
            du: over.du + s * (under.du - over.du),
        };
        let (mut s_over, mut s_under) = (0.0_f64, 1.0_f64);
        while (s_under - s_over).abs() > f64::EPSILON {
            let mid = 0.5 * (s_over + s_under);
            if mid == s_over || mid == s_under {
                break;
            }
            let (t, o) = self.run(state(mid), h)?;
            if o.is_overshoot() {
                s_over = mid;
                t_over = t;
            } else {
                s_under = mid;
                t_under = t;
            }
        }
        Ok((t_over, t_under))
    }
}

/// Index of the last sample of `over` at which `under` still agrees to
/// [`SEPARATION_TOL`] relative.
fn separation_index(over: &Trajectory, under: &Trajectory) -> usize {
    let samples = over.samples();
    let mut last = 0;
    for (i, s) in samples.iter().enumerate() {
        if s.u <= 0.0 {
            break;
        }
        match under.eval(s.r) {
            Some(o) if (o.u - s.u).abs() <= SEPARATION_TOL * s.u => last = i,
            _ => break,
        }
    }
    last
}

/// Bisection on the dense output for a zero of component `comp` inside `seg`,
/// given its (nonzero) value at the segment start.
fn refine_event(seg: &DenseSegment, comp: usize, value_at_start: f64) -> f64 {
    let (mut lo, mut hi) = (seg.start(), seg.end());
    let s_lo = value_at_start > 0.0;
    while hi - lo > EVENT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (seg.eval(mid)[comp] > 0.0) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

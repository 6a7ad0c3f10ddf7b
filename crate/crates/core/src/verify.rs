//! Verification reports: every bound on `‖u‖∞` and every structural
//! property of `Σ` and `P` for one parameter point, as named checks with
//! signed margins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::{
    critical_exponent, existence_threshold, pohozaev_coeffs, sigma_threshold, threshold_ratio_g,
    Dimension, DoublePowerParams, RadialProblem,
};
use crate::pohozaev::{boundary_values, check_positivity, identity_residual, PROFILE_DR};
use crate::roots::{critical_points_auto, CriticalPoints, RootControls};
use crate::shooting::{find_ground_state, GroundState, SolverControls};
use crate::util::{finite_or_null, opt_finite_or_null};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Points in the sign scan of `Σ`.
pub const SIGN_SCAN_POINTS: usize = 10_000;

const POHOZAEV_RESIDUAL_MAX: f64 = 1e-4;
const TURNING_POINT_TOL: f64 = 1e-4;
const P_END_MAX: f64 = 1e-6;
const N2_EQUALITY_TOL: f64 = 1e-10;
const N1_ALPHA_TOL: f64 = 1e-6;

/// One named assertion. `margin` is the signed slack: positive iff passed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(serialize_with = "finite_or_null")]
    pub lhs: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub rhs: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub margin: f64,
}

impl Check {
    /// `lhs < rhs`.
    pub fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            passed: lhs < rhs,
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }

    /// `lhs <= rhs`.
    pub fn at_most(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            passed: lhs <= rhs,
            ..Self::less(name, lhs, rhs)
        }
    }

    /// `|lhs - rhs| <= tol`.
    pub fn close(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = (lhs - rhs).abs();
        Self {
            name: name.into(),
            passed: gap <= tol,
            lhs,
            rhs,
            margin: tol - gap,
        }
    }

    fn failed(name: &str) -> Self {
        Self {
            name: name.into(),
            passed: false,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub omega: f64,
}

impl ParamsEcho {
    pub fn new(params: &DoublePowerParams, n: Dimension) -> Self {
        Self {
            n: n.get(),
            p: params.p(),
            q: params.q(),
            omega: params.omega(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub params: ParamsEcho,
    pub critical_points: Option<CriticalPoints>,
    #[serde(serialize_with = "opt_finite_or_null")]
    pub alpha: Option<f64>,
    #[serde(serialize_with = "opt_finite_or_null")]
    pub c_minus_alpha: Option<f64>,
    pub checks: Vec<Check>,
    pub overall: bool,
    pub controls: SolverControls,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    fn new(params: &DoublePowerParams, n: Dimension, controls: &SolverControls) -> Self {
        Self {
            params: ParamsEcho::new(params, n),
            critical_points: None,
            alpha: None,
            c_minus_alpha: None,
            checks: Vec::new(),
            overall: false,
            controls: *controls,
            error: None,
        }
    }

    fn push(&mut self, check: Check) {
        debug_assert!(self.check(&check.name).is_none(), "duplicate check {}", check.name);
        self.checks.push(check);
    }

    fn finish(mut self) -> Self {
        self.overall = !self.checks.is_empty() && self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Ordering of the critical points, the bounds `β < α < c` and `B < α`, and
/// the dimension split of `B` against `β`.
///
/// For `n = 1` the ground state starts exactly at `β` (energy conservation
/// with `E = 0`), so `β < α` is replaced by `|α - β| <= 1e-6`.
pub fn ordering_report(
    params: &DoublePowerParams,
    n: Dimension,
    controls: &SolverControls,
) -> Result<VerificationReport> {
    Ok(ordering_with_state(params, n, controls)?.0)
}

fn ordering_with_state(
    params: &DoublePowerParams,
    n: Dimension,
    controls: &SolverControls,
) -> Result<(VerificationReport, Option<GroundState>)> {
    params.require_existence()?;
    let mut report = VerificationReport::new(params, n, controls);
    let (cp, _) = critical_points_auto(params, n, RootControls::default())?;
    report.critical_points = Some(cp);
    report.push(Check::less("b_lt_beta", cp.b, cp.beta));
    report.push(Check::less("beta_lt_c", cp.beta, cp.c));
    report.push(Check::less("c_lt_theta", cp.c, cp.theta));
    report.push(dimension_split_check(n, &cp));

    let gs = match find_ground_state(params, n, controls) {
        Ok(gs) => gs,
        Err(e) => {
            report.push(Check::failed("ground_state_solve"));
            report.error = Some(e.to_string());
            return Ok((report.finish(), None));
        }
    };
    let alpha = gs.alpha;
    report.alpha = Some(alpha);
    let tail_u = gs.trajectory.last().map_or(f64::NAN, |s| s.u);
    report.push(Check::less("ground_state_converged", tail_u, controls.u_floor.sqrt()));
    report.c_minus_alpha = Some(gs.c_minus_alpha);
    for check in alpha_bound_checks(n, &cp, &gs) {
        report.push(check);
    }
    Ok((report.finish(), Some(gs)))
}

/// `B < β`, `B = β` or `B > β` according to `n = 1`, `n = 2` or `n >= 3`.
pub fn dimension_split_check(n: Dimension, cp: &CriticalPoints) -> Check {
    match n.get() {
        1 => Check::less("B_lt_beta", cp.big_b, cp.beta),
        2 => Check::close("B_equals_beta", cp.big_b, cp.beta, N2_EQUALITY_TOL),
        _ => Check::less("B_gt_beta", cp.beta, cp.big_b),
    }
}

/// `β < α` (or `α = β` when `n = 1`), `α < c` and `B < α`.
///
/// `α < c` is decided on the gap carried by the solve, since close to the
/// existence threshold `α` rounds to `c`; its `rhs` is the solver's `c`,
/// which may differ from `cp.c` in the last bits.
pub fn alpha_bound_checks(n: Dimension, cp: &CriticalPoints, gs: &GroundState) -> [Check; 3] {
    let alpha = gs.alpha;
    let lower = if n.get() == 1 {
        Check::close("alpha_equals_beta", alpha, cp.beta, N1_ALPHA_TOL)
    } else {
        Check::less("beta_lt_alpha", cp.beta, alpha)
    };
    let below_c = Check {
        name: "alpha_lt_c".into(),
        passed: gs.c_minus_alpha > 0.0,
        lhs: alpha,
        rhs: alpha + gs.c_minus_alpha,
        margin: gs.c_minus_alpha,
    };
    [
        lower,
        below_c,
        Check::less("B_lt_alpha", cp.big_b, alpha),
    ]
}

/// Scans `Σ` on `(0, 2·max(θ, C))` (`2θ` when `C = ∞`) and counts samples
/// whose sign disagrees with `-` on `(0, B)`, `+` on `(B, C)`, `-` beyond `C`.
/// Samples within `1e-9` relative of `B` or `C` are skipped.
pub fn sigma_sign_scan(
    params: &DoublePowerParams,
    n: Dimension,
    cp: &CriticalPoints,
    points: usize,
) -> Check {
    let prob = RadialProblem::new(*params, n);
    let top = 2.0 * if cp.big_c.is_finite() { cp.theta.max(cp.big_c) } else { cp.theta };
    let near = |u: f64, z: f64| z.is_finite() && (u - z).abs() <= 1e-9 * z;
    let mismatches = (0..points)
        .map(|k| (k as f64 + 0.5) / points as f64 * top)
        .filter(|&u| !near(u, cp.big_b) && !near(u, cp.big_c))
        .filter(|&u| {
            let expect_positive = u > cp.big_b && u < cp.big_c;
            let s = prob.sigma(u);
            if expect_positive {
                !(s > 0.0)
            } else {
                !(s < 0.0)
            }
        })
        .count();
    Check::close("sigma_sign_pattern", mismatches as f64, 0.0, 0.0)
}

/// [`ordering_report`] plus the sign pattern of `Σ`, the Pohozaev identity,
/// positivity and the single turning point of `P`, and `P(0) = P(∞) = 0`.
pub fn full_verification(
    params: &DoublePowerParams,
    n: Dimension,
    controls: &SolverControls,
) -> Result<VerificationReport> {
    let (mut report, gs) = ordering_with_state(params, n, controls)?;
    let cp = report.critical_points.expect("set by the ordering report");
    report.push(sigma_sign_scan(params, n, &cp, SIGN_SCAN_POINTS));
    if let Some(gs) = gs {
        pohozaev_checks(&mut report, &gs, &cp, params, n);
    }
    Ok(report.finish())
}

fn pohozaev_checks(
    report: &mut VerificationReport,
    gs: &GroundState,
    cp: &CriticalPoints,
    params: &DoublePowerParams,
    n: Dimension,
) {
    let traj = &gs.trajectory;
    match traj
        .resample(PROFILE_DR)
        .and_then(|grid| identity_residual(&grid, params, n))
    {
        Ok(res) => report.push(Check::at_most("pohozaev_residual", res, POHOZAEV_RESIDUAL_MAX)),
        Err(_) => report.push(Check::failed("pohozaev_residual")),
    }
    match check_positivity(traj, params, n) {
        Ok(pos) => {
            report.push(Check::less("P_positive", 0.0, pos.min_p_all));
            report.push(Check::close(
                "P_single_turning_point",
                pos.sign_changes as f64,
                1.0,
                0.0,
            ));
            let u_turn = pos.u_at_turn.unwrap_or(f64::NAN);
            report.push(Check::close("turning_point_at_B", u_turn, cp.big_b, TURNING_POINT_TOL));
        }
        Err(_) => {
            for name in ["P_positive", "P_single_turning_point", "turning_point_at_B"] {
                report.push(Check::failed(name));
            }
        }
    }
    let (p_start, p_end) = boundary_values(traj, params, n);
    let prob = RadialProblem::new(*params, n);
    // Near the origin P(r) = rⁿ Σ(α)/n + O(r^{n+2}).
    let r0 = traj.r_start();
    let series = r0.powi(n.get() as i32) * prob.sigma(gs.alpha).abs() / n.as_f64();
    report.push(Check::at_most("P_start_vanishes", p_start.abs(), 2.0 * series + 1e-15));
    report.push(Check::at_most("P_end_vanishes", p_end.abs(), P_END_MAX));
}

/// The report emitted when no ground state exists: a single failed
/// existence check and no critical points.
pub fn existence_failure_report(
    params: &DoublePowerParams,
    n: Dimension,
    controls: &SolverControls,
) -> VerificationReport {
    let mut report = VerificationReport::new(params, n, controls);
    let threshold = params.existence_threshold();
    report.push(Check::less("existence", params.omega(), threshold));
    report.error = Some(
        Error::ExistenceViolated {
            omega: params.omega(),
            threshold,
        }
        .to_string(),
    );
    report.finish()
}

/// [`full_verification`], folding an existence violation into a failed report.
pub fn verify(
    params: &DoublePowerParams,
    n: Dimension,
    controls: &SolverControls,
) -> Result<VerificationReport> {
    match full_verification(params, n, controls) {
        Err(Error::ExistenceViolated { .. }) => Ok(existence_failure_report(params, n, controls)),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdComparison {
    pub passed: bool,
    /// `ω_{p,q}`.
    pub lhs: f64,
    /// `ω_{σ,τ,p,q}`.
    pub rhs: f64,
}

/// `ω_{p,q} < ω_{σ,τ,p,q}`, with equality (to `1e-13` relative) for `n = 2`.
pub fn threshold_inequality_check(n: Dimension, p: f64, q: f64) -> Result<ThresholdComparison> {
    let p_star = critical_exponent(n);
    if !(q < p_star) {
        return Err(Error::Domain {
            what: "q (need q < p*(n))",
            value: q,
        });
    }
    let lhs = existence_threshold(p, q)?;
    let rhs = sigma_threshold(pohozaev_coeffs(n, p, q)?, p, q)?;
    let passed = if n.get() == 2 {
        (lhs - rhs).abs() <= 1e-13 * lhs
    } else {
        lhs < rhs
    };
    Ok(ThresholdComparison { passed, lhs, rhs })
}

/// Strict decrease of `g` over `grid_size` points of `(1.001p, 0.999p*(n))`
/// (upper end `10p` when `p*` is infinite), and `g(q) < g(p)` at every point.
pub fn g_monotonicity_check(n: Dimension, p: f64, grid_size: usize) -> Result<bool> {
    if n.get() == 2 {
        return Err(Error::Unsupported(
            "n = 2: thresholds coincide, g is not needed".into(),
        ));
    }
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid_size must be at least 2 (got {grid_size})"
        )));
    }
    let p_star = critical_exponent(n);
    let g_p = threshold_ratio_g(n, p, p)?;
    let (lo, hi) = (1.001 * p, if p_star.is_finite() { 0.999 * p_star } else { 10.0 * p });
    let values = (0..grid_size)
        .map(|k| lo + (hi - lo) * k as f64 / (grid_size - 1) as f64)
        .map(|q| threshold_ratio_g(n, p, q))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.windows(2).all(|w| w[1] < w[0]) && values.iter().all(|&g| g < g_p))
}

/// One valid random parameter point: `n ∈ {1,2,3}`, `p ∈ (1.2, 3)`,
/// `q ∈ (p+0.2, min(2p+2, p*(n)-0.05))`, `ω ∈ (0.2, 0.95)·ω_{p,q}`.
pub fn random_valid_params<R: Rng>(rng: &mut R) -> (DoublePowerParams, Dimension) {
    let n = Dimension::new(rng.gen_range(1..=3)).expect("1..=3 is valid");
    let p: f64 = rng.gen_range(1.2..3.0);
    let q_hi = (2.0 * p + 2.0).min(critical_exponent(n) - 0.05);
    let q = rng.gen_range(p + 0.2..q_hi);
    let thr = existence_threshold(p, q).expect("p < q");
    let omega = rng.gen_range(0.2..0.95) * thr;
    let params = DoublePowerParams::new(omega, p, q).expect("sampled inside the valid region");
    (params, n)
}

/// `count` random parameter points from a seeded generator.
pub fn random_samples(seed: u64, count: usize) -> Vec<(DoublePowerParams, Dimension)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_valid_params(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn names(r: &VerificationReport) -> Vec<&str> {
        r.checks.iter().map(|c| c.name.as_str()).collect()
    }

    #[test]
    fn check_margins_are_signed_slack() {
        let c = Check::less("x", 1.0, 3.0);
        assert!(c.passed && c.margin == 2.0);
        let c = Check::less("x", 3.0, 1.0);
        assert!(!c.passed && c.margin == -2.0);
        let c = Check::close("x", 1.0, 1.5, 0.1);
        assert!(!c.passed && (c.margin + 0.4).abs() < 1e-15);
        assert!(!Check::less("x", f64::NAN, 1.0).passed);
        assert!(Check::at_most("x", 1.0, 1.0).passed);
    }

    #[test]
    fn canonical_n3_full_verification() {
        let prm = DoublePowerParams::canonical();
        let r = full_verification(&prm, dim(3), &SolverControls::default()).unwrap();
        assert!(r.overall, "{:?}", r.failures().collect::<Vec<_>>());
        let alpha = r.alpha.unwrap();
        let b_lt = r.check("B_lt_alpha").unwrap();
        assert!((b_lt.lhs - 0.5).abs() < 1e-12 && (b_lt.margin - (alpha - 0.5)).abs() < 1e-15);
        let res = r.check("pohozaev_residual").unwrap();
        assert!(res.passed && res.margin <= 1e-4);
        let mut seen = names(&r);
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), r.checks.len(), "check names must be unique");
    }

    #[test]
    fn dimension_split_checks() {
        let prm = DoublePowerParams::canonical();
        let ctl = SolverControls::default();
        let r1 = ordering_report(&prm, dim(1), &ctl).unwrap();
        assert!(r1.overall, "{:?}", r1.failures().collect::<Vec<_>>());
        let split = r1.check("B_lt_beta").unwrap();
        assert!((split.lhs - 0.3133945).abs() < 1e-6 && (split.rhs - 0.4031435).abs() < 1e-6);
        assert!(r1.check("alpha_equals_beta").unwrap().passed);

        let r2 = ordering_report(&prm, dim(2), &ctl).unwrap();
        assert!(r2.overall);
        assert!(r2.check("B_equals_beta").unwrap().passed);

        let r3 = ordering_report(&prm, dim(3), &ctl).unwrap();
        assert!(r3.check("B_gt_beta").unwrap().margin > 0.09);
    }

    #[test]
    fn n4_has_tau_zero_and_passes() {
        let prm = DoublePowerParams::canonical();
        let c = pohozaev_coeffs(dim(4), 2.0, 3.0).unwrap();
        assert!((c.sigma - 1.0 / 3.0).abs() < 1e-15 && c.tau.abs() < 1e-15);
        let r = full_verification(&prm, dim(4), &SolverControls::default()).unwrap();
        assert!(r.overall, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.critical_points.unwrap().big_c.is_infinite());
        assert!(r.to_json().contains("\"C\": null"));
    }

    #[test]
    fn existence_violation() {
        let prm = DoublePowerParams::new(0.23, 2.0, 3.0).unwrap();
        let ctl = SolverControls::default();
        assert!(matches!(
            full_verification(&prm, dim(3), &ctl),
            Err(Error::ExistenceViolated { .. })
        ));
        let r = verify(&prm, dim(3), &ctl).unwrap();
        assert!(!r.overall && r.alpha.is_none() && r.critical_points.is_none());
        assert_eq!(names(&r), ["existence"]);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["overall"], false);
        assert!(json["alpha"].is_null());
    }

    #[test]
    fn threshold_inequality_examples() {
        let t = threshold_inequality_check(dim(3), 2.0, 3.0).unwrap();
        assert!(t.passed);
        assert!((t.lhs - 2.0 / 9.0).abs() < 1e-15 && (t.rhs - 0.25).abs() < 1e-15);
        assert!(threshold_inequality_check(dim(2), 2.0, 3.0).unwrap().passed);
        assert!(threshold_inequality_check(dim(3), 2.0, 5.0).is_err());
        assert!(threshold_inequality_check(dim(4), 2.0, 3.0).is_err());
    }

    #[test]
    fn g_monotonicity_examples() {
        assert!(g_monotonicity_check(dim(3), 2.0, 100).unwrap());
        assert!(g_monotonicity_check(dim(1), 2.0, 100).unwrap());
        assert!(g_monotonicity_check(dim(3), 2.0, 1).is_err());
        assert!(g_monotonicity_check(dim(2), 2.0, 100).is_err());
    }

    #[test]
    fn sign_scan_detects_wrong_pattern() {
        let prm = DoublePowerParams::canonical();
        let mut cp = critical_points_auto(&prm, dim(3), RootControls::default()).unwrap().0;
        assert!(sigma_sign_scan(&prm, dim(3), &cp, 10_000).passed);
        cp.big_b = 0.6;
        let bad = sigma_sign_scan(&prm, dim(3), &cp, 10_000);
        assert!(!bad.passed && bad.lhs > 100.0);
    }

    #[test]
    fn random_sampler_stays_in_region() {
        for (prm, n) in random_samples(DEFAULT_SEED, 500) {
            assert!(prm.exists_ground_state());
            assert!(prm.p() > 1.2 && prm.p() < 3.0);
            assert!(prm.q() > prm.p() + 0.2 && prm.q() < critical_exponent(n) - 0.05);
            let ratio = prm.omega() / prm.existence_threshold();
            assert!(ratio > 0.2 - 1e-12 && ratio < 0.95 + 1e-12);
        }
        assert_eq!(random_samples(7, 5), random_samples(7, 5));
    }

    #[test]
    fn reports_are_deterministic() {
        let prm = DoublePowerParams::canonical();
        let ctl = SolverControls::default();
        let a = full_verification(&prm, dim(2), &ctl).unwrap().to_json();
        let b = full_verification(&prm, dim(2), &ctl).unwrap().to_json();
        assert_eq!(a, b);
    }
}

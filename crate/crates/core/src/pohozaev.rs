//! The Pohozaev function along radial trajectories,
//! `P(r) = rⁿ[u'² + 2F(u)] + (n-2)r^{n-1} u u'`, which satisfies
//! `P'(r) = r^{n-1} Σ(u(r))`.
//!
//! Derivatives of `P` are always centered differences of sampled `P`, never
//! derivatives of an interpolant, so the identity check stays independent of
//! the integrator.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::{Dimension, DoublePowerParams, RadialProblem};
use crate::shooting::{Sample, Trajectory};
use crate::util::{fmt_machine, opt_finite_or_null};

/// Uniform spacing used when a trajectory carries dense output.
pub const PROFILE_DR: f64 = 1e-3;

/// `|P'|` below this fraction of `max |P'|` is treated as sign-indeterminate.
const SIGN_NOISE_FRACTION: f64 = 1e-9;

pub fn eval_p(point: &Sample, n: Dimension, params: &DoublePowerParams) -> f64 {
    let nf = n.as_f64();
    let Sample { r, u, du } = *point;
    let rn1 = r.powi(n.get() as i32 - 1);
    rn1 * r * (du * du + 2.0 * params.primitive_even(u)) + (nf - 2.0) * rn1 * u * du
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub r: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Sigma_u")]
    pub sigma_u: f64,
}

/// `P` and `Σ(u)` at every sample of a trajectory, plus the radius where
/// `Σ(u(r))` changes sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PohozaevProfile {
    pub samples: Vec<ProfilePoint>,
    #[serde(serialize_with = "opt_finite_or_null")]
    pub r0: Option<f64>,
}

impl PohozaevProfile {
    pub fn new(traj: &Trajectory, params: &DoublePowerParams, n: Dimension) -> Self {
        let prob = RadialProblem::new(*params, n);
        let samples: Vec<ProfilePoint> = traj
            .samples()
            .iter()
            .map(|s| ProfilePoint {
                r: s.r,
                p: eval_p(s, n, params),
                sigma_u: prob.sigma(s.u.max(0.0)),
            })
            .collect();
        let r0 = samples.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            if a.sigma_u > 0.0 && b.sigma_u <= 0.0 {
                Some(a.r + (b.r - a.r) * a.sigma_u / (a.sigma_u - b.sigma_u))
            } else {
                None
            }
        });
        Self { samples, r0 }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,P,Sigma_u")?;
        for s in &self.samples {
            writeln!(out, "{},{},{}", fmt_machine(s.r), fmt_machine(s.p), fmt_machine(s.sigma_u))?;
        }
        Ok(())
    }
}

/// Max over interior samples of `|ΔP/Δr − r^{n-1}Σ(u)| / (1 + |r^{n-1}Σ(u)|)`,
/// with `ΔP/Δr` the centered difference over the two neighbours.
pub fn identity_residual(traj: &Trajectory, params: &DoublePowerParams, n: Dimension) -> Result<f64> {
    let s = traj.samples();
    if s.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: s.len(),
        });
    }
    let prob = RadialProblem::new(*params, n);
    let p: Vec<f64> = s.iter().map(|x| eval_p(x, n, params)).collect();
    let k = n.get() as i32 - 1;
    let worst = (1..s.len() - 1)
        .map(|i| {
            let fd = (p[i + 1] - p[i - 1]) / (s[i + 1].r - s[i - 1].r);
            let rhs = s[i].r.powi(k) * prob.sigma(s[i].u.max(0.0));
            (fd - rhs).abs() / (1.0 + rhs.abs())
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Sign structure of `P` along a (ground-state) trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    /// `P > 0` at every sample with `r > r_start`.
    pub is_positive: bool,
    /// Minimum of `P` over the trailing half of the samples.
    pub min_p: f64,
    /// Minimum of `P` over all samples with `r > r_start`.
    pub min_p_all: f64,
    /// Where `Σ(u(r))` changes sign, i.e. `u(r0) = B`.
    #[serde(serialize_with = "opt_finite_or_null")]
    pub r0: Option<f64>,
    /// First sign change of the sampled (finite-difference) `P'`.
    #[serde(serialize_with = "opt_finite_or_null")]
    pub r_turn: Option<f64>,
    /// `u` at `r_turn`.
    #[serde(serialize_with = "opt_finite_or_null")]
    pub u_at_turn: Option<f64>,
    /// Number of significant sign changes of the sampled `P'`.
    pub sign_changes: usize,
    /// Exactly one sign change, from positive to negative.
    pub single_turning_point: bool,
}

/// Checks `P > 0` and the single turning point of `P`. Trajectories with
/// dense output are resampled at [`PROFILE_DR`] first.
///
/// Extra sign changes are reported through `single_turning_point`, never
/// as an error.
pub fn check_positivity(
    traj: &Trajectory,
    params: &DoublePowerParams,
    n: Dimension,
) -> Result<PositivityReport> {
    let grid;
    let traj = if traj.has_dense_output() {
        grid = traj.resample(PROFILE_DR)?;
        &grid
    } else {
        traj
    };
    let s = traj.samples();
    if s.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: s.len(),
        });
    }
    let profile = PohozaevProfile::new(traj, params, n);
    let p: Vec<f64> = profile.samples.iter().map(|x| x.p).collect();
    let interior = &p[1..];
    let min_p_all = interior.iter().copied().fold(f64::INFINITY, f64::min);
    let min_p = p[p.len() / 2..].iter().copied().fold(f64::INFINITY, f64::min);

    let dp: Vec<(f64, f64)> = (1..s.len() - 1)
        .map(|i| (s[i].r, (p[i + 1] - p[i - 1]) / (s[i + 1].r - s[i - 1].r)))
        .collect();
    let scale = dp.iter().map(|x| x.1.abs()).fold(0.0, f64::max);
    let floor = SIGN_NOISE_FRACTION * scale;
    let significant: Vec<(f64, f64)> = dp.into_iter().filter(|x| x.1.abs() > floor).collect();
    let mut sign_changes = 0;
    let mut r_turn = None;
    let mut first_up = None;
    for w in significant.windows(2) {
        let ((ra, da), (rb, db)) = (w[0], w[1]);
        if (da > 0.0) != (db > 0.0) {
            sign_changes += 1;
            if r_turn.is_none() {
                r_turn = Some(ra + (rb - ra) * da / (da - db));
                first_up = Some(da > 0.0);
            }
        }
    }
    let u_at_turn = r_turn.and_then(|r| traj.eval(r)).map(|x| x.u);
    Ok(PositivityReport {
        is_positive: min_p_all > 0.0,
        min_p,
        min_p_all,
        r0: profile.r0,
        r_turn,
        u_at_turn,
        sign_changes,
        single_turning_point: sign_changes == 1 && first_up == Some(true),
    })
}

/// `P` at the first and last samples.
pub fn boundary_values(traj: &Trajectory, params: &DoublePowerParams, n: Dimension) -> (f64, f64) {
    match (traj.samples().first(), traj.samples().last()) {
        (Some(a), Some(b)) => (eval_p(a, n, params), eval_p(b, n, params)),
        _ => (0.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn eval_p_examples() {
        let prm = DoublePowerParams::canonical();
        let theta = 2.0 / 3.0 * (1.0 + (5.0_f64 / 32.0).sqrt());
        let at_theta = Sample { r: 1.0, u: theta, du: 0.0 };
        assert!(eval_p(&at_theta, dim(3), &prm).abs() < 1e-15);

        let f_half = -3.0 / 128.0 + 1.0 / 24.0 - 1.0 / 64.0;
        let expected = 8.0 * (0.01 + 2.0 * f_half) + 4.0 * 0.5 * (-0.1);
        let got = eval_p(&Sample { r: 2.0, u: 0.5, du: -0.1 }, dim(3), &prm);
        assert!((got - expected).abs() < 1e-15);
        assert!((f_half - 0.00260416666).abs() < 1e-10);
        assert!((got + 0.0783333).abs() < 1e-6);

        assert_eq!(eval_p(&Sample { r: 3.7, u: 0.0, du: 0.0 }, dim(3), &prm), 0.0);
    }

    #[test]
    fn constant_trajectory_is_a_negative_control() {
        let prm = DoublePowerParams::canonical();
        let theta = 2.0 / 3.0 * (1.0 + (5.0_f64 / 32.0).sqrt());
        let traj = Trajectory::from_samples(
            (1..=50)
                .map(|k| Sample { r: 0.1 * f64::from(k), u: theta, du: 0.0 })
                .collect(),
        )
        .unwrap();
        let profile = PohozaevProfile::new(&traj, &prm, dim(3));
        assert!(profile.samples.iter().all(|x| x.p.abs() < 1e-14));
        let sigma_theta = -theta * prm.f(theta);
        assert!((profile.samples[0].sigma_u - sigma_theta).abs() < 1e-13);
        let res = identity_residual(&traj, &prm, dim(3)).unwrap();
        assert!(res > 1e-2, "residual {res}");
    }

    #[test]
    fn too_few_samples() {
        let prm = DoublePowerParams::canonical();
        let traj = Trajectory::from_samples(vec![
            Sample { r: 0.1, u: 0.5, du: 0.0 },
            Sample { r: 0.2, u: 0.5, du: 0.0 },
        ])
        .unwrap();
        assert!(matches!(
            identity_residual(&traj, &prm, dim(3)),
            Err(Error::InsufficientSamples { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn boundary_values_of_zero_trajectory() {
        let prm = DoublePowerParams::canonical();
        let traj = Trajectory::from_samples(
            (1..=5).map(|k| Sample { r: f64::from(k), u: 0.0, du: 0.0 }).collect(),
        )
        .unwrap();
        assert_eq!(boundary_values(&traj, &prm, dim(3)), (0.0, 0.0));
        assert_eq!(boundary_values(&Trajectory::default(), &prm, dim(3)), (0.0, 0.0));
    }

    #[test]
    fn profile_csv_header() {
        let prm = DoublePowerParams::canonical();
        let traj = Trajectory::from_samples(vec![
            Sample { r: 0.1, u: 0.6, du: -0.01 },
            Sample { r: 0.2, u: 0.59, du: -0.02 },
        ])
        .unwrap();
        let mut buf = Vec::new();
        PohozaevProfile::new(&traj, &prm, dim(3)).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("r,P,Sigma_u"));
        assert_eq!(text.lines().count(), 3);
    }

    mod on_ground_states {
        use super::*;
        use crate::roots::critical_points;
        use crate::shooting::{find_ground_state, integrate, SolverControls};
        use crate::RootControls;

        fn ground(n: u32) -> Trajectory {
            find_ground_state(&DoublePowerParams::canonical(), dim(n), &SolverControls::default())
                .unwrap()
                .trajectory
        }

        #[test]
        fn identity_holds_at_second_order() {
            let prm = DoublePowerParams::canonical();
            let traj = ground(3);
            let coarse = identity_residual(&traj.resample(1e-3).unwrap(), &prm, dim(3)).unwrap();
            let fine = identity_residual(&traj.resample(5e-4).unwrap(), &prm, dim(3)).unwrap();
            assert!(coarse <= 1e-4, "residual {coarse}");
            assert!(coarse / fine >= 3.0, "ratio {}", coarse / fine);
        }

        #[test]
        fn positivity_and_turning_point() {
            let prm = DoublePowerParams::canonical();
            for n in [1, 2, 3, 4] {
                let traj = ground(n);
                let cp = critical_points(&prm, dim(n), RootControls::default()).unwrap();
                let rep = check_positivity(&traj, &prm, dim(n)).unwrap();
                assert!(rep.is_positive, "n={n}: {rep:?}");
                assert!(rep.single_turning_point, "n={n}: {rep:?}");
                let u_turn = rep.u_at_turn.unwrap();
                assert!((u_turn - cp.big_b).abs() < 1e-4, "n={n}: u(r0)={u_turn} B={}", cp.big_b);
                let u_r0 = traj.eval(rep.r0.unwrap()).unwrap().u;
                assert!((u_r0 - cp.big_b).abs() < 1e-6, "n={n}");
            }
        }

        #[test]
        fn boundary_values_vanish() {
            let prm = DoublePowerParams::canonical();
            let traj = ground(3);
            let (p0, p1) = boundary_values(&traj, &prm, dim(3));
            let s0 = traj.samples()[0];
            let series = 2.0 * prm.primitive(0.7356) * s0.r.powi(3);
            assert!(p0.abs() <= 1e-10 && p0.abs() <= 2.0 * series, "P_start {p0}, bound {series}");
            assert!(p1.abs() <= 1e-6, "P_end {p1}");
        }

        #[test]
        fn undershoot_below_b_decreases_p() {
            let prm = DoublePowerParams::canonical();
            let alpha = 0.5 - 0.01;
            let (traj, out) = integrate(&prm, dim(3), alpha, &SolverControls::default()).unwrap();
            assert_eq!(out.label(), "undershoot");
            let prob = RadialProblem::new(prm, dim(3));
            let rs = traj.resample(1e-3).unwrap();
            let s = rs.samples();
            let mut checked = 0;
            for i in 1..s.len() - 1 {
                if s[i].u < 0.5 && prob.sigma(s[i].u) < -1e-6 {
                    let dp = (eval_p(&s[i + 1], dim(3), &prm) - eval_p(&s[i - 1], dim(3), &prm))
                        / (s[i + 1].r - s[i - 1].r);
                    assert!(dp < 0.0, "P' = {dp} at r={}", s[i].r);
                    checked += 1;
                }
            }
            assert!(checked > 100);
            assert!(!check_positivity(&traj, &prm, dim(3)).unwrap().is_positive);
        }

        #[test]
        fn overshoot_still_reports() {
            let prm = DoublePowerParams::canonical();
            let (traj, _) = integrate(&prm, dim(3), 0.74, &SolverControls::default()).unwrap();
            let rep = check_positivity(&traj, &prm, dim(3)).unwrap();
            assert!(rep.min_p.is_finite());
        }
    }
}

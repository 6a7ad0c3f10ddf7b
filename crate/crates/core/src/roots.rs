//! Bracketed root finding and the six critical points `b, c, β, θ, B, C`.
//!
//! `f/u`, `F/u²` and `Σ/(2u²)` all have the form `-ω + A u^{p-1} - Bc u^{q-1}`
//! (up to a constant factor), which is unimodal when `A, Bc > 0`. The maximizer
//! `u* = [A(p-1)/(Bc(q-1))]^{1/(q-p)}` separates the two zeros, so brackets
//! are built from `u*` without scanning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::{pow, Dimension, DoublePowerParams, PohozaevCoeffs, RadialProblem};
use crate::util::finite_or_null;

/// `|τ|` below this is treated as `τ = 0`.
pub const TAU_ZERO_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootControls {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootControls {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl RootControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "root controls need abs_tol > 0 and max_iter >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Brent's method (inverse quadratic / secant steps safeguarded by bisection),
/// followed by a bisection pass that certifies a sign-changing bracket of
/// width at most `abs_tol`, scaled down by `|x|` for roots below one.
/// Returns the midpoint of that bracket.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, controls: RootControls) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    controls.validate()?;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "bracket needs lo < hi (got [{lo}, {hi}])"
        )));
    }
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }

    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    let mut converged = false;

    for _ in 0..controls.max_iter {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * scaled_tol(controls.abs_tol, b);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            converged = true;
            break;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: controls.max_iter,
        });
    }
    if fb == 0.0 {
        return Ok(b);
    }
    polish(&f, b.min(c), b.max(c), controls.abs_tol)
}

fn scaled_tol(abs_tol: f64, x: f64) -> f64 {
    abs_tol * x.abs().min(1.0)
}

fn polish<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= scaled_tol(abs_tol, mid) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Both zeros of a function that is negative near `0⁺`, positive at `peak`
/// and negative again for large `u`.
fn two_zeros<G: Fn(f64) -> f64>(g: G, peak: f64, controls: RootControls) -> Result<(f64, f64)> {
    let mut lo = peak * 1e-8;
    let mut tries = 0;
    while g(lo) >= 0.0 {
        tries += 1;
        if tries > 50 {
            return Err(Error::Bracket {
                lo,
                hi: peak,
                f_lo: g(lo),
                f_hi: g(peak),
            });
        }
        lo *= 0.5;
    }
    let mut hi = 2.0 * peak;
    tries = 0;
    while g(hi) >= 0.0 {
        tries += 1;
        if tries > 200 {
            return Err(Error::Bracket {
                lo: peak,
                hi,
                f_lo: g(peak),
                f_hi: g(hi),
            });
        }
        hi *= 2.0;
    }
    let lower = find_root_bracketed(&g, lo, peak, controls)?;
    let upper = find_root_bracketed(&g, peak, hi, controls)?;
    Ok((lower, upper))
}

fn unimodal_peak(a: f64, bc: f64, p: f64, q: f64) -> f64 {
    pow(a * (p - 1.0) / (bc * (q - 1.0)), 1.0 / (q - p))
}

/// The zeros `b < c` of `f`.
pub fn zeros_of_f(params: &DoublePowerParams, controls: RootControls) -> Result<(f64, f64)> {
    let (omega, p, q) = (params.omega(), params.p(), params.q());
    let peak = unimodal_peak(1.0, 1.0, p, q);
    let max = pow(peak, p - 1.0) - pow(peak, q - 1.0);
    if omega >= max {
        return Err(Error::NoPositivePart { omega, max });
    }
    two_zeros(|u| -omega + pow(u, p - 1.0) - pow(u, q - 1.0), peak, controls)
}

/// The zeros `β < θ` of `F`.
pub fn zeros_of_primitive(params: &DoublePowerParams, controls: RootControls) -> Result<(f64, f64)> {
    params.require_existence()?;
    let (omega, p, q) = (params.omega(), params.p(), params.q());
    let (a, bc) = (1.0 / (p + 1.0), 1.0 / (q + 1.0));
    let peak = unimodal_peak(a, bc, p, q);
    two_zeros(
        |u| -0.5 * omega + a * pow(u, p - 1.0) - bc * pow(u, q - 1.0),
        peak,
        controls,
    )
}

/// Zeros `B < C` of `Σ`; `C = ∞` when `τ <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaZeros {
    pub big_b: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub big_c: f64,
}

pub fn zeros_of_sigma(
    params: &DoublePowerParams,
    n: Dimension,
    controls: RootControls,
) -> Result<SigmaZeros> {
    params.require_existence()?;
    let prob = RadialProblem::new(*params, n);
    let PohozaevCoeffs { sigma, tau } = prob.coeffs();
    let (omega, p, q) = (params.omega(), params.p(), params.q());
    let g = |u: f64| -omega + sigma * pow(u, p - 1.0) - tau * pow(u, q - 1.0);

    if tau.abs() < TAU_ZERO_TOL {
        return Ok(SigmaZeros {
            big_b: pow(omega / sigma, 1.0 / (p - 1.0)),
            big_c: f64::INFINITY,
        });
    }
    if tau > 0.0 {
        let peak = unimodal_peak(sigma, tau, p, q);
        let (big_b, big_c) = two_zeros(g, peak, controls)?;
        return Ok(SigmaZeros { big_b, big_c });
    }

    // τ < 0: g → -ω at 0⁺ and → +∞, with a single crossing whatever the sign of σ.
    let mut lo = 1e-8;
    let mut tries = 0;
    while g(lo) >= 0.0 && tries < 50 {
        lo *= 0.5;
        tries += 1;
    }
    let mut hi = 1.0;
    tries = 0;
    while g(hi) <= 0.0 {
        tries += 1;
        if tries > 200 {
            return Err(Error::Bracket {
                lo,
                hi,
                f_lo: g(lo),
                f_hi: g(hi),
            });
        }
        hi *= 2.0;
    }
    let big_b = find_root_bracketed(g, lo, hi, controls)?;
    Ok(SigmaZeros {
        big_b,
        big_c: f64::INFINITY,
    })
}

/// The six distinguished abscissas for a parameter point and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoints {
    pub b: f64,
    pub c: f64,
    pub beta: f64,
    pub theta: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    #[serde(rename = "C", serialize_with = "finite_or_null")]
    pub big_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalPointsMethod {
    ClosedForm,
    RootFinding,
}

impl std::fmt::Display for CriticalPointsMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CriticalPointsMethod::ClosedForm => "closed-form (q = 2p-1)",
            CriticalPointsMethod::RootFinding => "root-finding",
        })
    }
}

/// General path: every point from bracketed root finding.
pub fn critical_points(
    params: &DoublePowerParams,
    n: Dimension,
    controls: RootControls,
) -> Result<CriticalPoints> {
    params.require_existence()?;
    let (b, c) = zeros_of_f(params, controls)?;
    let (beta, theta) = zeros_of_primitive(params, controls)?;
    let SigmaZeros { big_b, big_c } = zeros_of_sigma(params, n, controls)?;
    Ok(CriticalPoints {
        b,
        c,
        beta,
        theta,
        big_b,
        big_c,
    })
}

/// Closed forms for `q = 2p - 1`, via the quadratic in `t = u^{p-1}`.
///
/// Smaller roots are written in rationalized form, e.g.
/// `(1 - √(1-4ω))/2 = 2ω/(1 + √(1-4ω))`, which stays accurate as
/// the discriminant approaches 1 and handles `τ → 0` continuously.
pub fn closed_forms_q2p1(params: &DoublePowerParams, n: Dimension) -> Result<CriticalPoints> {
    if !params.is_q_2p_minus_1() {
        return Err(Error::Unsupported(format!(
            "closed forms need q = 2p-1 (p={}, q={})",
            params.p(),
            params.q()
        )));
    }
    params.require_existence()?;
    let (omega, p) = (params.omega(), params.p());
    let root = |t: f64| pow(t, 1.0 / (p - 1.0));

    let d_f = 1.0 - 4.0 * omega;
    let d_big_f = 1.0 - (p + 1.0) * (p + 1.0) * omega / p;
    assert!(d_f > 0.0 && d_big_f > 0.0, "existence implies positive discriminants");
    let (sf, sbf) = (d_f.sqrt(), d_big_f.sqrt());
    let b = root(2.0 * omega / (1.0 + sf));
    let c = root(0.5 * (1.0 + sf));
    let beta = root((p + 1.0) * omega / (1.0 + sbf));
    let theta = root(p / (p + 1.0) * (1.0 + sbf));

    let PohozaevCoeffs { sigma, tau } = RadialProblem::new(*params, n).coeffs();
    let (big_b, big_c) = if tau.abs() < TAU_ZERO_TOL {
        (root(omega / sigma), f64::INFINITY)
    } else {
        let disc = sigma * sigma - 4.0 * omega * tau;
        assert!(disc >= 0.0, "omega below the Sigma threshold implies a real discriminant");
        let sd = disc.sqrt();
        let big_b = root(2.0 * omega / (sigma + sd));
        let big_c = if tau > 0.0 {
            root((sigma + sd) / (2.0 * tau))
        } else {
            f64::INFINITY
        };
        (big_b, big_c)
    };
    Ok(CriticalPoints {
        b,
        c,
        beta,
        theta,
        big_b,
        big_c,
    })
}

/// Closed forms when `q = 2p - 1`, root finding otherwise.
pub fn critical_points_auto(
    params: &DoublePowerParams,
    n: Dimension,
    controls: RootControls,
) -> Result<(CriticalPoints, CriticalPointsMethod)> {
    if params.is_q_2p_minus_1() {
        Ok((closed_forms_q2p1(params, n)?, CriticalPointsMethod::ClosedForm))
    } else {
        Ok((
            critical_points(params, n, controls)?,
            CriticalPointsMethod::RootFinding,
        ))
    }
}

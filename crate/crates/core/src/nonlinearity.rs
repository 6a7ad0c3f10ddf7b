//! The double-power nonlinearity `f(u) = -ωu + u^p - u^q`, its primitive,
//! the Pohozaev trinomial and the closed-form thresholds built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `x^e` for `x >= 0`. Integer exponents go through repeated multiplication.
pub fn pow(x: f64, e: f64) -> f64 {
    let rounded = e.round();
    if (e - rounded).abs() < 1e-12 && rounded.abs() <= 64.0 {
        x.powi(rounded as i32)
    } else if x == 0.0 {
        if e > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (e * x.ln()).exp()
    }
}

fn check_nonnegative(u: f64) -> Result<()> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain { what: "u", value: u });
    }
    Ok(())
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p.is_finite() && q.is_finite()) || p <= 1.0 || q <= p {
        return Err(Error::InvalidParameter(format!(
            "exponents must satisfy 1 < p < q (got p={p}, q={q})"
        )));
    }
    Ok(())
}

/// Spatial dimension `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub const ONE: Dimension = Dimension(1);
    pub const TWO: Dimension = Dimension(2);
    pub const THREE: Dimension = Dimension(3);

    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(n: Dimension) -> u32 {
        n.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The triple `(ω, p, q)` with `ω > 0` and `1 < p < q`.
///
/// The existence threshold `ω_{p,q}` is computed on construction, so
/// [`exists_ground_state`](Self::exists_ground_state) is always available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublePowerParams {
    omega: f64,
    p: f64,
    q: f64,
    threshold: f64,
}

impl DoublePowerParams {
    pub fn new(omega: f64, p: f64, q: f64) -> Result<Self> {
        check_exponents(p, q)?;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive and finite (got {omega})"
            )));
        }
        let threshold = existence_threshold(p, q)?;
        Ok(Self {
            omega,
            p,
            q,
            threshold,
        })
    }

    /// The reference case `ω = 3/16, p = 2, q = 3`.
    pub fn canonical() -> Self {
        Self::new(3.0 / 16.0, 2.0, 3.0).expect("canonical parameters are valid")
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `ω_{p,q}`.
    pub fn existence_threshold(&self) -> f64 {
        self.threshold
    }

    /// True iff `ω < ω_{p,q}`, i.e. `F` is positive somewhere.
    pub fn exists_ground_state(&self) -> bool {
        self.omega < self.threshold
    }

    pub fn require_existence(&self) -> Result<()> {
        if self.exists_ground_state() {
            Ok(())
        } else {
            Err(Error::ExistenceViolated {
                omega: self.omega,
                threshold: self.threshold,
            })
        }
    }

    /// Whether `q = 2p - 1` up to `1e-12`, the case with closed-form critical points.
    pub fn is_q_2p_minus_1(&self) -> bool {
        (self.q - (2.0 * self.p - 1.0)).abs() < 1e-12
    }

    pub fn eval_f(&self, u: f64) -> Result<f64> {
        check_nonnegative(u)?;
        Ok(self.f(u))
    }

    /// `F(u) = ∫₀ᵘ f`.
    pub fn eval_primitive(&self, u: f64) -> Result<f64> {
        check_nonnegative(u)?;
        Ok(self.primitive(u))
    }

    pub(crate) fn f(&self, u: f64) -> f64 {
        -self.omega * u + pow(u, self.p) - pow(u, self.q)
    }

    /// Odd extension of `f` to the negative axis, used inside ODE stages
    /// that may step slightly past `u = 0`.
    pub(crate) fn f_odd(&self, u: f64) -> f64 {
        if u >= 0.0 {
            self.f(u)
        } else {
            -self.f(-u)
        }
    }

    pub(crate) fn primitive(&self, u: f64) -> f64 {
        let (p, q) = (self.p, self.q);
        -0.5 * self.omega * u * u + pow(u, p + 1.0) / (p + 1.0) - pow(u, q + 1.0) / (q + 1.0)
    }

    /// Even extension of `F`, consistent with [`f_odd`](Self::f_odd).
    pub(crate) fn primitive_even(&self, u: f64) -> f64 {
        self.primitive(u.abs())
    }
}

/// The pair `(σ, τ)` that reduces `Σ` to `-2ωu² + 2σu^{p+1} - 2τu^{q+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevCoeffs {
    pub sigma: f64,
    pub tau: f64,
}

pub fn pohozaev_coeffs(n: Dimension, p: f64, q: f64) -> Result<PohozaevCoeffs> {
    check_exponents(p, q)?;
    let n = n.as_f64();
    let half = (n - 2.0) / 2.0;
    Ok(PohozaevCoeffs {
        sigma: n / (p + 1.0) - half,
        tau: n / (q + 1.0) - half,
    })
}

/// Parameters together with a dimension; caches `(σ, τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    params: DoublePowerParams,
    n: Dimension,
    coeffs: PohozaevCoeffs,
}

impl RadialProblem {
    pub fn new(params: DoublePowerParams, n: Dimension) -> Self {
        let coeffs = pohozaev_coeffs(n, params.p, params.q).expect("params validated exponents");
        Self { params, n, coeffs }
    }

    pub fn params(&self) -> &DoublePowerParams {
        &self.params
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn coeffs(&self) -> PohozaevCoeffs {
        self.coeffs
    }

    /// `Σ(u) = 2nF(u) - (n-2)u f(u)`, evaluated through the trinomial form.
    pub fn eval_sigma(&self, u: f64) -> Result<f64> {
        check_nonnegative(u)?;
        Ok(self.sigma(u))
    }

    pub(crate) fn sigma(&self, u: f64) -> f64 {
        let PohozaevCoeffs { sigma, tau } = self.coeffs;
        let (p, q) = (self.params.p, self.params.q);
        -2.0 * self.params.omega * u * u + 2.0 * sigma * pow(u, p + 1.0)
            - 2.0 * tau * pow(u, q + 1.0)
    }

    /// Sum of the absolute values of the three trinomial terms; the natural
    /// scale for rounding error in [`eval_sigma`](Self::eval_sigma).
    #[cfg(test)]
    pub(crate) fn sigma_magnitude(&self, u: f64) -> f64 {
        let PohozaevCoeffs { sigma, tau } = self.coeffs;
        let (p, q) = (self.params.p, self.params.q);
        2.0 * self.params.omega * u * u
            + 2.0 * sigma.abs() * pow(u, p + 1.0)
            + 2.0 * tau.abs() * pow(u, q + 1.0)
    }
}

/// `ω_{p,q}`: ground states exist iff `ω < ω_{p,q}`.
pub fn existence_threshold(p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    let lead = 2.0 * (q - p) / ((p + 1.0) * (q - 1.0));
    let base = (p - 1.0) * (q + 1.0) / ((p + 1.0) * (q - 1.0));
    Ok(lead * pow(base, (p - 1.0) / (q - p)))
}

/// `ω_{σ,τ,p,q}`: `Σ` has the sign pattern `-,+,-` iff `ω` is below it.
/// Only defined for `τ > 0`.
pub fn sigma_threshold(coeffs: PohozaevCoeffs, p: f64, q: f64) -> Result<f64> {
    check_exponents(p, q)?;
    let PohozaevCoeffs { sigma, tau } = coeffs;
    if tau <= 0.0 {
        return Err(Error::Unsupported(format!(
            "threshold is infinite for tau <= 0 (tau={tau}); Sigma has a single zero"
        )));
    }
    let base = sigma * (p - 1.0) / (tau * (q - 1.0));
    Ok(sigma * (q - p) / (q - 1.0) * pow(base, (p - 1.0) / (q - p)))
}

/// Critical Sobolev exponent `p*(n)`; infinite for `n = 1, 2`.
pub fn critical_exponent(n: Dimension) -> f64 {
    match n.get() {
        1 | 2 => f64::INFINITY,
        k => {
            let k = f64::from(k);
            (k + 2.0) / (k - 2.0)
        }
    }
}

/// `σ_{n,p}`, the positive zero of `2nF₁ - (n-2)u f₁` for `f₁ = -u + u^p`.
pub fn single_power_bound(n: Dimension, p: f64) -> Result<f64> {
    if !(p > 1.0 && p < critical_exponent(n)) {
        return Err(Error::Domain {
            what: "p (need 1 < p < p*(n))",
            value: p,
        });
    }
    let nf = n.as_f64();
    let denom = 2.0 * nf - (nf - 2.0) * (p + 1.0);
    Ok(pow(2.0 * (p + 1.0) / denom, 1.0 / (p - 1.0)))
}

/// `g(q) = [4/(2n-(n-2)(p+1))]^q [2n-(n-2)(q+1)]^{p-1}`.
///
/// `ω_{p,q} < ω_{σ,τ,p,q}` is equivalent to `g(q) < g(p)`, and `g` is
/// decreasing on `(0, p*(n))` for `n != 2`.
pub fn threshold_ratio_g(n: Dimension, p: f64, q_var: f64) -> Result<f64> {
    let p_star = critical_exponent(n);
    if !(p > 1.0 && p < p_star) {
        return Err(Error::Domain {
            what: "p (need 1 < p < p*(n))",
            value: p,
        });
    }
    if !(q_var > 0.0 && q_var < p_star) {
        return Err(Error::Domain {
            what: "q (need 0 < q < p*(n))",
            value: q_var,
        });
    }
    let nf = n.as_f64();
    let base = 4.0 / (2.0 * nf - (nf - 2.0) * (p + 1.0));
    let second = 2.0 * nf - (nf - 2.0) * (q_var + 1.0);
    Ok(pow(base, q_var) * pow(second, p - 1.0))
}

//! Rate-of-convergence calculus.
//!
//! A rate of convergence for a sequence `x_n -> x` is a function `r` with
//! `|x_m - x| <= lambda` for every `m >= r(lambda)`. Strictly decreasing
//! rates invert to asymptotic bounds `|x_n - x| <= r^{-1}(n)`. Everything
//! downstream (threshold theorems, Monte-Carlo verdicts) is phrased through
//! this type.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance-to-threshold function `lambda -> N(lambda)` with monotonicity
/// metadata. Evaluation is only defined for `lambda > domain_floor`.
#[derive(Clone)]
pub struct Rate {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub strictly_decreasing: bool,
    pub domain_floor: f64,
}

impl Rate {
    pub fn new(strictly_decreasing: bool, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Rate {
            f: Arc::new(f),
            strictly_decreasing,
            domain_floor: 0.0,
        }
    }

    pub fn with_domain_floor(mut self, floor: f64) -> Self {
        self.domain_floor = floor;
        self
    }

    /// Threshold index for tolerance `lambda`.
    ///
    /// Panics if `lambda` is not a finite value above the domain floor;
    /// rates are only defined on positive tolerances.
    pub fn eval(&self, lambda: f64) -> f64 {
        assert!(
            lambda.is_finite() && lambda > self.domain_floor,
            "rate evaluated outside its domain: lambda = {lambda}, floor = {}",
            self.domain_floor
        );
        (self.f)(lambda)
    }
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rate")
            .field("strictly_decreasing", &self.strictly_decreasing)
            .field("domain_floor", &self.domain_floor)
            .finish_non_exhaustive()
    }
}

/// Index-to-probability bound `n -> b(n)`, nonincreasing in `n`. This is the
/// inverted form of a strictly decreasing rate.
#[derive(Clone)]
pub struct AsymptoticBound {
    f: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl AsymptoticBound {
    pub fn new(f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        AsymptoticBound { f: Arc::new(f) }
    }

    pub fn eval(&self, n: u64) -> f64 {
        (self.f)(n)
    }
}

impl fmt::Debug for AsymptoticBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AsymptoticBound").finish_non_exhaustive()
    }
}

/// Per-family moment constants consumed by the rate formulas.
///
/// `tau <= sigma` holds by Jensen only under uniform variance bounds, so it
/// is checked by callers where needed, never enforced here.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MomentProfile {
    /// Variance bound, `Var(X_n) <= sigma2`.
    pub sigma2: f64,
    /// First absolute moment bound, `E|X_n| <= tau`.
    pub tau: f64,
    /// Cesaro-mean bound on `z_n / n`.
    pub w: f64,
    /// Bound on the weighted series `sum gamma_m / m^p`.
    pub gamma_bound: f64,
    /// Moment order.
    pub p: f64,
    /// Per-variable mean bound (nonnegative-family case).
    pub mu: f64,
}

impl MomentProfile {
    /// Profile for a centered pairwise-independent family described only by
    /// its variance and first-absolute-moment bounds.
    pub fn pairwise(sigma2: f64, tau: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) {
            return Err(Error::invalid("sigma2 must be nonnegative"));
        }
        if !(tau > 0.0) {
            return Err(Error::invalid("tau must be positive"));
        }
        Ok(MomentProfile {
            sigma2,
            tau,
            w: 1.0,
            gamma_bound: 1.0,
            p: 2.0,
            mu: tau / 2.0,
        })
    }
}

/// Numerically invert a strictly decreasing rate at index `n`: find the
/// tolerance `lambda*` with `rate(lambda*) = n`, by bisection on
/// `(domain_floor, bracket_hi]`.
///
/// The pair `(n, lambda*)` inherits the rate's contract: the underlying
/// deviation is at most `lambda*` for every index `>= n`.
pub fn invert_rate(rate: &Rate, n: u64, bracket_hi: f64) -> Result<f64> {
    if !rate.strictly_decreasing {
        return Err(Error::invalid(
            "invert_rate requires a strictly decreasing rate",
        ));
    }
    if n == 0 {
        return Err(Error::invalid("invert_rate requires n >= 1"));
    }
    if !(bracket_hi.is_finite() && bracket_hi > rate.domain_floor) {
        return Err(Error::invalid("bracket_hi must lie inside the rate domain"));
    }

    let target = n as f64;
    let tol = 1e-9 * target.max(1.0);
    let hi_val = rate.eval(bracket_hi);
    if hi_val > target {
        return Err(Error::NoBracket {
            bracket_hi,
            value: hi_val,
            target,
        });
    }

    // The left endpoint is never evaluated: paper rates blow up as
    // lambda -> domain_floor, so the sign there is taken as "above target".
    let mut lo = rate.domain_floor;
    let mut hi = bracket_hi;
    let mut best = bracket_hi;
    let mut best_residual = (hi_val - target).abs();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > rate.domain_floor && mid < hi) {
            break;
        }
        let v = rate.eval(mid);
        let residual = (v - target).abs();
        if residual < best_residual {
            best = mid;
            best_residual = residual;
        }
        if residual <= tol {
            return Ok(mid);
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_residual <= tol {
        Ok(best)
    } else {
        Err(Error::ToleranceNotMet {
            residual: best_residual,
            tolerance: tol,
        })
    }
}

/// Convert a strictly decreasing rate into the asymptotic bound `r^{-1}(n)`,
/// expanding the bracket as needed.
pub fn bound_from_rate(rate: &Rate, bracket_hi: f64) -> AsymptoticBound {
    let rate = rate.clone();
    AsymptoticBound::new(move |n| {
        let mut hi = bracket_hi;
        for _ in 0..200 {
            match invert_rate(&rate, n, hi) {
                Ok(lambda) => return lambda,
                Err(Error::NoBracket { .. }) => hi *= 2.0,
                Err(_) => return f64::NAN,
            }
        }
        f64::NAN
    })
}

/// Rate of convergence for the partial sums of the block-subsequence tail
/// series of a nonnegative pairwise-independent family with variance bound
/// `sigma_y2`:
///
/// ```text
/// eval(lambda) = log_alpha( 2 sigma_y2 / (lambda eps^2 (alpha - 1)) ) - 1
/// ```
///
/// clamped below at 0 (a negative value means the tail bound already holds
/// from the start).
pub fn geometric_tail_rate(eps: f64, alpha: f64, sigma_y2: f64) -> Result<Rate> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if !(alpha > 1.0) {
        return Err(Error::hypothesis(
            "geometric_tail_rate requires alpha > 1 (log base and alpha - 1 divisor)",
        ));
    }
    if !(sigma_y2 >= 0.0) {
        return Err(Error::invalid("sigma_y2 must be nonnegative"));
    }
    Ok(Rate::new(true, move |lambda| {
        let raw = (2.0 * sigma_y2 / (lambda * eps * eps * (alpha - 1.0))).log(alpha) - 1.0;
        raw.max(0.0)
    }))
}

/// Combine a rate `block_rate(eps', delta, alpha, lambda)` for the
/// block-subsequence tail sums into a rate for the sup deviation probability
/// `P(sup_{m >= n} |S_m/m - z_m/m| > eps)`:
///
/// ```text
/// eval(lambda) = alpha^( block_rate(eps/(3 alpha), eps/3, alpha, lambda/2) + 1 ),
/// alpha = 1 + eps / (3 W).
/// ```
///
/// `strictly_decreasing` is inherited from the supplied block rate; the block
/// rate must not depend on the block slot index.
pub fn sup_rate_from_block_rate(
    eps: f64,
    w: f64,
    strictly_decreasing: bool,
    block_rate: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
) -> Result<Rate> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if !(w > 0.0) {
        return Err(Error::invalid("w must be positive"));
    }
    let alpha = 1.0 + eps / (3.0 * w);
    Ok(Rate::new(strictly_decreasing, move |lambda| {
        let exponent = block_rate(eps / (3.0 * alpha), eps / 3.0, alpha, lambda / 2.0) + 1.0;
        alpha.powf(exponent)
    }))
}

/// Closed-form sup-deviation rate for nonnegative pairwise-independent
/// families with mean bound `mean_bound` and variance bound `sigma_y2`:
///
/// ```text
/// eval(lambda) = 36 alpha^2 sigma_y2 / (lambda eps^2 (alpha - 1)),
/// alpha = 1 + eps / (3 mean_bound).
/// ```
///
/// Algebraically identical to composing [`sup_rate_from_block_rate`] with
/// [`geometric_tail_rate`]; the two routes are kept separate so tests can
/// compare them.
pub fn nonneg_sup_rate(eps: f64, mean_bound: f64, sigma_y2: f64) -> Result<Rate> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if !(mean_bound > 0.0) {
        return Err(Error::invalid("mean_bound must be positive"));
    }
    if !(sigma_y2 >= 0.0) {
        return Err(Error::invalid("sigma_y2 must be nonnegative"));
    }
    let alpha = 1.0 + eps / (3.0 * mean_bound);
    Ok(Rate::new(true, move |lambda| {
        36.0 * alpha * alpha * sigma_y2 / (lambda * eps * eps * (alpha - 1.0))
    }))
}

/// Sup-deviation rate for centered pairwise-independent families with
/// `E|X_n| <= tau` and `Var(X_n) <= sigma2`:
///
/// ```text
/// eval(lambda) = 288 alpha^2 sigma2 / (lambda eps^2 (alpha - 1)),
/// alpha = 1 + eps / (3 tau).
/// ```
///
/// Implemented as the positive/negative-part reduction
/// `nonneg_sup_rate(eps/2, tau/2, sigma2).eval(lambda/2)`, so the reduction
/// identity holds bit-exactly; the closed form above is the test oracle.
pub fn pairwise_sup_rate(eps: f64, tau: f64, sigma2: f64) -> Result<Rate> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau must be positive"));
    }
    let inner = nonneg_sup_rate(eps / 2.0, tau / 2.0, sigma2)?;
    Ok(Rate::new(true, move |lambda| inner.eval(lambda / 2.0)))
}

/// Distribution-free upper bound on `P*(n, eps)` for centered pairwise
/// independent families:
///
/// ```text
/// P*(n, eps) <= 1536 sigma2 tau / (n eps^3)   for eps <= tau,
/// P*(n, eps) <= 1536 sigma2 / (n eps tau)     for eps > tau.
/// ```
///
/// Values above 1 are returned as-is; a vacuous bound is still a valid one
/// and downstream verdicts flag it rather than clamp it.
pub fn sup_tail_upper_bound(n: u64, eps: f64, profile: &MomentProfile) -> f64 {
    assert!(profile.tau > 0.0, "sup_tail_upper_bound requires tau > 0");
    assert!(n >= 1 && eps > 0.0);
    let nf = n as f64;
    if eps <= profile.tau {
        1536.0 * profile.sigma2 * profile.tau / (nf * eps * eps * eps)
    } else {
        1536.0 * profile.sigma2 / (nf * eps * profile.tau)
    }
}

/// Comparison line for mutually independent families with a common variance
/// bound: `P*(n, eps) <= 2 sigma2 / (n eps^2)`. Not valid under pairwise
/// independence alone; callers assert mutual independence.
pub fn hajek_renyi_bound(n: u64, eps: f64, sigma2: f64) -> f64 {
    assert!(n >= 1 && eps > 0.0 && sigma2 >= 0.0);
    2.0 * sigma2 / (n as f64 * eps * eps)
}

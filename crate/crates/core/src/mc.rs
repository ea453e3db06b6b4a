//! Monte-Carlo estimation of the sup-tail probability
//! `P*(n, eps) = P( sup_{m >= n} |S_m/m - c| > eps )` and empirical verdicts
//! for every analytic bound in the calculus.
//!
//! The sup is truncated at a finite horizon M, which can only lose hits, so
//! every estimate is lower-biased; that direction is conservative for
//! lower-bound verification and is flagged on the estimate for upper-bound
//! verification.
//!
//! Paths are assigned one counter-based stream each and reduced by integer
//! addition, so results are bit-identical for any worker count.

use rayon::prelude::*;

use crate::ci::clopper_pearson;
use crate::error::{Error, Result};
use crate::families::{zeta_constants, FamilySpec, SamplerFactory};
use crate::rate::{sup_tail_upper_bound, MomentProfile};
use crate::series::{chen_sung_threshold, csorgo_threshold, SeriesSpec};

/// Default cap on `paths * horizon` sample-steps per run.
pub const DEFAULT_BUDGET: u64 = 10_000_000_000;

/// What the running mean is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Center {
    /// Raw `|S_m / m|`.
    Zero,
    /// `|S_m / m - mean|` with the family's exact mean of emitted variables.
    FamilyMean,
}

impl std::fmt::Display for Center {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Center::Zero => "zero",
            Center::FamilyMean => "family-mean",
        })
    }
}

impl std::str::FromStr for Center {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Center::Zero),
            "family-mean" => Ok(Center::FamilyMean),
            other => Err(Error::invalid(format!(
                "unknown center `{other}` (expected zero or family-mean)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SupTailQuery {
    pub family: FamilySpec,
    /// Start index n of the sup.
    pub start: u64,
    pub eps: f64,
    /// Truncation index M >= n.
    pub horizon: u64,
    pub paths: u64,
    pub seed: u64,
    pub center: Center,
    /// Sample-step budget for `paths * horizon`.
    pub budget: u64,
}

impl SupTailQuery {
    /// Query with the default 32n horizon, path count, seed and budget.
    pub fn new(family: FamilySpec, start: u64, eps: f64) -> Self {
        SupTailQuery {
            family,
            start,
            eps,
            horizon: start.saturating_mul(32),
            paths: 10_000,
            seed: 0,
            center: Center::Zero,
            budget: DEFAULT_BUDGET,
        }
    }

    fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.start < 1 {
            return Err(Error::invalid("start index must be >= 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("eps must be positive"));
        }
        if self.horizon < self.start {
            return Err(Error::invalid("horizon must be >= the start index"));
        }
        if self.paths < 100 {
            return Err(Error::invalid("at least 100 paths are required"));
        }
        if let Some(cap) = self.family.max_len() {
            if self.horizon > cap {
                return Err(Error::invalid(format!(
                    "horizon {} exceeds the family's {cap} variables",
                    self.horizon
                )));
            }
        }
        Ok(())
    }

    fn check_budget(&self, horizon: u64) -> Result<()> {
        let required = self
            .paths
            .checked_mul(horizon)
            .ok_or_else(|| Error::IndexOverflow("paths * horizon overflows".into()))?;
        if required > self.budget {
            return Err(Error::BudgetExceeded {
                required,
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn center_value(&self) -> Result<f64> {
        Ok(match self.center {
            Center::Zero => 0.0,
            Center::FamilyMean => self.family.mean()?,
        })
    }
}

/// Truncated sup-tail estimate with its exact 95% Clopper-Pearson interval.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SupTailEstimate {
    pub hits: u64,
    pub paths: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub horizon_used: u64,
    /// True when the sup was truncated short of the family's extent, making
    /// `p_hat` a lower-biased estimate of the untruncated sup probability.
    pub truncated_sup: bool,
}

/// Analytic bound vs. empirical estimate. `empirical` is absent only when a
/// run was skipped (threshold verification over budget).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundReport {
    pub analytic: f64,
    pub empirical: Option<SupTailEstimate>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Violated,
    Inconclusive,
    /// The analytic bound is >= 1: valid but uninformative. Recorded
    /// distinctly so it never reads as a failure.
    Vacuous,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Verified => "verified",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Vacuous => "vacuous",
        };
        f.write_str(s)
    }
}

#[inline]
fn path_has_hit(
    factory: &SamplerFactory,
    seed: u64,
    stream: u64,
    start: u64,
    horizon: u64,
    eps: f64,
    center: f64,
) -> bool {
    let mut sampler = factory.path(seed, stream);
    let mut sum = 0.0f64;
    let mut m = 1u64;
    while m < start {
        sum += sampler.next();
        m += 1;
    }
    while m <= horizon {
        sum += sampler.next();
        let mf = m as f64;
        if (sum - center * mf).abs() > eps * mf {
            return true;
        }
        m += 1;
    }
    false
}

fn estimate_at_horizon(q: &SupTailQuery, horizon: u64) -> Result<SupTailEstimate> {
    let center = q.center_value()?;

    // Bounded support: when every |X - c| <= eps no average can strictly
    // exceed eps, so the count is identically zero.
    let provably_zero = q
        .family
        .support_radius(center)
        .map_or(false, |r| r <= q.eps);

    let hits = if provably_zero {
        0
    } else {
        let factory = q.family.sampler_factory()?;
        let (seed, start, eps) = (q.seed, q.start, q.eps);
        (0..q.paths as usize)
            .into_par_iter()
            .with_min_len(64)
            .map(|stream| {
                path_has_hit(&factory, seed, stream as u64, start, horizon, eps, center) as u64
            })
            .sum()
    };

    let (ci_low, ci_high) = clopper_pearson(hits, q.paths, 0.95);
    Ok(SupTailEstimate {
        hits,
        paths: q.paths,
        p_hat: hits as f64 / q.paths as f64,
        ci_low,
        ci_high,
        horizon_used: horizon,
        truncated_sup: q.family.max_len() != Some(horizon),
    })
}

/// Estimate `P( max_{n <= m <= M} |S_m/m - c| > eps )` over `q.paths`
/// independent streams. Rejected (with the required figure) when
/// `paths * horizon` exceeds the budget.
pub fn estimate_sup_tail(q: &SupTailQuery) -> Result<SupTailEstimate> {
    q.validate()?;
    q.check_budget(q.horizon)?;
    estimate_at_horizon(q, q.horizon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepStatus {
    Stabilized,
    /// The family ran out of variables; the sup is untruncated.
    FamilyExhausted,
    /// Budget ran out before the hit count settled; the estimate is the
    /// best available and should be read as inconclusive.
    BudgetExhausted,
}

/// Double the horizon from `q.horizon` until the hit count moves by no more
/// than `2 sqrt(previous hits)` between doublings, the family is exhausted,
/// or the budget is spent. Replays the same streams at every horizon, so
/// hit counts are nondecreasing along the sweep.
pub fn horizon_sweep(q: &SupTailQuery) -> Result<(SupTailEstimate, SweepStatus)> {
    q.validate()?;
    q.check_budget(q.horizon)?;
    let mut horizon = q.horizon;
    let mut current = estimate_at_horizon(q, horizon)?;
    loop {
        let mut next = horizon.saturating_mul(2);
        if let Some(cap) = q.family.max_len() {
            next = next.min(cap);
        }
        if next == horizon {
            return Ok((current, SweepStatus::FamilyExhausted));
        }
        if q.check_budget(next).is_err() {
            return Ok((current, SweepStatus::BudgetExhausted));
        }
        let grown = estimate_at_horizon(q, next)?;
        debug_assert!(grown.hits >= current.hits, "truncated sup is monotone in M");
        let delta = (grown.hits - current.hits) as f64;
        if delta <= 2.0 * (current.hits as f64).sqrt() {
            return Ok((grown, SweepStatus::Stabilized));
        }
        current = grown;
        horizon = next;
    }
}

fn upper_verdict(analytic: f64, e: &SupTailEstimate) -> Verdict {
    if analytic >= 1.0 {
        Verdict::Vacuous
    } else if e.ci_high <= analytic {
        Verdict::Verified
    } else if e.ci_low > analytic {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

fn lower_verdict(analytic: f64, e: &SupTailEstimate) -> Verdict {
    if analytic >= 1.0 {
        Verdict::Vacuous
    } else if e.ci_low >= analytic {
        Verdict::Verified
    } else if e.ci_high < analytic {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// Check the distribution-free upper bound against an empirical estimate.
/// The family must be pairwise independent with the profile's moments;
/// "verified" here is evidence, not proof, since the truncated estimate is
/// lower-biased.
pub fn verify_upper(q: &SupTailQuery, profile: &MomentProfile) -> Result<BoundReport> {
    let analytic = sup_tail_upper_bound(q.start, q.eps, profile);
    let empirical = estimate_sup_tail(q)?;
    Ok(BoundReport {
        analytic,
        empirical: Some(empirical),
        verdict: upper_verdict(analytic, &empirical),
    })
}

#[derive(Debug, Clone)]
pub struct LowerQuery {
    pub delta: f64,
    pub start: u64,
    pub eps: f64,
    pub paths: u64,
    pub seed: u64,
    /// Defaults to 32 * start.
    pub horizon: Option<u64>,
    pub budget: u64,
}

/// Check the heavy-tail lower bound `P*(n, eps) >= omega / n^{1+delta}`
/// empirically on the centered family. Truncating the sup only lowers the
/// estimate, so a verified verdict is conservative.
pub fn verify_lower(lq: &LowerQuery) -> Result<(SupTailQuery, BoundReport)> {
    if !(lq.eps > 0.0 && lq.eps <= 1.0) {
        return Err(Error::hypothesis(format!(
            "the heavy-tail lower bound requires 0 < eps <= 1, got {}",
            lq.eps
        )));
    }
    let consts = zeta_constants(lq.delta)?;
    let analytic = consts.omega / (lq.start as f64).powf(1.0 + lq.delta);
    let mut q = SupTailQuery::new(FamilySpec::heavy_tail(lq.delta, true), lq.start, lq.eps);
    q.paths = lq.paths;
    q.seed = lq.seed;
    q.center = Center::FamilyMean;
    q.budget = lq.budget;
    if let Some(h) = lq.horizon {
        q.horizon = h;
    }
    let empirical = estimate_sup_tail(&q)?;
    let verdict = lower_verdict(analytic, &empirical);
    Ok((
        q,
        BoundReport {
            analytic,
            empirical: Some(empirical),
            verdict,
        },
    ))
}

#[derive(Debug, Clone)]
pub struct BaumKatzQuery {
    /// Weight exponent, must be negative.
    pub r: f64,
    pub eps: f64,
    pub family: FamilySpec,
    pub n_max: u64,
    pub per_n_paths: u64,
    pub seed: u64,
    pub budget: u64,
}

/// One grid point of the weighted partial sums `sum_{n<=N} n^r p*(n, eps)`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BaumKatzRow {
    pub upto: u64,
    /// `sum n^r p_hat(n)` from the simulated paths.
    pub empirical_partial: f64,
    /// `sum n^r min(1, analytic bound at n)`.
    pub majorant_partial: f64,
    /// Unclamped `sum n^r * (1536 sigma2 tau / (n eps^3))`.
    pub majorant_series_partial: f64,
    /// Integral bound on the unclamped majorant tail beyond `upto`.
    pub majorant_tail_bound: f64,
}

/// Weighted partial sums of truncated sup-tail estimates for every start
/// index up to `n_max`, next to the analytic majorant, evaluated on a
/// geometric grid of cutoffs. All start indices share one path ensemble:
/// each path is scanned once with a sliding window `[n, min(32n, M)]`.
pub fn baum_katz_partials(q: &BaumKatzQuery) -> Result<Vec<BaumKatzRow>> {
    if !(q.r < 0.0) {
        return Err(Error::hypothesis(format!(
            "the weighted tail sum requires r < 0, got {}",
            q.r
        )));
    }
    if !(q.eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    if q.n_max < 1 || q.per_n_paths < 1 {
        return Err(Error::invalid("n_max and per_n_paths must be >= 1"));
    }
    q.family.validate()?;
    let mut horizon = q.n_max.saturating_mul(32);
    if let Some(cap) = q.family.max_len() {
        if cap < q.n_max {
            return Err(Error::invalid(format!(
                "family supplies only {cap} variables, n_max = {}",
                q.n_max
            )));
        }
        horizon = horizon.min(cap);
    }
    let required = q
        .per_n_paths
        .checked_mul(horizon)
        .ok_or_else(|| Error::IndexOverflow("paths * horizon overflows".into()))?;
    if required > q.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: q.budget,
        });
    }

    let center = q.family.mean()?;
    let profile = q.family.moment_profile()?;
    let factory = q.family.sampler_factory()?;
    let n_max = q.n_max as usize;
    let m_total = horizon as usize;
    let (seed, eps) = (q.seed, q.eps);

    let window_end = |n: usize| -> usize { (32 * n).min(m_total) };

    let hit_counts: Vec<u64> = (0..q.per_n_paths as usize)
        .into_par_iter()
        .with_min_len(16)
        .fold(
            || (vec![0u64; n_max + 1], vec![false; m_total + 1]),
            |(mut counts, mut exceed), stream| {
                let mut sampler = factory.path(seed, stream as u64);
                let mut sum = 0.0f64;
                for m in 1..=m_total {
                    sum += sampler.next();
                    let mf = m as f64;
                    exceed[m] = (sum - center * mf).abs() > eps * mf;
                }
                // Sliding window [n, min(32n, M)]; both edges move forward.
                let mut inside = exceed[1..=window_end(1)].iter().filter(|&&b| b).count();
                for n in 1..=n_max {
                    if inside > 0 {
                        counts[n] += 1;
                    }
                    if n == n_max {
                        break;
                    }
                    if exceed[n] {
                        inside -= 1;
                    }
                    for m in (window_end(n) + 1)..=window_end(n + 1) {
                        if exceed[m] {
                            inside += 1;
                        }
                    }
                }
                (counts, exceed)
            },
        )
        .map(|(counts, _)| counts)
        .reduce(
            || vec![0u64; n_max + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    // Geometric cutoff grid: powers of two from 16, plus n_max itself.
    let mut grid = Vec::new();
    let mut g = 16u64;
    while g < q.n_max {
        grid.push(g);
        g *= 2;
    }
    grid.push(q.n_max);

    let scale = 1536.0 * profile.sigma2 * profile.tau / (q.eps * q.eps * q.eps);
    let mut rows = Vec::with_capacity(grid.len());
    let mut empirical = 0.0f64;
    let mut majorant = 0.0f64;
    let mut majorant_series = 0.0f64;
    let mut next_grid = 0usize;
    for n in 1..=q.n_max {
        let nf = n as f64;
        let weight = nf.powf(q.r);
        empirical += weight * hit_counts[n as usize] as f64 / q.per_n_paths as f64;
        majorant += weight * sup_tail_upper_bound(n, q.eps, &profile).min(1.0);
        majorant_series += weight * scale / nf;
        if n == grid[next_grid] {
            rows.push(BaumKatzRow {
                upto: n,
                empirical_partial: empirical,
                majorant_partial: majorant,
                majorant_series_partial: majorant_series,
                majorant_tail_bound: scale * nf.powf(q.r) / (-q.r),
            });
            next_grid += 1;
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdTheorem {
    ChenSung,
    Csorgo,
}

#[derive(Debug, Clone)]
pub struct ThresholdQuery {
    pub theorem: ThresholdTheorem,
    pub spec: SeriesSpec,
    pub w: f64,
    pub eps: f64,
    pub lambda: f64,
    pub family: FamilySpec,
    pub paths: u64,
    pub seed: u64,
    pub budget: u64,
}

#[derive(Debug, Clone)]
pub struct ThresholdOutcome {
    pub n_star: u64,
    /// The sup-tail query that was (or would have been) run at `n_star`.
    pub query: Option<SupTailQuery>,
    pub report: BoundReport,
}

/// Compute the theorem threshold `n*` and, when `paths * 32 n*` fits the
/// budget, check empirically that the sup tail at `n*` is within `lambda`.
/// Thresholds are often astronomically conservative; an over-budget `n*` is
/// reported as inconclusive, which is expected rather than a failure.
pub fn verify_threshold(tq: &ThresholdQuery) -> Result<ThresholdOutcome> {
    let n_star = match tq.theorem {
        ThresholdTheorem::ChenSung => chen_sung_threshold(tq.eps, tq.lambda, &tq.spec, tq.w)?,
        ThresholdTheorem::Csorgo => csorgo_threshold(tq.eps, tq.lambda, &tq.spec, tq.w)?,
    };
    let mut q = SupTailQuery::new(tq.family.clone(), n_star, tq.eps);
    q.paths = tq.paths;
    q.seed = tq.seed;
    q.center = Center::FamilyMean;
    q.budget = tq.budget;
    if let Some(cap) = tq.family.max_len() {
        q.horizon = q.horizon.min(cap);
    }

    let feasible = q.horizon >= n_star
        && q
            .paths
            .checked_mul(q.horizon)
            .map_or(false, |need| need <= tq.budget);
    if !feasible {
        return Ok(ThresholdOutcome {
            n_star,
            query: None,
            report: BoundReport {
                analytic: tq.lambda,
                empirical: None,
                verdict: Verdict::Inconclusive,
            },
        });
    }
    let empirical = estimate_sup_tail(&q)?;
    let verdict = upper_verdict(tq.lambda, &empirical);
    Ok(ThresholdOutcome {
        n_star,
        query: Some(q),
        report: BoundReport {
            analytic: tq.lambda,
            empirical: Some(empirical),
            verdict,
        },
    })
}

/// Run a closure inside a dedicated rayon pool with `workers` threads; the
/// estimators give bit-identical results for any worker count, which the
/// determinism suite checks by comparing serialized outputs across pools.
pub fn with_worker_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool")
        .install(f)
}

//! Explicit convergence-rate calculus for strong-law large-deviation
//! probabilities, plus the Monte-Carlo harness that checks every bound
//! empirically over iid, pairwise-independent, and heavy-tailed families.
//!
//! The central quantity is `P*(n, eps) = P(sup_{m >= n} |S_m/m - c| > eps)`.
//! [`rate`] holds the rate abstraction and closed-form bounds, [`blocks`]
//! the geometric block combinatorics those bounds rest on, [`series`] the
//! quantitative Kronecker lemma and the composed threshold theorems,
//! [`families`] exact samplers, and [`mc`] the estimator and verdicts.

pub mod blocks;
pub mod ci;
pub mod error;
pub mod families;
pub mod mc;
pub mod rate;
pub mod report;
pub mod series;
pub mod stream;
pub mod zeta;

pub use blocks::{block_extremes, block_members, sandwich_check, BlockContext, SandwichReport};
pub use ci::clopper_pearson;
pub use error::{Error, Result};
pub use families::{
    heavy_tail_sample, pairwise_family_path, sample_path, zeta_constants, Dist, FamilyKind,
    FamilySpec, HeavyTailTable, ZetaConstants,
};
pub use mc::{
    baum_katz_partials, estimate_sup_tail, horizon_sweep, verify_lower, verify_threshold,
    verify_upper, with_worker_pool, BaumKatzQuery, BaumKatzRow, BoundReport, Center, LowerQuery,
    SupTailEstimate, SupTailQuery, SweepStatus, ThresholdOutcome, ThresholdQuery,
    ThresholdTheorem, Verdict, DEFAULT_BUDGET,
};
pub use rate::{
    bound_from_rate, geometric_tail_rate, hajek_renyi_bound, invert_rate, nonneg_sup_rate,
    pairwise_sup_rate, sup_rate_from_block_rate, sup_tail_upper_bound, AsymptoticBound,
    MomentProfile, Rate,
};
pub use series::{
    chen_sung_closed_form, chen_sung_threshold, chen_sung_threshold_raw, csorgo_threshold,
    kronecker_oracle, kronecker_rate, subsequence_tail_bound, subsequence_tail_rate,
    tail_residual_bound, ClosedFormBound, IndexDominator, SeriesSpec, TailBoundValue,
};

//! Exact binomial confidence intervals.
//!
//! Hit probabilities here range from ~1e-5 up to ~1e-1, where normal
//! approximations misbehave at the low end, so the harness uses the exact
//! Clopper-Pearson construction throughout:
//!
//! ```text
//! lower = BetaInv(alpha/2;     k,     n - k + 1)   (0 when k = 0)
//! upper = BetaInv(1 - alpha/2; k + 1, n - k)       (1 when k = n)
//! ```

use statrs::distribution::{Beta, ContinuousCDF};

/// Two-sided Clopper-Pearson interval for `hits` successes in `trials`
/// draws at the given confidence level (e.g. 0.95).
pub fn clopper_pearson(hits: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials >= 1, "need at least one trial");
    assert!(hits <= trials, "hits cannot exceed trials");
    assert!((0.0..1.0).contains(&confidence) && confidence > 0.0);
    let alpha = 1.0 - confidence;
    let k = hits as f64;
    let n = trials as f64;
    let lower = if hits == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("valid shape parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let upper = if hits == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("valid shape parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

//! Block/subsequence machinery on concrete deterministic sequences.
//!
//! Indices are grouped into geometric blocks `[alpha^m, alpha^{m+1})` and,
//! inside a block, into slots by where the running mean `z_n / n` falls in
//! `[s delta, (s+1) delta)`. The extreme indices of each slot sandwich the
//! normalized deviation of every interior index; `sandwich_check` evaluates
//! that chain numerically on a supplied sequence.
//!
//! This module validates the combinatorics at desk scale; the production
//! rate formulas only ever need `alpha` and the mean bound `W`.

use crate::error::{Error, Result};

/// Geometric/slot block structure over a finite prefix of running mean sums.
///
/// `z` is 1-based in spirit: `z[i]` stores `z_{i+1}`, the sum of the first
/// `i + 1` per-term means.
#[derive(Debug, Clone)]
pub struct BlockContext {
    pub alpha: f64,
    pub delta: f64,
    pub w: f64,
    z: Vec<f64>,
}

impl BlockContext {
    pub fn new(alpha: f64, delta: f64, w: f64, z: Vec<f64>) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::invalid("alpha must exceed 1"));
        }
        if !(delta > 0.0) {
            return Err(Error::invalid("delta must be positive"));
        }
        if !(w > 0.0) {
            return Err(Error::invalid("w must be positive"));
        }
        if z.is_empty() {
            return Err(Error::invalid("z must be nonempty"));
        }
        for (i, &v) in z.iter().enumerate() {
            let n = (i + 1) as f64;
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("z_{} = {v} is not nonnegative", i + 1)));
            }
            if v / n > w {
                return Err(Error::invalid(format!(
                    "z_{}/{} = {} exceeds the mean bound W = {w}",
                    i + 1,
                    i + 1,
                    v / n
                )));
            }
        }
        Ok(BlockContext { alpha, delta, w, z })
    }

    /// Highest slot index: `L_delta = floor(W / delta)`.
    pub fn slot_count(&self) -> u64 {
        (self.w / self.delta).floor() as u64
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `z_n` (1-based).
    pub fn z_at(&self, n: u64) -> f64 {
        self.z[(n - 1) as usize]
    }

    /// Running mean `z_n / n`.
    pub fn mean_at(&self, n: u64) -> f64 {
        self.z_at(n) / n as f64
    }

    /// Slot index `s` whose half-open window `[s delta, (s+1) delta)`
    /// contains `z_n / n`, under the same literal double comparisons the
    /// membership scan uses.
    pub fn slot_of(&self, n: u64) -> u64 {
        let mean = self.mean_at(n);
        let mut s = (mean / self.delta).floor().max(0.0) as u64;
        // floor(mean/delta) and the product comparisons can disagree by one
        // ulp; nudge until the literal window test holds.
        while s > 0 && mean < s as f64 * self.delta {
            s -= 1;
        }
        while mean >= (s + 1) as f64 * self.delta {
            s += 1;
        }
        s
    }

    fn in_slot(&self, n: u64, s: u64) -> bool {
        let mean = self.mean_at(n);
        mean >= s as f64 * self.delta && mean < (s + 1) as f64 * self.delta
    }

    /// Integer range of block `m`: first candidate `ceil(alpha^m)` and the
    /// exclusive real upper edge `alpha^{m+1}`.
    fn block_range(&self, m: u32) -> (u64, f64) {
        let lo = self.alpha.powi(m as i32).ceil().max(1.0) as u64;
        let hi = self.alpha.powi(m as i32 + 1);
        (lo, hi)
    }

    /// Block index `p` with `alpha^p <= n < alpha^{p+1}`, by exact power
    /// comparison rather than a floating log.
    pub fn block_of(&self, n: u64) -> u32 {
        let nf = n as f64;
        let mut p = 0u32;
        while self.alpha.powi(p as i32 + 1) <= nf {
            p += 1;
        }
        p
    }
}

/// Indices `n` in block `m` whose running mean falls in slot `s`:
/// `{ n : alpha^m <= n < alpha^{m+1}, z_n/n in [s delta, (s+1) delta) }`.
///
/// Rejected when the block runs past the available prefix of `z`.
pub fn block_members(ctx: &BlockContext, s: u64, m: u32) -> Result<Vec<u64>> {
    if s > ctx.slot_count() {
        return Err(Error::invalid(format!(
            "slot {s} exceeds L_delta = {}",
            ctx.slot_count()
        )));
    }
    let (lo, hi) = ctx.block_range(m);
    if hi > ctx.len() as f64 {
        return Err(Error::BlockRange {
            lo: lo as f64,
            hi,
            len: ctx.len(),
        });
    }
    let mut members = Vec::new();
    let mut n = lo;
    while (n as f64) < hi {
        if ctx.in_slot(n, s) {
            members.push(n);
        }
        n += 1;
    }
    Ok(members)
}

/// `(min, max)` of the slot's block members; both collapse to
/// `floor(alpha^m)` when the slot is empty in this block.
pub fn block_extremes(ctx: &BlockContext, s: u64, m: u32) -> Result<(u64, u64)> {
    let members = block_members(ctx, s, m)?;
    match (members.first(), members.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => {
            let fallback = ctx.alpha.powi(m as i32).floor().max(1.0) as u64;
            Ok((fallback, fallback))
        }
    }
}

/// One evaluated sandwich chain. `terms` holds the six chain members in
/// order; `violation` names the first failing link as
/// `(link index 1..=5, lhs, rhs)`.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub holds: bool,
    pub terms: [f64; 6],
    pub m: u64,
    pub slot: u64,
    pub block: u32,
    pub k_minus: u64,
    pub k_plus: u64,
    pub violation: Option<(usize, f64, f64)>,
}

/// Evaluate the five-link sandwich chain at index `m` for the nonnegative
/// sequence `x` whose mean sums are `ctx.z`:
///
/// ```text
/// -delta - (1 - 1/alpha) W + (1/alpha)(S_{k-} - z_{k-})/k-
///   <= -delta - (1 - 1/alpha) z_{k-}/k- + (1/alpha)(S_{k-} - z_{k-})/k-
///   <= S_{k-}/m - z_m/m
///   <= (S_m - z_m)/m
///   <= S_{k+}/m - z_{k+}/k+ + delta
///   <= (alpha/k+)(S_{k+} - z_{k+}) + (alpha - 1) W + delta
/// ```
///
/// The slot is read off `z_m/m` and the block off `m`; `k-`/`k+` are the
/// slot extremes within the block, truncated to the available prefix (the
/// truncated maximum still dominates `m`, so every link keeps its meaning).
/// A false return carries the violated link as witness; nonnegativity of
/// `x` is exactly what the middle links need.
pub fn sandwich_check(x: &[f64], ctx: &BlockContext, m: u64) -> Result<SandwichReport> {
    if x.len() != ctx.len() {
        return Err(Error::LengthMismatch(format!(
            "x has length {}, ctx.z has length {}",
            x.len(),
            ctx.len()
        )));
    }
    if m < 1 || m as usize > x.len() {
        return Err(Error::invalid(format!("m = {m} outside 1..={}", x.len())));
    }

    let p = ctx.block_of(m);
    let s = ctx.slot_of(m);
    let (lo, hi) = ctx.block_range(p);
    let last = ctx.len() as u64;

    let mut k_minus = 0u64;
    let mut k_plus = 0u64;
    let mut n = lo;
    while (n as f64) < hi && n <= last {
        if ctx.in_slot(n, s) {
            if k_minus == 0 {
                k_minus = n;
            }
            k_plus = n;
        }
        n += 1;
    }
    debug_assert!(k_minus >= 1, "m belongs to its own slot/block");
    debug_assert!(k_minus <= m && m <= k_plus);

    let mut prefix = vec![0.0f64; k_plus as usize];
    let mut acc = 0.0;
    for (i, &v) in x[..k_plus as usize].iter().enumerate() {
        acc += v;
        prefix[i] = acc;
    }
    let sum_at = |n: u64| prefix[(n - 1) as usize];

    let alpha = ctx.alpha;
    let delta = ctx.delta;
    let w = ctx.w;
    let mf = m as f64;
    let km = k_minus as f64;
    let kp = k_plus as f64;
    let dev_km = (sum_at(k_minus) - ctx.z_at(k_minus)) / km;
    let dev_kp = sum_at(k_plus) - ctx.z_at(k_plus);

    let terms = [
        -delta - (1.0 - 1.0 / alpha) * w + dev_km / alpha,
        -delta - (1.0 - 1.0 / alpha) * ctx.mean_at(k_minus) + dev_km / alpha,
        // S_{k-}/m - z_m/m, written over the common denominator so the
        // k- == m case is bit-identical to the next term.
        (sum_at(k_minus) - ctx.z_at(m)) / mf,
        (sum_at(m) - ctx.z_at(m)) / mf,
        sum_at(k_plus) / mf - ctx.mean_at(k_plus) + delta,
        (alpha / kp) * dev_kp + (alpha - 1.0) * w + delta,
    ];

    let mut violation = None;
    for i in 0..5 {
        if !(terms[i] <= terms[i + 1]) {
            violation = Some((i + 1, terms[i], terms[i + 1]));
            break;
        }
    }

    Ok(SandwichReport {
        holds: violation.is_none(),
        terms,
        m,
        slot: s,
        block: p,
        k_minus,
        k_plus,
        violation,
    })
}

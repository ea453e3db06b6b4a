//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime. Criteria 6-8 are memoized per worker count so the
//! determinism criterion can compare byte-identical reruns without paying
//! for the heavy simulations twice.

use std::sync::OnceLock;
use std::time::Instant;

use slln_core::blocks::{block_extremes, sandwich_check, BlockContext};
use slln_core::families::{zeta_constants, Dist, FamilySpec};
use slln_core::mc::{
    baum_katz_partials, verify_lower, verify_threshold, verify_upper, with_worker_pool,
    BaumKatzQuery, BaumKatzRow, Center, LowerQuery, SupTailQuery, ThresholdQuery,
    ThresholdTheorem, Verdict,
};
use slln_core::rate::{
    bound_from_rate, geometric_tail_rate, nonneg_sup_rate, pairwise_sup_rate,
    sup_rate_from_block_rate, sup_tail_upper_bound, MomentProfile, Rate,
};
use slln_core::report::{baum_katz_csv, bound_csv, BoundRow};
use slln_core::series::{
    chen_sung_closed_form, chen_sung_threshold, chen_sung_threshold_raw, csorgo_threshold,
    kronecker_oracle, kronecker_rate, subsequence_tail_bound, IndexDominator, SeriesSpec,
};
use slln_core::stream::StreamRng;
use slln_core::zeta::zeta;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn finish(criterion: &str, started: Instant) {
    println!("acceptance {criterion}: PASS ({:.2} s)", started.elapsed().as_secs_f64());
}

#[test]
fn criterion_01_composition_identity() {
    let started = Instant::now();
    // Composed sup rate through the geometric tail rate vs. the closed form
    // 36 a^2 s2 / (l e^2 (a-1)), to relative 1e-12 on the full grid.
    let mut points = 0usize;
    for &eps in &[0.1, 1.0, 2.0] {
        for &mu in &[0.5, 1.0, 2.0] {
            for &sigma_y2 in &[0.25, 1.0, 4.0] {
                let composed = sup_rate_from_block_rate(eps, mu, true, move |e, _d, a, l| {
                    geometric_tail_rate(e, a, sigma_y2).unwrap().eval(l)
                })
                .unwrap();
                let closed = nonneg_sup_rate(eps, mu, sigma_y2).unwrap();
                for &lambda in &[1e-3, 1e-2, 1e-1, 1.0] {
                    let a = composed.eval(lambda);
                    let b = closed.eval(lambda);
                    assert!(
                        rel_err(a, b) < 1e-12,
                        "eps={eps} mu={mu} s2={sigma_y2} lambda={lambda}: {a} vs {b}"
                    );
                    points += 1;
                }
            }
        }
    }
    assert_eq!(points, 108);
    assert!(started.elapsed().as_secs_f64() < 1.0, "must finish within 1 s");
    finish("criterion 1 (composition identity, 3x3x3x4 grid @ 1e-12)", started);
}

#[test]
fn criterion_02_kappa_derivation() {
    let started = Instant::now();
    for &eps in &[0.1, 0.5, 1.0] {
        for &tau in &[0.5, 1.0, 2.0] {
            if eps > tau {
                continue;
            }
            // 288 a^2 / (a - 1) <= 1536 tau / eps with a = 1 + eps/(3 tau).
            let alpha = 1.0 + eps / (3.0 * tau);
            assert!(
                288.0 * alpha * alpha / (alpha - 1.0) <= 1536.0 * tau / eps * (1.0 + 1e-12),
                "kappa inequality at eps={eps} tau={tau}"
            );
            for &sigma2 in &[0.25, 1.0, 4.0] {
                let profile = MomentProfile::pairwise(sigma2, tau).unwrap();
                let rate = pairwise_sup_rate(eps, tau, sigma2).unwrap();
                let inverse = bound_from_rate(&rate, 1.0);
                for &n in &[100u64, 10_000, 15_360, 1_000_000] {
                    let bound = sup_tail_upper_bound(n, eps, &profile);
                    let exact = 1536.0 * sigma2 * tau / (n as f64 * eps * eps * eps);
                    assert_eq!(bound, exact, "closed form must match bit-exactly");
                    let inverted = inverse.eval(n);
                    assert!(
                        bound >= inverted - 1e-9 * inverted.max(1.0),
                        "n={n} eps={eps} tau={tau} s2={sigma2}: {bound} < {inverted}"
                    );
                }
            }
        }
    }
    let profile = MomentProfile::pairwise(1.0, 1.0).unwrap();
    assert!((sup_tail_upper_bound(10_000, 1.0, &profile) - 0.1536).abs() < 1e-15);
    assert!(started.elapsed().as_secs_f64() < 1.0, "must finish within 1 s");
    finish("criterion 2 (kappa derivation & rate inversion)", started);
}

#[test]
fn criterion_03_quantitative_kronecker() {
    let started = Instant::now();

    // Spot values on the dyadic instance: K(1) = 8, K(0.5) = 24.
    let dyadic_phi = Rate::new(false, |eps: f64| (1.0 / eps).log2().ceil().max(0.0));
    let k = kronecker_rate(&dyadic_phi, &IndexDominator::identity(), 1.0);
    assert_eq!(k.eval(1.0), 8.0);
    assert_eq!(k.eval(0.5), 24.0);

    let mut rng = StreamRng::new(303, 0);
    let mut uni = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_f64();
    let eps_grid = [1.0, 0.3, 0.1, 0.03];
    let mut checks = 0usize;
    for trial in 0..500 {
        // Alternate geometric and p-series envelopes and the two weight
        // sequences a_n = n and a_n = n^2.
        let power = if (trial / 2) % 2 == 0 { 1.0 } else { 2.0 };
        let dom = IndexDominator::power(power);
        let (x, sum_bound, phi): (Box<dyn Fn(u64) -> f64>, f64, Rate) = if trial % 2 == 0 {
            let c = uni(0.1, 4.0);
            let q = uni(0.3, 0.9);
            let sum = c * q / (1.0 - q);
            let phi = Rate::new(true, move |e: f64| {
                ((c / (e * (1.0 - q))).ln() / (1.0 / q).ln() - 1.0).max(0.0)
            });
            (Box::new(move |j| c * q.powi(j as i32)), sum * (1.0 + 1e-9), phi)
        } else {
            let c = uni(0.1, 4.0);
            let s = uni(2.5, 4.0);
            let phi = Rate::new(true, move |e: f64| (c / ((s - 1.0) * e)).powf(1.0 / (s - 1.0)));
            (
                Box::new(move |j| c * (j as f64).powf(-s)),
                c * zeta(s) * (1.0 + 1e-9),
                phi,
            )
        };
        let rate = kronecker_rate(&phi, &dom, sum_bound);
        for &eps in &eps_grid {
            let k0 = rate.eval(eps).ceil().max(1.0) as u64;
            let samples = [
                k0,
                k0 + 1,
                k0 + 2,
                k0 + 5,
                k0 + 17,
                (k0 as f64 * 1.25).ceil() as u64,
                (k0 as f64 * 1.7).ceil() as u64,
                2 * k0,
                4 * k0,
            ];
            let n_max = (*samples.iter().max().unwrap()).min(1 << 21) as usize;
            let xs: Vec<f64> = (1..=n_max as u64).map(&x).collect();
            let aa: Vec<f64> = (1..=n_max as u64).map(|j| dom.a_at(j)).collect();
            for &n in &samples {
                let n = (n as usize).min(n_max);
                let v = kronecker_oracle(&xs, &aa, n).unwrap();
                assert!(
                    v <= eps * (1.0 + 1e-12),
                    "trial {trial} eps {eps} n {n}: oracle {v}"
                );
                checks += 1;
            }
        }
    }
    assert!(checks >= 500 * 4 * 9);
    assert!(started.elapsed().as_secs_f64() < 10.0, "must finish within 10 s");
    finish("criterion 3 (quantitative Kronecker, 500 random series)", started);
}

#[test]
fn criterion_04_tail_sum_bound_exact_at_desk_scale() {
    let started = Instant::now();
    // 12 independent two-point variables X_i in {0, b_i} with
    // P(X_i = b_i) = q_i; every law below is exact, enumerated over all
    // 2^k outcomes of the first k variables.
    let b: Vec<f64> = (0..12).map(|i| 0.5 + 0.06 * i as f64).collect();
    let q: Vec<f64> = (0..12).map(|i| 0.25 + 0.05 * (i % 8) as f64).collect();
    let mut z = Vec::new();
    let mut acc = 0.0;
    for (bi, qi) in b.iter().zip(&q) {
        acc += bi * qi;
        z.push(acc);
    }
    let mut per_k: Vec<Vec<(f64, f64)>> = Vec::new();
    for k in 1..=12usize {
        let mut list = Vec::with_capacity(1 << k);
        for mask in 0u32..(1 << k) {
            let mut prob = 1.0;
            let mut sum = 0.0;
            for i in 0..k {
                if mask >> i & 1 == 1 {
                    prob *= q[i];
                    sum += b[i];
                } else {
                    prob *= 1.0 - q[i];
                }
            }
            list.push(((sum - z[k - 1]).abs(), prob));
        }
        per_k.push(list);
    }
    let tail_prob = |k: u64, t: f64| -> f64 {
        per_k[(k - 1) as usize]
            .iter()
            .filter(|(d, _)| *d > t)
            .map(|(_, p)| p)
            .sum()
    };
    let moment = |k: u64, p: f64| -> f64 {
        per_k[(k - 1) as usize]
            .iter()
            .map(|(d, pr)| d.powf(p) * pr)
            .sum()
    };

    let delta = 0.25;
    let w = 1.0;
    let mut combos = 0usize;
    for &p in &[1.0, 2.0, 3.0] {
        // Exact moment-envelope increments; the submartingale property
        // keeps them nonnegative.
        let mut gammas = Vec::new();
        let mut prev = 0.0;
        for k in 1..=12u64 {
            let mk = moment(k, p);
            assert!(mk + 1e-12 >= prev, "moment increments must be nonnegative");
            gammas.push((mk - prev).max(0.0));
            prev = mk;
        }
        let spec = SeriesSpec::finite(gammas, p).unwrap();
        for &alpha in &[1.2, 1.5, 2.0] {
            let ctx = BlockContext::new(alpha, delta, w, z.clone()).unwrap();
            let mut n_avail = 0u32;
            while alpha.powi(n_avail as i32 + 2) <= 12.0 {
                n_avail += 1;
            }
            for &eps in &[0.25, 0.5] {
                for q_start in 0..=2u32.min(n_avail) {
                    let rhs = subsequence_tail_bound(q_start, eps, alpha, &spec, 12)
                        .unwrap()
                        .value;
                    for s in 0..=ctx.slot_count() {
                        let mut lhs_minus = 0.0;
                        let mut lhs_plus = 0.0;
                        for n in (q_start + 1)..=n_avail {
                            let (k_minus, k_plus) = block_extremes(&ctx, s, n).unwrap();
                            lhs_minus += tail_prob(k_minus, eps * k_minus as f64);
                            lhs_plus += tail_prob(k_plus, eps * k_plus as f64);
                        }
                        assert!(
                            lhs_minus <= rhs + 1e-12 && lhs_plus <= rhs + 1e-12,
                            "p={p} alpha={alpha} eps={eps} Q={q_start} s={s}: \
                             lhs ({lhs_minus}, {lhs_plus}) > rhs {rhs}"
                        );
                        combos += 1;
                    }
                }
            }
        }
    }
    assert!(combos > 100);
    assert!(started.elapsed().as_secs_f64() < 60.0, "must finish within 60 s");
    finish("criterion 4 (tail-sum bound vs exhaustive enumeration)", started);
}

#[test]
fn criterion_05_sandwich_chain_randomized() {
    let started = Instant::now();
    let mut rng = StreamRng::new(505, 0);
    let mut uni = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_f64();
    let mut checks = 0usize;
    for trial in 0..1000 {
        let len = 8 + (uni(0.0, 1.0) * 505.0) as usize;
        let alpha = 1.0 + uni(0.001, 1.0);
        let delta = uni(0.02, 1.0);
        let hi = uni(0.5, 2.0);
        let x: Vec<f64> = (0..len).map(|_| uni(0.0, hi)).collect();
        // Half the trials use the true per-term mean, half an arbitrary
        // nonnegative mean sequence; the chain needs only nonnegativity
        // of x and the mean bound.
        let mut z = Vec::with_capacity(len);
        let mut acc = 0.0;
        for _ in 0..len {
            acc += if trial % 2 == 0 { hi / 2.0 } else { uni(0.0, hi) };
            z.push(acc);
        }
        let max_mean = z
            .iter()
            .enumerate()
            .map(|(i, v)| v / (i + 1) as f64)
            .fold(0.0f64, f64::max);
        let w = (max_mean * 1.0001).max(1e-6);
        let ctx = BlockContext::new(alpha, delta, w, z).unwrap();
        for m in 2..=len as u64 {
            let rep = sandwich_check(&x, &ctx, m).unwrap();
            assert!(rep.holds, "trial {trial} m {m}: {rep:?}");
            checks += 1;
        }
    }
    assert!(checks > 100_000);

    // Constructed counterexample: a negative entry between k- and m breaks
    // the middle link, witnessing that nonnegativity is required.
    let mut x = vec![0.5; 16];
    x[4] = -5.0;
    let z: Vec<f64> = (1..=16).map(|n| 0.5 * n as f64).collect();
    let ctx = BlockContext::new(2.0, 0.25, 1.0, z).unwrap();
    let rep = sandwich_check(&x, &ctx, 5).unwrap();
    assert!(!rep.holds, "negative entries must break the chain");
    assert_eq!(rep.violation.unwrap().0, 3);

    assert!(started.elapsed().as_secs_f64() < 10.0, "must finish within 10 s");
    finish("criterion 5 (sandwich chain, 1000 random trials + counterexample)", started);
}

// ---------------------------------------------------------------------------
// Criteria 6-8 share memoized runs per worker count for the determinism
// criterion.
// ---------------------------------------------------------------------------

struct Memo {
    w1: OnceLock<(Vec<BoundRow>, String)>,
    w8: OnceLock<(Vec<BoundRow>, String)>,
}

impl Memo {
    const fn new() -> Self {
        Memo {
            w1: OnceLock::new(),
            w8: OnceLock::new(),
        }
    }

    fn get(
        &self,
        workers: usize,
        compute: impl Fn() -> (Vec<BoundRow>, String) + Send,
    ) -> &(Vec<BoundRow>, String) {
        let cell = if workers == 1 { &self.w1 } else { &self.w8 };
        cell.get_or_init(|| with_worker_pool(workers, compute))
    }
}

static C6: Memo = Memo::new();
static C7: Memo = Memo::new();
static C8_W1: OnceLock<(Vec<BaumKatzRow>, String)> = OnceLock::new();
static C8_W8: OnceLock<(Vec<BaumKatzRow>, String)> = OnceLock::new();

fn c8(workers: usize) -> &'static (Vec<BaumKatzRow>, String) {
    let cell = if workers == 1 { &C8_W1 } else { &C8_W8 };
    cell.get_or_init(|| with_worker_pool(workers, baum_katz_rows))
}

fn upper_grid_rows() -> (Vec<BoundRow>, String) {
    let profile = MomentProfile::pairwise(1.0, 1.0).unwrap();
    let mut rows = Vec::new();
    for &n in &[10_000u64, 100_000] {
        for &eps in &[0.3, 0.5, 1.0] {
            let mut q = SupTailQuery::new(FamilySpec::rademacher(), n, eps);
            q.paths = 10_000;
            q.seed = 60;
            q.budget = 100_000_000_000;
            let report = verify_upper(&q, &profile).unwrap();
            rows.push(BoundRow::from_report(&q, &report));
        }
    }
    for &eps in &[0.3, 0.5, 1.0] {
        let mut q = SupTailQuery::new(FamilySpec::pairwise(10), 512, eps);
        q.horizon = 1023;
        q.paths = 10_000;
        q.seed = 61;
        let report = verify_upper(&q, &profile).unwrap();
        rows.push(BoundRow::from_report(&q, &report));
    }
    let config = serde_json::json!({
        "suite": "upper-bound",
        "families": ["rademacher", "pairwise k=10"],
        "paths": 10_000,
        "seed": [60, 61],
    });
    let csv = bound_csv(&config, &rows);
    (rows, csv)
}

fn lower_grid_rows() -> (Vec<BoundRow>, String) {
    let mut rows = Vec::new();
    for &n in &[3u64, 10] {
        let lq = LowerQuery {
            delta: 1.0,
            start: n,
            eps: 0.5,
            paths: 10_000_000,
            seed: 70,
            horizon: None,
            budget: slln_core::mc::DEFAULT_BUDGET,
        };
        let (q, report) = verify_lower(&lq).unwrap();
        rows.push(BoundRow::from_report(&q, &report));
    }
    let config = serde_json::json!({
        "suite": "lower-bound",
        "delta": 1.0,
        "eps": 0.5,
        "paths": 10_000_000,
        "seed": 70,
    });
    let csv = bound_csv(&config, &rows);
    (rows, csv)
}

fn baum_katz_rows() -> (Vec<BaumKatzRow>, String) {
    let q = BaumKatzQuery {
        r: -0.5,
        eps: 0.3,
        family: FamilySpec::rademacher(),
        n_max: 10_000,
        per_n_paths: 1000,
        seed: 80,
        budget: slln_core::mc::DEFAULT_BUDGET,
    };
    let rows = baum_katz_partials(&q).unwrap();
    let config = serde_json::json!({
        "suite": "baum-katz",
        "r": -0.5,
        "eps": 0.3,
        "n_max": 10_000,
        "per_n_paths": 1000,
        "seed": 80,
    });
    let csv = baum_katz_csv(&config, &rows);
    (rows, csv)
}

#[test]
fn criterion_06_upper_bound_monte_carlo() {
    let started = Instant::now();
    let (rows, _) = C6.get(8, upper_grid_rows);
    assert_eq!(rows.len(), 9);
    for row in rows {
        assert_ne!(row.verdict, "violated", "{row:?}");
        let expect_vacuous = row.analytic >= 1.0;
        if expect_vacuous {
            assert_eq!(row.verdict, "vacuous", "{row:?}");
        } else {
            assert_eq!(row.verdict, "verified", "{row:?}");
        }
    }
    // Non-vacuous cells: Rademacher (1e4, 1.0) and all of n = 1e5.
    let verified: Vec<_> = rows.iter().filter(|r| r.verdict == "verified").collect();
    assert_eq!(verified.len(), 4);
    assert!(verified
        .iter()
        .any(|r| r.n == 10_000 && (r.analytic - 0.1536).abs() < 1e-12));
    assert!(started.elapsed().as_secs_f64() < 300.0, "must finish within 5 min");
    finish("criterion 6 (upper-bound Monte Carlo grid)", started);
}

#[test]
fn criterion_07_lower_bound_monte_carlo() {
    let started = Instant::now();
    let omega = zeta_constants(1.0).unwrap().omega;
    assert!((omega - 0.0057033).abs() < 1e-7);
    let c = zeta_constants(1.0).unwrap().c;
    assert!((c - 1.0 / zeta(4.0)).abs() < 1e-15);

    let (rows, _) = C7.get(8, lower_grid_rows);
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.verdict, "verified", "{row:?}");
        let expect = omega / (row.n as f64).powi(2);
        assert!(rel_err(row.analytic, expect) < 1e-12);
        assert!(row.ci_low >= row.analytic);
    }
    // ~1100 hits expected at n = 10 (the m = n block alone contributes
    // about n w / n^3 = 1.14e-4 of the 1e7 paths).
    let n10 = rows.iter().find(|r| r.n == 10).unwrap();
    assert!(
        n10.hits > 700 && n10.hits < 20_000,
        "n = 10 hits = {}",
        n10.hits
    );
    assert!(started.elapsed().as_secs_f64() < 300.0, "must finish within 5 min");
    finish("criterion 7 (heavy-tail lower bound at 1e7 paths)", started);
}

#[test]
fn criterion_08_baum_katz_partial_sums() {
    let started = Instant::now();
    let (rows, _) = c8(8);
    assert!(rows.last().unwrap().upto == 10_000);
    for row in &rows {
        assert!(
            row.empirical_partial <= row.majorant_partial,
            "empirical above majorant: {row:?}"
        );
        assert!(row.majorant_partial <= row.majorant_series_partial + 1e-12);
    }
    // The scaled majorant series converges: between grid cutoffs the
    // partial sums move by no more than the integral tail bound.
    for pair in rows.windows(2) {
        let step = pair[1].majorant_series_partial - pair[0].majorant_series_partial;
        assert!(step >= 0.0);
        assert!(step <= pair[0].majorant_tail_bound * (1.0 + 1e-9), "{pair:?}");
    }
    // Per-term increments of the weight series n^(r-1) are below 1e-3 well
    // before the 1e4 cutoff and stay there beyond it.
    for &n in &[10_001u64, 20_000, 50_000, 100_000] {
        assert!((n as f64).powf(-1.5) < 1e-3);
    }
    let scale = 1536.0 / (0.3f64 * 0.3 * 0.3);
    let last = rows.last().unwrap();
    assert!(rel_err(last.majorant_tail_bound, scale * 2.0 / 100.0) < 1e-12);
    assert!(started.elapsed().as_secs_f64() < 300.0, "must finish within 5 min");
    finish("criterion 8 (weighted tail partial sums vs majorant)", started);
}

#[test]
fn criterion_09_threshold_theorems() {
    let started = Instant::now();
    let spec = SeriesSpec::constant_gamma(1.0 / 12.0, 2.0)
        .unwrap()
        .with_gamma_bound(1.0)
        .unwrap();

    // Strictly decreasing in lambda (both the real value and the integer
    // threshold on this grid).
    let mut prev_raw = f64::INFINITY;
    let mut prev_int = u64::MAX;
    for &lambda in &[0.05, 0.1, 0.2, 0.4, 0.8] {
        let raw = chen_sung_threshold_raw(1.0, lambda, &spec, 1.0).unwrap();
        let int = chen_sung_threshold(1.0, lambda, &spec, 1.0).unwrap();
        assert!(raw < prev_raw && int < prev_int, "lambda grid at {lambda}");
        prev_raw = raw;
        prev_int = int;
    }
    // Nonincreasing in eps.
    let mut prev = 0.0;
    for &eps in &[1.0, 0.5, 0.25] {
        let raw = chen_sung_threshold_raw(eps, 0.5, &spec, 1.0).unwrap();
        assert!(raw >= prev);
        prev = raw;
    }
    // Nondecreasing in Gamma (composed) and W (theorem-shaped closed form;
    // the sharp composition is not globally W-monotone).
    let mut prev = 0.0;
    for &g in &[1.0, 2.0, 4.0] {
        let s = spec.clone().with_gamma_bound(g).unwrap();
        let raw = chen_sung_threshold_raw(1.0, 0.5, &s, 1.0).unwrap();
        assert!(raw >= prev);
        prev = raw;
    }
    let mut prev = 0.0;
    for &w in &[1.0, 2.0, 4.0] {
        let v = chen_sung_closed_form(1.0, 0.5, &spec, w).unwrap().value;
        assert!(v >= prev);
        prev = v;
    }
    // The positive/negative-part reduction is exact.
    for &(eps, lambda) in &[(1.0, 0.5), (0.8, 0.2), (0.5, 1.0)] {
        assert_eq!(
            csorgo_threshold(eps, lambda, &spec, 1.0).unwrap(),
            chen_sung_threshold(eps / 2.0, lambda / 2.0, &spec, 1.0).unwrap()
        );
    }

    let family = FamilySpec::iid(Dist::Uniform { a: 0.0, b: 1.0 });
    // Budget-feasible arm: n* ~ 2.35e6 at eps = 0.4, horizon 32 n* with 100
    // paths fits the default budget; the empirical tail must sit under
    // lambda.
    let tq = ThresholdQuery {
        theorem: ThresholdTheorem::ChenSung,
        spec: spec.clone(),
        w: 1.0,
        eps: 0.4,
        lambda: 0.5,
        family: family.clone(),
        paths: 100,
        seed: 90,
        budget: slln_core::mc::DEFAULT_BUDGET,
    };
    let out = verify_threshold(&tq).unwrap();
    assert_eq!(out.n_star, 2_346_583);
    let e = out.report.empirical.expect("within budget");
    assert!(e.p_hat + (e.ci_high - e.p_hat) <= 0.5, "{e:?}");
    assert_eq!(out.report.verdict, Verdict::Verified);

    // Full-scale content is not reproducible once n* outruns the budget;
    // the run is recorded as inconclusive with the threshold attached.
    let tq = ThresholdQuery {
        eps: 0.25,
        lambda: 0.1,
        ..tq
    };
    let out = verify_threshold(&tq).unwrap();
    assert_eq!(out.n_star, 143_523_034);
    assert_eq!(out.report.verdict, Verdict::Inconclusive);
    assert!(out.report.empirical.is_none());

    assert!(started.elapsed().as_secs_f64() < 120.0, "must finish within 2 min");
    finish("criterion 9 (threshold theorems: monotonicity, reduction, budget arms)", started);
}

#[test]
fn criterion_10_determinism_across_worker_counts() {
    let started = Instant::now();
    let upper_1 = &C6.get(1, upper_grid_rows).1;
    let upper_8 = &C6.get(8, upper_grid_rows).1;
    assert_eq!(upper_1, upper_8, "upper-bound CSV differs across pools");

    let lower_1 = &C7.get(1, lower_grid_rows).1;
    let lower_8 = &C7.get(8, lower_grid_rows).1;
    assert_eq!(lower_1, lower_8, "lower-bound CSV differs across pools");

    let bk_1 = &c8(1).1;
    let bk_8 = &c8(8).1;
    assert_eq!(bk_1, bk_8, "baum-katz CSV differs across pools");

    assert!(upper_8.len() > 100 && lower_8.len() > 100 && bk_8.len() > 100);
    finish("criterion 10 (byte-identical outputs at 1 and 8 workers)", started);
}

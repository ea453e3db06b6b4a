//! Random-variable families with exact moment data and reproducible
//! samplers: iid bounded distributions, the subset-product construction
//! (pairwise independent but mutually dependent signs), and the heavy-tail
//! integer family with `P(X = n) = c / n^{3+delta}`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rate::MomentProfile;
use crate::stream::{SignSource, StreamRng};
use crate::zeta::zeta;

/// Single-variable distribution descriptors for iid families.
#[derive(Debug, Clone, PartialEq)]
pub enum Dist {
    /// Fair signs in {-1, +1}.
    Rademacher,
    /// Continuous uniform on [a, b).
    Uniform { a: f64, b: f64 },
    /// Finite discrete table.
    Table { values: Vec<f64>, probs: Vec<f64> },
}

impl Dist {
    fn validate(&self) -> Result<()> {
        match self {
            Dist::Rademacher => Ok(()),
            Dist::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    Err(Error::invalid("uniform needs finite a < b"))
                } else {
                    Ok(())
                }
            }
            Dist::Table { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::invalid("table needs matching nonempty values/probs"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("table values must be finite"));
                }
                if probs.iter().any(|&p| !(p >= 0.0)) {
                    return Err(Error::invalid("table probs must be nonnegative"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid(format!("table probs sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    fn mean(&self) -> f64 {
        match self {
            Dist::Rademacher => 0.0,
            Dist::Uniform { a, b } => 0.5 * (a + b),
            Dist::Table { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    fn variance(&self) -> f64 {
        match self {
            Dist::Rademacher => 1.0,
            Dist::Uniform { a, b } => (b - a) * (b - a) / 12.0,
            Dist::Table { values, probs } => {
                let m = self.mean();
                values.iter().zip(probs).map(|(v, p)| (v - m) * (v - m) * p).sum()
            }
        }
    }

    fn abs_moment(&self) -> f64 {
        match self {
            Dist::Rademacher => 1.0,
            Dist::Uniform { a, b } => {
                if *a >= 0.0 {
                    0.5 * (a + b)
                } else if *b <= 0.0 {
                    -0.5 * (a + b)
                } else {
                    // E|U| over [a, b) straddling zero.
                    (a * a + b * b) / (2.0 * (b - a))
                }
            }
            Dist::Table { values, probs } => values.iter().zip(probs).map(|(v, p)| v.abs() * p).sum(),
        }
    }
}

/// Generative description of a random-variable sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    Iid(Dist),
    /// Products of k iid signs over nonempty subsets: exactly `2^k - 1`
    /// pairwise independent, mutually dependent +-1 variables.
    PairwiseSubsetProduct { k: u32 },
    /// Integer family `P(X = n) = c / n^{3+delta}`; `centered` shifts by
    /// the exact mean.
    HeavyTailZeta { delta: f64, centered: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
}

/// Derived constants of the heavy-tail family.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ZetaConstants {
    pub delta: f64,
    /// Normalizer `1 / zeta(3 + delta)`.
    pub c: f64,
    /// Mean `c zeta(2 + delta)`; always below 2.
    pub mu: f64,
    /// Lower-bound constant `c / (2 * 3^{2+delta} (2+delta))`.
    pub omega: f64,
    /// Tail constant `c / (3^{2+delta} (2+delta))`, so `omega = w / 2`.
    pub w: f64,
}

pub fn zeta_constants(delta: f64) -> Result<ZetaConstants> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta must be positive"));
    }
    let c = 1.0 / zeta(3.0 + delta);
    let mu = c * zeta(2.0 + delta);
    let w = c / (3f64.powf(2.0 + delta) * (2.0 + delta));
    Ok(ZetaConstants {
        delta,
        c,
        mu,
        omega: w / 2.0,
        w,
    })
}

/// Inverse-CDF table for the heavy-tail family, truncated where the
/// residual mass drops below 1e-12; the residual is folded into the last
/// atom and the induced mean bias is recorded.
#[derive(Debug, Clone)]
pub struct HeavyTailTable {
    pub consts: ZetaConstants,
    cdf: Vec<f64>,
    /// Mean of the folded table minus the exact mean `mu` (tiny, negative).
    pub mean_fold_bias: f64,
}

impl HeavyTailTable {
    pub fn new(consts: &ZetaConstants) -> Self {
        let s = 3.0 + consts.delta;
        // Residual mass beyond K is at most c K^{-(2+delta)} / (2+delta).
        let cutoff = (consts.c / ((s - 1.0) * 1e-12))
            .powf(1.0 / (s - 1.0))
            .ceil()
            .max(2.0) as u64;
        let mut cdf = Vec::with_capacity(cutoff as usize);
        let mut acc = 0.0f64;
        for n in 1..=cutoff {
            acc += consts.c * (n as f64).powf(-s);
            cdf.push(acc.min(1.0));
        }
        let last = cdf.len() - 1;
        let residual = 1.0 - cdf[last];
        cdf[last] = 1.0;
        // Folding mass `residual` onto the last atom replaces the true tail
        // contribution sum_{n>K} n p_n by K * residual.
        let a = (cutoff + 1) as f64;
        let t = s - 1.0; // exponent of the mean tail sum
        let tail_mean = consts.c
            * (a.powf(1.0 - t) / (t - 1.0) + 0.5 * a.powf(-t) + t * a.powf(-t - 1.0) / 12.0);
        let mean_fold_bias = cutoff as f64 * residual.max(0.0) - tail_mean;
        HeavyTailTable {
            consts: *consts,
            cdf,
            mean_fold_bias,
        }
    }

    pub fn cutoff(&self) -> u64 {
        self.cdf.len() as u64
    }

    pub fn cdf_at(&self, n: u64) -> f64 {
        self.cdf[(n - 1) as usize]
    }
}

/// Inverse-CDF sample: the smallest `n` with `CDF(n) > u`.
pub fn heavy_tail_sample(table: &HeavyTailTable, u: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::invalid(format!("u = {u} outside [0, 1)")));
    }
    let idx = table.cdf.partition_point(|&c| c <= u);
    Ok(idx as u64 + 1)
}

/// Nonempty subsets of {1..k} in canonical order: increasing cardinality,
/// then lexicographic on the sorted element tuples. Returned as bitmasks
/// (bit i-1 set = element i in the subset).
pub fn subset_masks(k: u32) -> Vec<u32> {
    fn lex_cmp(mut a: u32, mut b: u32) -> std::cmp::Ordering {
        while a != 0 && b != 0 {
            let ea = a.trailing_zeros();
            let eb = b.trailing_zeros();
            match ea.cmp(&eb) {
                std::cmp::Ordering::Equal => {
                    a &= a - 1;
                    b &= b - 1;
                }
                other => return other,
            }
        }
        a.count_ones().cmp(&b.count_ones())
    }
    let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
    masks.sort_by(|&a, &b| a.count_ones().cmp(&b.count_ones()).then(lex_cmp(a, b)));
    masks
}

/// Subset-product path from explicit seed signs (for deterministic checks):
/// entry for subset `S` is the product of the seed signs over `S`.
pub fn pairwise_path_from_signs(k: u32, length: u64, signs: &[i8]) -> Result<Vec<f64>> {
    if signs.len() != k as usize {
        return Err(Error::LengthMismatch(format!(
            "need {k} seed signs, got {}",
            signs.len()
        )));
    }
    if length > (1u64 << k) - 1 {
        return Err(Error::invalid(format!(
            "length {length} exceeds 2^{k} - 1 subset products"
        )));
    }
    let mut neg_mask = 0u32;
    for (i, &s) in signs.iter().enumerate() {
        match s {
            1 => {}
            -1 => neg_mask |= 1 << i,
            _ => return Err(Error::invalid("seed signs must be +-1")),
        }
    }
    Ok(subset_masks(k)
        .into_iter()
        .take(length as usize)
        .map(|m| if (m & neg_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect())
}

/// Subset-product path with the k seed signs drawn from `(seed, stream)`.
pub fn pairwise_family_path(k: u32, length: u64, seed: u64, stream: u64) -> Result<Vec<f64>> {
    if k == 0 || k > 20 {
        return Err(Error::invalid("k must be in 1..=20"));
    }
    if length > (1u64 << k) - 1 {
        return Err(Error::invalid(format!(
            "length {length} exceeds 2^{k} - 1 subset products"
        )));
    }
    let mut src = SignSource::new(StreamRng::new(seed, stream));
    let neg_mask = src.next_bits(k);
    Ok(subset_masks(k)
        .into_iter()
        .take(length as usize)
        .map(|m| if (m & neg_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect())
}

/// Shared per-family tables built once and reused across paths.
#[derive(Debug, Clone)]
enum FactoryData {
    Rademacher,
    Uniform { a: f64, width: f64 },
    Table { cum: Arc<Vec<f64>>, values: Arc<Vec<f64>> },
    HeavyTail { table: Arc<HeavyTailTable>, shift: f64 },
    Pairwise { k: u32, masks: Arc<Vec<u32>> },
}

/// Builds reproducible per-path samplers for one family.
#[derive(Debug, Clone)]
pub struct SamplerFactory {
    data: FactoryData,
}

impl SamplerFactory {
    pub fn path(&self, seed: u64, stream: u64) -> PathSampler {
        let inner = match &self.data {
            FactoryData::Rademacher => SamplerImpl::Rademacher {
                src: SignSource::new(StreamRng::new(seed, stream)),
            },
            FactoryData::Uniform { a, width } => SamplerImpl::Uniform {
                a: *a,
                width: *width,
                rng: StreamRng::new(seed, stream),
            },
            FactoryData::Table { cum, values } => SamplerImpl::Table {
                cum: Arc::clone(cum),
                values: Arc::clone(values),
                rng: StreamRng::new(seed, stream),
            },
            FactoryData::HeavyTail { table, shift } => SamplerImpl::HeavyTail {
                table: Arc::clone(table),
                shift: *shift,
                rng: StreamRng::new(seed, stream),
            },
            FactoryData::Pairwise { k, masks } => {
                let mut src = SignSource::new(StreamRng::new(seed, stream));
                SamplerImpl::Pairwise {
                    masks: Arc::clone(masks),
                    neg_mask: src.next_bits(*k),
                    idx: 0,
                }
            }
        };
        PathSampler { inner }
    }
}

#[derive(Debug, Clone)]
enum SamplerImpl {
    Rademacher { src: SignSource },
    Uniform { a: f64, width: f64, rng: StreamRng },
    Table { cum: Arc<Vec<f64>>, values: Arc<Vec<f64>>, rng: StreamRng },
    HeavyTail { table: Arc<HeavyTailTable>, shift: f64, rng: StreamRng },
    Pairwise { masks: Arc<Vec<u32>>, neg_mask: u32, idx: usize },
}

/// One reproducible path of family draws.
#[derive(Debug, Clone)]
pub struct PathSampler {
    inner: SamplerImpl,
}

impl PathSampler {
    #[inline]
    pub fn next(&mut self) -> f64 {
        match &mut self.inner {
            SamplerImpl::Rademacher { src } => src.next_sign(),
            SamplerImpl::Uniform { a, width, rng } => *a + *width * rng.next_f64(),
            SamplerImpl::Table { cum, values, rng } => {
                let u = rng.next_f64();
                let idx = cum.partition_point(|&c| c <= u).min(values.len() - 1);
                values[idx]
            }
            SamplerImpl::HeavyTail { table, shift, rng } => {
                let u = rng.next_f64();
                let n = if u < table.cdf[0] {
                    1
                } else {
                    table.cdf.partition_point(|&c| c <= u) as u64 + 1
                };
                n as f64 + *shift
            }
            SamplerImpl::Pairwise { masks, neg_mask, idx } => {
                let m = masks[*idx];
                *idx += 1;
                if (m & *neg_mask).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

impl FamilySpec {
    pub fn iid(dist: Dist) -> Self {
        FamilySpec {
            kind: FamilyKind::Iid(dist),
        }
    }

    pub fn rademacher() -> Self {
        FamilySpec::iid(Dist::Rademacher)
    }

    pub fn pairwise(k: u32) -> Self {
        FamilySpec {
            kind: FamilyKind::PairwiseSubsetProduct { k },
        }
    }

    pub fn heavy_tail(delta: f64, centered: bool) -> Self {
        FamilySpec {
            kind: FamilyKind::HeavyTailZeta { delta, centered },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            FamilyKind::Iid(d) => d.validate(),
            FamilyKind::PairwiseSubsetProduct { k } => {
                if *k == 0 || *k > 20 {
                    Err(Error::invalid("pairwise family needs k in 1..=20"))
                } else {
                    Ok(())
                }
            }
            FamilyKind::HeavyTailZeta { delta, .. } => {
                if !(*delta > 0.0 && delta.is_finite()) {
                    Err(Error::invalid("heavy-tail family needs delta > 0"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Exact mean of the emitted variables (0 for centered families).
    pub fn mean(&self) -> Result<f64> {
        Ok(match &self.kind {
            FamilyKind::Iid(d) => d.mean(),
            FamilyKind::PairwiseSubsetProduct { .. } => 0.0,
            FamilyKind::HeavyTailZeta { delta, centered } => {
                if *centered {
                    0.0
                } else {
                    zeta_constants(*delta)?.mu
                }
            }
        })
    }

    pub fn variance(&self) -> Result<f64> {
        Ok(match &self.kind {
            FamilyKind::Iid(d) => d.variance(),
            FamilyKind::PairwiseSubsetProduct { .. } => 1.0,
            FamilyKind::HeavyTailZeta { delta, .. } => {
                let consts = zeta_constants(*delta)?;
                consts.c * zeta(1.0 + *delta) - consts.mu * consts.mu
            }
        })
    }

    /// Exact `E|X|` of the emitted variables. For the centered heavy-tail
    /// family this collapses to `2 c (mu - 1)` because only the first atom
    /// sits below the mean.
    pub fn abs_moment(&self) -> Result<f64> {
        Ok(match &self.kind {
            FamilyKind::Iid(d) => d.abs_moment(),
            FamilyKind::PairwiseSubsetProduct { .. } => 1.0,
            FamilyKind::HeavyTailZeta { delta, centered } => {
                let consts = zeta_constants(*delta)?;
                if *centered {
                    2.0 * consts.c * (consts.mu - 1.0)
                } else {
                    consts.mu
                }
            }
        })
    }

    pub fn moment_profile(&self) -> Result<MomentProfile> {
        let sigma2 = self.variance()?;
        let tau = self.abs_moment()?;
        let mu = self.mean()?;
        Ok(MomentProfile {
            sigma2,
            tau,
            w: mu.abs().max(1.0),
            gamma_bound: (sigma2 * zeta(2.0) * (1.0 + 1e-12)).max(1.0),
            p: 2.0,
            mu,
        })
    }

    /// Number of variables the family can emit, if finite.
    pub fn max_len(&self) -> Option<u64> {
        match &self.kind {
            FamilyKind::PairwiseSubsetProduct { k } => Some((1u64 << k) - 1),
            _ => None,
        }
    }

    /// Radius `sup |X - center|` when the support is bounded; lets the
    /// harness skip simulations that provably cannot produce a hit.
    pub fn support_radius(&self, center: f64) -> Option<f64> {
        match &self.kind {
            FamilyKind::Iid(Dist::Rademacher) | FamilyKind::PairwiseSubsetProduct { .. } => {
                Some((1.0 - center).abs().max((-1.0 - center).abs()))
            }
            FamilyKind::Iid(Dist::Uniform { a, b }) => {
                Some((a - center).abs().max((b - center).abs()))
            }
            FamilyKind::Iid(Dist::Table { values, .. }) => values
                .iter()
                .map(|v| (v - center).abs())
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d)))),
            FamilyKind::HeavyTailZeta { .. } => None,
        }
    }

    pub fn sampler_factory(&self) -> Result<SamplerFactory> {
        self.validate()?;
        let data = match &self.kind {
            FamilyKind::Iid(Dist::Rademacher) => FactoryData::Rademacher,
            FamilyKind::Iid(Dist::Uniform { a, b }) => FactoryData::Uniform {
                a: *a,
                width: b - a,
            },
            FamilyKind::Iid(Dist::Table { values, probs }) => {
                let mut cum = Vec::with_capacity(probs.len());
                let mut acc = 0.0;
                for &p in probs {
                    acc += p;
                    cum.push(acc.min(1.0));
                }
                *cum.last_mut().expect("nonempty") = 1.0;
                FactoryData::Table {
                    cum: Arc::new(cum),
                    values: Arc::new(values.clone()),
                }
            }
            FamilyKind::HeavyTailZeta { delta, centered } => {
                let consts = zeta_constants(*delta)?;
                FactoryData::HeavyTail {
                    table: Arc::new(HeavyTailTable::new(&consts)),
                    shift: if *centered { -consts.mu } else { 0.0 },
                }
            }
            FamilyKind::PairwiseSubsetProduct { k } => FactoryData::Pairwise {
                k: *k,
                masks: Arc::new(subset_masks(*k)),
            },
        };
        Ok(SamplerFactory { data })
    }
}

/// Materialize one path. Deterministic in `(seed, stream)` regardless of
/// worker count; the Monte-Carlo harness streams through the same sampler.
pub fn sample_path(spec: &FamilySpec, length: u64, seed: u64, stream: u64) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(Error::invalid("length must be >= 1"));
    }
    if let Some(cap) = spec.max_len() {
        if length > cap {
            return Err(Error::invalid(format!(
                "length {length} exceeds the family's {cap} variables"
            )));
        }
    }
    let factory = spec.sampler_factory()?;
    let mut sampler = factory.path(seed, stream);
    Ok((0..length).map(|_| sampler.next()).collect())
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FamilyKind::Iid(Dist::Rademacher) => write!(f, "family=iid dist=rademacher"),
            FamilyKind::Iid(Dist::Uniform { a, b }) => {
                write!(f, "family=iid dist=uniform a={a} b={b}")
            }
            FamilyKind::Iid(Dist::Table { values, probs }) => {
                let vs: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                let ps: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
                write!(
                    f,
                    "family=iid dist=table values={} probs={}",
                    vs.join(";"),
                    ps.join(";")
                )
            }
            FamilyKind::PairwiseSubsetProduct { k } => write!(f, "family=pairwise k={k}"),
            FamilyKind::HeavyTailZeta { delta, centered } => {
                write!(f, "family=heavy_tail delta={delta} centered={centered}")
            }
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses the `key=value` text form, e.g.
    /// `family=heavy_tail delta=1.0 centered=true`.
    fn from_str(s: &str) -> Result<Self> {
        let mut kv = std::collections::BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got `{tok}`")))?;
            kv.insert(k.to_string(), v.to_string());
        }
        let family = kv
            .get("family")
            .ok_or_else(|| Error::invalid("missing family=..."))?
            .as_str();
        let get_f64 = |key: &str| -> Result<f64> {
            kv.get(key)
                .ok_or_else(|| Error::invalid(format!("missing {key}=...")))?
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("bad {key}: {e}")))
        };
        let spec = match family {
            "iid" => {
                let dist = kv
                    .get("dist")
                    .ok_or_else(|| Error::invalid("missing dist=..."))?
                    .as_str();
                match dist {
                    "rademacher" => FamilySpec::rademacher(),
                    "uniform" => FamilySpec::iid(Dist::Uniform {
                        a: get_f64("a")?,
                        b: get_f64("b")?,
                    }),
                    "table" => {
                        let parse_list = |key: &str| -> Result<Vec<f64>> {
                            kv.get(key)
                                .ok_or_else(|| Error::invalid(format!("missing {key}=...")))?
                                .split(';')
                                .map(|t| {
                                    t.parse::<f64>()
                                        .map_err(|e| Error::invalid(format!("bad {key}: {e}")))
                                })
                                .collect()
                        };
                        FamilySpec::iid(Dist::Table {
                            values: parse_list("values")?,
                            probs: parse_list("probs")?,
                        })
                    }
                    other => return Err(Error::invalid(format!("unknown dist `{other}`"))),
                }
            }
            "pairwise" => {
                let k = kv
                    .get("k")
                    .ok_or_else(|| Error::invalid("missing k=..."))?
                    .parse::<u32>()
                    .map_err(|e| Error::invalid(format!("bad k: {e}")))?;
                FamilySpec::pairwise(k)
            }
            "heavy_tail" => {
                let centered = match kv.get("centered").map(|s| s.as_str()) {
                    None => false,
                    Some("true") => true,
                    Some("false") => false,
                    Some(other) => {
                        return Err(Error::invalid(format!("bad centered flag `{other}`")))
                    }
                };
                FamilySpec::heavy_tail(get_f64("delta")?, centered)
            }
            other => return Err(Error::invalid(format!("unknown family `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

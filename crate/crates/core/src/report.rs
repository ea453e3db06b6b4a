//! Machine-readable run records: CSV tables and JSON lines.
//!
//! Floating-point fields are printed with 9 significant digits so golden
//! files round-trip double comparisons; formatting is fixed and locale-free
//! so identical runs produce byte-identical output.

use crate::mc::{BoundReport, SupTailQuery};

/// Render with 9 significant digits: plain decimal in a readable magnitude
/// range, normalized scientific outside it.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp10 = x.abs().log10().floor() as i32;
    if (-4..=12).contains(&exp10) {
        let decimals = (8 - exp10).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

/// `sig9` rounding applied back onto an f64, for JSON number fields.
pub fn sig9_value(x: f64) -> f64 {
    sig9(x).parse().unwrap_or(x)
}

pub const BOUND_CSV_HEADER: &str =
    "family,n,eps,horizon,paths,hits,p_hat,ci_low,ci_high,analytic,verdict";

/// One verification line with the columns of [`BOUND_CSV_HEADER`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundRow {
    pub family: String,
    pub n: u64,
    pub eps: f64,
    pub horizon: u64,
    pub paths: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic: f64,
    pub verdict: String,
}

impl BoundRow {
    pub fn from_report(q: &SupTailQuery, report: &BoundReport) -> Self {
        let e = report.empirical;
        BoundRow {
            family: q.family.to_string(),
            n: q.start,
            eps: q.eps,
            horizon: e.map_or(q.horizon, |e| e.horizon_used),
            paths: q.paths,
            hits: e.map_or(0, |e| e.hits),
            p_hat: e.map_or(f64::NAN, |e| e.p_hat),
            ci_low: e.map_or(f64::NAN, |e| e.ci_low),
            ci_high: e.map_or(f64::NAN, |e| e.ci_high),
            analytic: report.analytic,
            verdict: report.verdict.to_string(),
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            sig9(self.eps),
            self.horizon,
            self.paths,
            self.hits,
            sig9(self.p_hat),
            sig9(self.ci_low),
            sig9(self.ci_high),
            sig9(self.analytic),
            self.verdict
        )
    }

    /// One-object-per-line JSON record; `config` is embedded verbatim so a
    /// record is replayable on its own.
    pub fn json_line(&self, config: &serde_json::Value) -> String {
        serde_json::json!({
            "config": config,
            "family": self.family,
            "n": self.n,
            "eps": sig9_value(self.eps),
            "horizon": self.horizon,
            "paths": self.paths,
            "hits": self.hits,
            "p_hat": sig9_value(self.p_hat),
            "ci_low": sig9_value(self.ci_low),
            "ci_high": sig9_value(self.ci_high),
            "analytic": sig9_value(self.analytic),
            "verdict": self.verdict,
        })
        .to_string()
    }
}

pub const BAUM_KATZ_CSV_HEADER: &str =
    "upto,empirical_partial,majorant_partial,majorant_series_partial,majorant_tail_bound";

pub fn baum_katz_csv_line(row: &crate::mc::BaumKatzRow) -> String {
    format!(
        "{},{},{},{},{}",
        row.upto,
        sig9(row.empirical_partial),
        sig9(row.majorant_partial),
        sig9(row.majorant_series_partial),
        sig9(row.majorant_tail_bound)
    )
}

pub fn baum_katz_csv(config: &serde_json::Value, rows: &[crate::mc::BaumKatzRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# config: {config}\n"));
    out.push_str(BAUM_KATZ_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&baum_katz_csv_line(row));
        out.push('\n');
    }
    out
}

/// CSV table with a replayable config comment, the fixed header, and one
/// line per row.
pub fn bound_csv(config: &serde_json::Value, rows: &[BoundRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# config: {config}\n"));
    out.push_str(BOUND_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

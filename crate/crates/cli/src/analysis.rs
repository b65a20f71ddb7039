//! PD sweeps over enumerated schemes and the report they produce.

use std::fmt::Write;

use pdtomo::linalg::DEFAULT_KAPPA_MAX;
use pdtomo::model::Provenance;
use pdtomo::pd::{partial_determinant, reduced_pd, shots_threshold, triviality_test, DEFAULT_THRESHOLD};
use pdtomo::schemes::{build_square, enumerate, sensitivity, BracketScheme, SensitivityProfile, SettingSelection};
use pdtomo::DataTensor;
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    /// Classes to sweep; empty means every class.
    pub classes: Vec<usize>,
    /// Explicit scheme texts; when given, `classes` is ignored.
    pub schemes: Vec<String>,
    pub threshold: Option<f64>,
    pub reduced: bool,
    /// Leave out the timestamp.
    pub deterministic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedRecord {
    /// Side of the leading block, `r + 1`.
    pub size: usize,
    pub x: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeRecord {
    pub scheme: String,
    pub class: usize,
    pub rank: usize,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trivial: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corner_conditions: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedRecord>,
    pub sensitivity: SensitivityProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub m: usize,
    pub d: usize,
    pub shape: Vec<usize>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSettings {
    pub classes: Vec<usize>,
    /// `null` when the per-scheme default applies.
    pub threshold: Option<f64>,
    pub threshold_rule: &'static str,
    pub reduced: bool,
    pub kappa_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schemes: usize,
    pub trivial: usize,
    pub nontrivial: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub input: InputSummary,
    pub settings: RunSettings,
    pub summary: Summary,
    /// In enumeration order.
    pub records: Vec<SchemeRecord>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports serialize");
        out.push('\n');
        out
    }

    pub fn failed(&self) -> usize {
        self.summary.failed
    }

    /// Fixed-width table, highest score first, failures last.
    pub fn table(&self) -> String {
        let mut rows: Vec<&SchemeRecord> = self.records.iter().collect();
        rows.sort_by(|a, b| match (a.score, b.score) {
            (Some(x), Some(y)) => y.total_cmp(&x),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
        let width = rows.iter().map(|r| r.scheme.chars().count()).max().unwrap_or(6).max(6);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  k  {:>10}  {:<10}  sensitive to", "scheme", "score", "verdict");
        for r in rows {
            let (score, verdict) = match (r.score, r.trivial) {
                (Some(s), Some(t)) => (format!("{s:>10.3e}"), if t { "trivial" } else { "NONTRIVIAL" }),
                _ => (format!("{:>10}", "-"), "failed"),
            };
            let tail = match &r.error {
                Some(e) => e.clone(),
                None => {
                    let sens: Vec<String> = r.sensitivity.sensitive_to.iter().map(ToString::to_string).collect();
                    sens.join(" ")
                }
            };
            let _ = writeln!(out, "{:<width$}  {}  {score}  {verdict:<10}  {tail}", r.scheme, r.class);
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} schemes: {} trivial, {} nontrivial, {} failed",
            s.schemes, s.trivial, s.nontrivial, s.failed
        );
        out
    }
}

/// Per-axis settings a tensor needs so every scheme of every class fits.
pub fn settings_for_all_schemes(m: usize, d: usize) -> Result<Vec<usize>, CliError> {
    let mut needed = vec![1; m + 1];
    for k in 1..=m {
        let report = enumerate(m, d, k).map_err(|e| CliError::Usage(e.to_string()))?;
        for s in report.schemes {
            for (n, s) in needed.iter_mut().zip(s.settings_needed()) {
                *n = (*n).max(s);
            }
        }
    }
    Ok(needed)
}

fn select_schemes(t: &DataTensor, opts: &AnalysisOptions) -> Result<(Vec<BracketScheme>, Vec<usize>), CliError> {
    let (m, d) = (t.m(), t.d());
    if !opts.schemes.is_empty() {
        let schemes = opts
            .schemes
            .iter()
            .map(|text| BracketScheme::parse(text, m, d).map_err(|e| CliError::Usage(format!("{text}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut classes: Vec<usize> = schemes.iter().map(BracketScheme::class).collect();
        classes.sort_unstable();
        classes.dedup();
        return Ok((schemes, classes));
    }
    let classes = if opts.classes.is_empty() {
        (1..=m).collect()
    } else {
        opts.classes.clone()
    };
    let mut schemes = Vec::new();
    for &k in &classes {
        schemes.extend(enumerate(m, d, k).map_err(|e| CliError::Usage(e.to_string()))?.schemes);
    }
    Ok((schemes, classes))
}

fn evaluate(t: &DataTensor, scheme: &BracketScheme, threshold: f64, reduced: bool) -> SchemeRecord {
    let mut record = SchemeRecord {
        scheme: scheme.to_string(),
        class: scheme.class(),
        rank: scheme.rank(),
        threshold,
        score: None,
        max_abs_score: None,
        trivial: None,
        corner_conditions: None,
        reduced: None,
        sensitivity: sensitivity(scheme),
        error: None,
    };
    let square = match build_square(t, scheme, &SettingSelection::standard()) {
        Ok(sq) => sq,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let result = if reduced {
        let size = scheme.rank() + 1;
        let full = square.to_matrix();
        reduced_pd(&full.block(0, 0, size, size)).map(|red| {
            record.reduced = Some(ReducedRecord { size, x: red.x });
            let (fro, max_abs) = red.delta.identity_distance();
            (fro, max_abs, red.square.corner_conditions())
        })
    } else {
        partial_determinant(&square).map(|pd| {
            let report = triviality_test(&pd, threshold);
            (report.frobenius_score, report.max_abs_score, report.corner_conditions)
        })
    };
    match result {
        Ok((fro, max_abs, conditions)) => {
            record.score = Some(fro);
            record.max_abs_score = Some(max_abs);
            record.trivial = Some(fro <= threshold);
            record.corner_conditions = Some(conditions);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs every selected scheme; per-scheme failures are recorded, not raised.
pub fn analyze(t: &DataTensor, opts: &AnalysisOptions) -> Result<AnalysisReport, CliError> {
    if let Some(th) = opts.threshold {
        if !(th > 0.0 && th.is_finite()) {
            return Err(CliError::Usage(format!("threshold must be positive, got {th}")));
        }
    }
    let (schemes, classes) = select_schemes(t, opts)?;
    let shots = t.provenance().shots();
    let threshold_for = |s: &BracketScheme| match (opts.threshold, shots) {
        (Some(th), _) => th,
        (None, Some(n)) => shots_threshold(s.rank(), n),
        (None, None) => DEFAULT_THRESHOLD,
    };
    let records: Vec<SchemeRecord> = schemes
        .par_iter()
        .map(|s| evaluate(t, s, threshold_for(s), opts.reduced))
        .collect();
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    let trivial = records.iter().filter(|r| r.trivial == Some(true)).count();
    let generated_at = (!opts.deterministic).then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    Ok(AnalysisReport {
        tool: "pdtomo",
        version: env!("CARGO_PKG_VERSION"),
        generated_at,
        input: InputSummary {
            m: t.m(),
            d: t.d(),
            shape: t.shape().to_vec(),
            provenance: t.provenance().clone(),
        },
        settings: RunSettings {
            classes,
            threshold: opts.threshold,
            threshold_rule: match (opts.threshold, shots) {
                (Some(_), _) => "fixed",
                (None, Some(_)) => "shots",
                (None, None) => "default",
            },
            reduced: opts.reduced,
            kappa_max: DEFAULT_KAPPA_MAX,
        },
        summary: Summary {
            schemes: records.len(),
            trivial,
            nontrivial: records.len() - trivial - failed,
            failed,
        },
        records,
    })
}

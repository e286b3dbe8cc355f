//! Aggregation: per-record metric rows and the per-model comparison
//! summary (mean and median coherence, mean and median meter σ).
//!
//! Failure records and unusable outputs become warning rows rather than
//! aborting a batch; summaries are computed over the rows that carry
//! metrics. Rounding happens only at serialization time — the JSON outputs
//! hold full-precision values, the plain-text table shows two decimals.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence::{coherence_report, GrammarScorer};
use crate::corpus::Poem;
use crate::genclient::{read_records, GenClientError, GenerationRecord};
use crate::meter::meter_report;
use crate::rhyme::{rhyme_report_with, RhymeLexicon};
use crate::syllable::SyllableLexicon;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("records: {0}")]
    Records(#[from] GenClientError),
    #[error("no rows carry metrics; nothing to summarize")]
    NoUsableRows,
}

/// Metrics for one generation record. Rows for failed or unusable records
/// keep their identity but carry no metrics, only warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub record_id: String,
    pub model_label: String,
    pub meter_sigma: Option<f64>,
    pub coherence_composite: Option<f64>,
    /// One scheme label per 4-line window of the poem.
    pub rhyme_schemes: Vec<String>,
    pub warnings: Vec<String>,
}

impl EvalRow {
    pub fn has_metrics(&self) -> bool {
        self.meter_sigma.is_some() && self.coherence_composite.is_some()
    }
}

/// Per-model aggregate; `n` is the number of rows with metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub mean_coherence: f64,
    pub median_coherence: f64,
    pub mean_meter_sigma: f64,
    pub median_meter_sigma: f64,
    pub n: usize,
}

/// Keyed by model label; serializes as `{label: {mean_coherence, …}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvalSummary {
    pub models: BTreeMap<String, ModelSummary>,
}

fn warning_row(record: &GenerationRecord, warning: String) -> EvalRow {
    EvalRow {
        record_id: record.request.id.clone(),
        model_label: record.request.model_label.clone(),
        meter_sigma: None,
        coherence_composite: None,
        rhyme_schemes: Vec::new(),
        warnings: vec![warning],
    }
}

/// Scores one record: output text split on newlines into a poem, then
/// meter, rhyme, and coherence. Unusable records yield warning rows.
pub fn evaluate_record(
    record: &GenerationRecord,
    syllables: &SyllableLexicon,
    rhymes: Option<&RhymeLexicon>,
    scorer: &dyn GrammarScorer,
) -> EvalRow {
    if !record.success {
        let detail = record.error.as_deref().unwrap_or("unknown error");
        return warning_row(record, format!("generation failed: {detail}"));
    }
    let text = match &record.output_text {
        Some(text) => text,
        None => return warning_row(record, "success record has no output text".to_string()),
    };
    let poem = match Poem::from_text(text) {
        Some(poem) => poem,
        None => return warning_row(record, "output has no non-blank lines".to_string()),
    };

    let mut warnings = Vec::new();
    let meter = meter_report(&poem, syllables).expect("poem has at least one line");
    let rhyme = rhyme_report_with(&poem, rhymes);
    let coherence = coherence_report(&poem, scorer);
    if coherence.scorer_fallback {
        warnings.push("grammar scorer unavailable; neutral score used".to_string());
    }
    EvalRow {
        record_id: record.request.id.clone(),
        model_label: record.request.model_label.clone(),
        meter_sigma: Some(meter.sigma),
        coherence_composite: Some(coherence.composite),
        rhyme_schemes: rhyme.quatrain_schemes.iter().map(|s| s.to_string()).collect(),
        warnings,
    }
}

/// Scores every record, in record order. Rows are independent, so the work
/// is fanned out across a small thread pool; the remote grammar scorer
/// therefore sees at most `EVAL_THREADS` concurrent requests.
pub fn evaluate_records(
    records: &[GenerationRecord],
    syllables: &SyllableLexicon,
    rhymes: Option<&RhymeLexicon>,
    scorer: &dyn GrammarScorer,
) -> Vec<EvalRow> {
    const EVAL_THREADS: usize = 4;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(EVAL_THREADS.min(records.len().max(1)))
        .build()
        .expect("thread pool construction");
    pool.install(|| {
        use rayon::prelude::*;
        records
            .par_iter()
            .map(|record| evaluate_record(record, syllables, rhymes, scorer))
            .collect()
    })
}

/// [`evaluate_records`] over a JSON-lines file.
pub fn evaluate_records_file(
    path: &Path,
    syllables: &SyllableLexicon,
    rhymes: Option<&RhymeLexicon>,
    scorer: &dyn GrammarScorer,
) -> Result<Vec<EvalRow>, ReportError> {
    let records = read_records(path)?;
    Ok(evaluate_records(&records, syllables, rhymes, scorer))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Middle element for odd counts, mean of the two middle elements for even.
fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Groups rows with metrics by model label and aggregates. Warning-only
/// rows are skipped; a label with no usable rows is not listed.
pub fn summarize(rows: &[EvalRow]) -> Result<EvalSummary, ReportError> {
    let mut grouped: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in rows {
        if let (Some(sigma), Some(composite)) = (row.meter_sigma, row.coherence_composite) {
            let entry = grouped.entry(row.model_label.clone()).or_default();
            entry.0.push(composite);
            entry.1.push(sigma);
        }
    }
    if grouped.is_empty() {
        return Err(ReportError::NoUsableRows);
    }
    let models = grouped
        .into_iter()
        .map(|(label, (mut coherences, mut sigmas))| {
            // canonical order makes the float sums permutation-invariant
            coherences.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
            sigmas.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
            let summary = ModelSummary {
                mean_coherence: mean(&coherences),
                median_coherence: median(&coherences),
                mean_meter_sigma: mean(&sigmas),
                median_meter_sigma: median(&sigmas),
                n: coherences.len(),
            };
            (label, summary)
        })
        .collect();
    Ok(EvalSummary { models })
}

/// Aligned plain-text table, two decimals, one row per model label.
pub fn render_summary_table(summary: &EvalSummary) -> String {
    let label_width = summary
        .models
        .keys()
        .map(|label| label.len())
        .chain(std::iter::once("Model".len()))
        .max()
        .unwrap_or(5);
    let mut out = format!(
        "{:<label_width$}  {:>10}  {:>12}  {:>12}  {:>14}  {:>5}\n",
        "Model", "Mean Coh", "Median Coh", "Mean Meter", "Median Meter", "N"
    );
    for (label, model) in &summary.models {
        out.push_str(&format!(
            "{:<label_width$}  {:>10.2}  {:>12.2}  {:>12.2}  {:>14.2}  {:>5}\n",
            label,
            model.mean_coherence,
            model.median_coherence,
            model.mean_meter_sigma,
            model.median_meter_sigma,
            model.n
        ));
    }
    out
}

pub fn rows_to_json(rows: &[EvalRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

pub fn summary_to_json(summary: &EvalSummary) -> String {
    serde_json::to_string_pretty(summary).expect("summary serializes")
}

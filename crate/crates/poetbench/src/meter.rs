//! Syllabic regularity of a poem, as population σ over per-line syllable
//! counts, with two trimming rules applied first:
//!
//! - *interrupted*: a final line at least 4 syllables short of the line
//!   before it was cut off by the generation length limit; drop it.
//! - *feeble beginning*: a first line at least 4 syllables short of the
//!   second reads as the tail of an earlier stanza; drop it.
//!
//! Both gaps are inclusive at 4, the tail rule runs before the head rule, and
//! σ uses the population convention (divide by n).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Poem;
use crate::syllable::{count_syllables_line, SyllableLexicon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeterReport {
    /// Per-line syllable counts in line order.
    pub raw_counts: Vec<usize>,
    /// Counts that survive trimming.
    pub used_counts: Vec<usize>,
    pub dropped_first: bool,
    pub dropped_last: bool,
    /// Population standard deviation of `used_counts`; 0 when fewer than
    /// 2 counts remain.
    pub sigma: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeterError {
    #[error("cannot compute meter for an empty poem")]
    EmptyPoem,
}

/// Trimming plus σ over a precomputed count list. The core of
/// [`meter_report`], exposed so callers can score count lists directly.
pub fn report_from_counts(raw_counts: &[usize]) -> Result<MeterReport, MeterError> {
    if raw_counts.is_empty() {
        return Err(MeterError::EmptyPoem);
    }
    let mut used: Vec<usize> = raw_counts.to_vec();
    let mut dropped_last = false;
    let mut dropped_first = false;

    let n = used.len();
    if n >= 2 && used[n - 1] + 4 <= used[n - 2] {
        used.pop();
        dropped_last = true;
    }
    if used.len() >= 2 && used[0] + 4 <= used[1] {
        used.remove(0);
        dropped_first = true;
    }

    let sigma = if used.len() < 2 {
        0.0
    } else {
        population_sigma(&used)
    };
    Ok(MeterReport {
        raw_counts: raw_counts.to_vec(),
        used_counts: used,
        dropped_first,
        dropped_last,
        sigma,
    })
}

fn population_sigma(counts: &[usize]) -> f64 {
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    var.sqrt()
}

/// Scores one poem: syllable counts per line, trimming, σ.
pub fn meter_report(poem: &Poem, lexicon: &SyllableLexicon) -> Result<MeterReport, MeterError> {
    if poem.lines.is_empty() {
        return Err(MeterError::EmptyPoem);
    }
    let counts: Vec<usize> = poem
        .lines
        .iter()
        .map(|line| count_syllables_line(line, lexicon))
        .collect();
    report_from_counts(&counts)
}

/// Elementwise [`meter_report`] over a batch; per-poem failures become
/// failure entries instead of aborting the batch.
pub fn meter_sigma_batch(
    poems: &[Poem],
    lexicon: &SyllableLexicon,
) -> Vec<Result<MeterReport, MeterError>> {
    poems.iter().map(|p| meter_report(p, lexicon)).collect()
}

//! Composite text-quality scoring: grammaticality minus redundancy and
//! focus penalties, clamped to [0,1].
//!
//! Grammaticality comes from a pluggable [`GrammarScorer`] — either the
//! built-in neutral placeholder (0.5 for everything) or a remote HTTP
//! scorer. The two penalties are deterministic and local. The constants
//! are desk-scale defaults, so composite values are comparable across runs
//! of this toolkit but not against externally published quality scores.

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Poem;

/// Environment variable consulted for a remote scorer endpoint.
pub const SCORER_URL_ENV: &str = "POETBENCH_SCORER_URL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub grammaticality: f64,
    pub redundancy_penalty: f64,
    pub focus_penalty: f64,
    /// clamp(grammaticality − redundancy_penalty − focus_penalty, 0, 1)
    pub composite: f64,
    /// True when the configured scorer failed and the neutral fallback was
    /// used instead.
    pub scorer_fallback: bool,
}

/// Penalty constants. Defaults are fixed and documented here; evaluation
/// configs may override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceConfig {
    /// Penalty per extra occurrence of a repeated word 4-gram.
    pub redundancy_per_extra: f64,
    /// Redundancy penalty cap.
    pub redundancy_cap: f64,
    /// Focus penalty at zero adjacent-line similarity.
    pub focus_cap: f64,
    /// Mean adjacent-line Jaccard similarity at or above which the focus
    /// penalty is zero.
    pub focus_threshold: f64,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        CoherenceConfig {
            redundancy_per_extra: 0.1,
            redundancy_cap: 0.5,
            focus_cap: 0.2,
            focus_threshold: 0.05,
        }
    }
}

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("scorer request failed: {0}")]
    Transport(String),
    #[error("scorer response malformed: {0}")]
    Malformed(String),
}

/// Per-line grammaticality in [0,1]. Implementations must be usable from
/// multiple threads; batch evaluation fans poems out concurrently.
pub trait GrammarScorer: Send + Sync {
    fn score_lines(&self, lines: &[String]) -> Result<Vec<f64>, ScorerError>;
    /// Human-readable identity for logs and reports.
    fn name(&self) -> &str;
}

/// Placeholder scorer: 0.5 for any input.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeutralScorer;

impl GrammarScorer for NeutralScorer {
    fn score_lines(&self, lines: &[String]) -> Result<Vec<f64>, ScorerError> {
        Ok(vec![0.5; lines.len()])
    }

    fn name(&self) -> &str {
        "neutral"
    }
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    lines: &'a [String],
}

#[derive(Deserialize)]
struct ScoreResponse {
    scores: Vec<f64>,
}

/// Remote scorer speaking `POST {"lines": [...]}` → `{"scores": [...]}`.
pub struct RemoteScorer {
    url: String,
    client: reqwest::blocking::Client,
}

impl RemoteScorer {
    pub fn new(url: impl Into<String>) -> RemoteScorer {
        RemoteScorer::with_timeout(url, Duration::from_secs(10))
    }

    pub fn with_timeout(url: impl Into<String>, timeout: Duration) -> RemoteScorer {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("client construction only fails on TLS backend misconfiguration");
        RemoteScorer { url: url.into(), client }
    }

    /// Scorer from `POETBENCH_SCORER_URL`, if set.
    pub fn from_env() -> Option<RemoteScorer> {
        std::env::var(SCORER_URL_ENV).ok().map(RemoteScorer::new)
    }
}

impl GrammarScorer for RemoteScorer {
    fn score_lines(&self, lines: &[String]) -> Result<Vec<f64>, ScorerError> {
        let response = self
            .client
            .post(&self.url)
            .json(&ScoreRequest { lines })
            .send()
            .map_err(|e| ScorerError::Transport(e.to_string()))?;
        if !response.status().is_success() {
            return Err(ScorerError::Transport(format!("status {}", response.status())));
        }
        let body: ScoreResponse = response
            .json()
            .map_err(|e| ScorerError::Malformed(e.to_string()))?;
        if body.scores.len() != lines.len() {
            return Err(ScorerError::Malformed(format!(
                "expected {} scores, got {}",
                lines.len(),
                body.scores.len()
            )));
        }
        if body.scores.iter().any(|s| !s.is_finite() || *s < 0.0 || *s > 1.0) {
            return Err(ScorerError::Malformed("score outside [0,1]".to_string()));
        }
        Ok(body.scores)
    }

    fn name(&self) -> &str {
        "remote"
    }
}

fn folded_tokens(poem: &Poem) -> Vec<String> {
    poem.lines
        .iter()
        .flat_map(|line| line.split_whitespace())
        .map(str::to_lowercase)
        .collect()
}

/// min(cap, per_extra × extra occurrences of repeated word 4-grams), over
/// the case-folded whitespace token stream of the whole poem.
pub fn redundancy_penalty(poem: &Poem, config: &CoherenceConfig) -> f64 {
    let tokens = folded_tokens(poem);
    if tokens.len() < 4 {
        return 0.0;
    }
    let mut seen: HashMap<&[String], usize> = HashMap::new();
    for gram in tokens.windows(4) {
        *seen.entry(gram).or_insert(0) += 1;
    }
    let extras: usize = seen.values().map(|n| n - 1).sum();
    (config.redundancy_per_extra * extras as f64).min(config.redundancy_cap)
}

fn bundled_stopwords() -> &'static HashSet<String> {
    use std::sync::OnceLock;
    static STOPWORDS: OnceLock<HashSet<String>> = OnceLock::new();
    STOPWORDS.get_or_init(|| parse_stopwords(include_str!("../data/stopwords.txt")))
}

pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn content_words(line: &str, stopwords: &HashSet<String>) -> HashSet<String> {
    line.split_whitespace()
        .filter_map(crate::corpus::clean_token)
        .map(str::to_lowercase)
        .filter(|t| !stopwords.contains(t))
        .collect()
}

fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        // equal sets: two all-stopword lines do not signal drift
        return 1.0;
    }
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    intersection as f64 / union as f64
}

/// focus_cap × max(0, threshold − s) / threshold where s is the mean
/// adjacent-line Jaccard similarity of content-word sets. Single-line
/// poems score 0.
pub fn focus_penalty(poem: &Poem, config: &CoherenceConfig) -> f64 {
    if poem.lines.len() < 2 {
        return 0.0;
    }
    let stopwords = bundled_stopwords();
    let sets: Vec<HashSet<String>> = poem
        .lines
        .iter()
        .map(|line| content_words(line, stopwords))
        .collect();
    let mut total = 0.0;
    for pair in sets.windows(2) {
        total += jaccard(&pair[0], &pair[1]);
    }
    let s = total / (sets.len() - 1) as f64;
    // ratio first so the endpoints are exactly 0 and focus_cap
    let shortfall = ((config.focus_threshold - s).max(0.0) / config.focus_threshold).min(1.0);
    config.focus_cap * shortfall
}

/// Mean per-line grammaticality from the scorer. Any scorer failure falls
/// back to the neutral 0.5 and sets the returned flag; evaluation never
/// aborts on scorer trouble.
pub fn grammaticality(poem: &Poem, scorer: &dyn GrammarScorer) -> (f64, bool) {
    match scorer.score_lines(&poem.lines) {
        Ok(scores) if !scores.is_empty() => {
            (scores.iter().sum::<f64>() / scores.len() as f64, false)
        }
        Ok(_) => (0.5, false),
        Err(_) => (0.5, true),
    }
}

pub fn coherence_report(poem: &Poem, scorer: &dyn GrammarScorer) -> CoherenceReport {
    coherence_report_with(poem, scorer, &CoherenceConfig::default())
}

pub fn coherence_report_with(
    poem: &Poem,
    scorer: &dyn GrammarScorer,
    config: &CoherenceConfig,
) -> CoherenceReport {
    let (grammaticality, scorer_fallback) = grammaticality(poem, scorer);
    let redundancy_penalty = redundancy_penalty(poem, config);
    let focus_penalty = focus_penalty(poem, config);
    let composite = (grammaticality - redundancy_penalty - focus_penalty).clamp(0.0, 1.0);
    CoherenceReport {
        grammaticality,
        redundancy_penalty,
        focus_penalty,
        composite,
        scorer_fallback,
    }
}

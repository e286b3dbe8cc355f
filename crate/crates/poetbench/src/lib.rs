//! Poetry generation and evaluation toolkit.
//!
//! `poetbench` covers a small experiment pipeline end to end:
//!
//! - [`corpus`] — load poem collections from text files and report corpus statistics
//! - [`syllable`] — count syllables in words and lines (heuristic + exception lexicon)
//! - [`meter`] — per-poem syllable regularity (population σ with trimming rules)
//! - [`rhyme`] — end-rhyme detection and quatrain scheme classification
//! - [`coherence`] — composite text-quality score with a pluggable grammaticality scorer
//! - [`charlm`] — character-level stacked-LSTM language model: training and sampling
//! - [`genclient`] — collect completions from remote endpoints into JSON-lines records
//! - [`mockserver`] — bundled mock completion/scorer server for tests and examples
//! - [`report`] — aggregate per-poem metrics into per-model summary tables
//! - [`cli`] — the plumbing behind the `poetbench` binary
//!
//! Each capability has a runnable example under `examples/`; start with
//! `cargo run --example corpus_stats`.

pub mod charlm;
pub mod cli;
pub mod coherence;
pub mod corpus;
pub mod genclient;
pub mod meter;
pub mod mockserver;
pub mod report;
pub mod rhyme;
pub mod syllable;

pub use corpus::{CorpusFormat, CorpusStats, Poem};
pub use meter::MeterReport;
pub use syllable::SyllableLexicon;

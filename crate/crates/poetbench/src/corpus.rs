//! Poem collections on disk and their summary statistics.
//!
//! Two file layouts are supported:
//!
//! - [`CorpusFormat::BlankLine`] (format A): poems separated by one or more
//!   blank lines. The least surprising layout for a plain anthology file.
//! - [`CorpusFormat::Records`] (format B): records separated by `===` lines,
//!   each optionally starting with `# title:` and `# source:` headers. Meant
//!   for dumps where each poem should carry its origin.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An ordered list of non-empty text lines, the unit of all evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poem {
    pub title: Option<String>,
    pub lines: Vec<String>,
    pub source: Option<String>,
}

impl Poem {
    /// Builds a poem from raw lines, dropping blank and whitespace-only lines.
    /// Returns `None` when nothing remains.
    pub fn from_lines<I, S>(lines: I) -> Option<Poem>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let lines: Vec<String> = lines
            .into_iter()
            .map(Into::into)
            .filter(|l| !l.trim().is_empty())
            .collect();
        if lines.is_empty() {
            None
        } else {
            Some(Poem { title: None, lines, source: None })
        }
    }

    /// Splits free text on newlines into a poem. `None` when every line is blank.
    pub fn from_text(text: &str) -> Option<Poem> {
        Self::from_lines(text.lines())
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Poem {
        self.source = Some(source.into());
        self
    }
}

/// The five corpus-level counts reported for a poem collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub poem_count: usize,
    pub line_count: usize,
    pub word_count: usize,
    pub unique_word_count: usize,
    pub byte_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// Format A: poems separated by one or more blank lines.
    BlankLine,
    /// Format B: `===`-separated records with optional `# title:` / `# source:` headers.
    Records,
}

impl CorpusFormat {
    pub fn parse(name: &str) -> Option<CorpusFormat> {
        match name.to_ascii_lowercase().as_str() {
            "a" | "blank" => Some(CorpusFormat::BlankLine),
            "b" | "records" | "sep" => Some(CorpusFormat::Records),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus file {0} is not valid UTF-8")]
    Encoding(String),
    #[error("zero poems found (is the format right?)")]
    ZeroPoems,
}

/// Loads a corpus file and splits it into poems per `format`.
///
/// Returns the poems along with the raw byte size of the file, which feeds
/// [`corpus_stats`].
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<(Vec<Poem>, usize), CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CorpusError::Encoding(path.display().to_string()))?;
    let raw_bytes = text.len();
    let poems = parse_corpus(&text, format)?;
    Ok((poems, raw_bytes))
}

/// Splits corpus text into poems. Errors when no poem is found.
pub fn parse_corpus(text: &str, format: CorpusFormat) -> Result<Vec<Poem>, CorpusError> {
    let poems = match format {
        CorpusFormat::BlankLine => parse_blank_line(text),
        CorpusFormat::Records => parse_records(text),
    };
    if poems.is_empty() {
        return Err(CorpusError::ZeroPoems);
    }
    Ok(poems)
}

fn parse_blank_line(text: &str) -> Vec<Poem> {
    let mut poems = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if let Some(poem) = Poem::from_lines(std::mem::take(&mut current)) {
                poems.push(poem);
            }
        } else {
            current.push(line.to_string());
        }
    }
    if let Some(poem) = Poem::from_lines(current) {
        poems.push(poem);
    }
    poems
}

fn parse_records(text: &str) -> Vec<Poem> {
    let mut poems = Vec::new();
    for record in text.split("\n===").map(|r| r.strip_prefix("===").unwrap_or(r)) {
        let mut title = None;
        let mut source = None;
        let mut lines = Vec::new();
        for line in record.lines() {
            if let Some(rest) = line.strip_prefix("# title:") {
                title = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("# source:") {
                source = Some(rest.trim().to_string());
            } else if !line.trim().is_empty() {
                lines.push(line.to_string());
            }
        }
        if let Some(mut poem) = Poem::from_lines(lines) {
            poem.title = title;
            poem.source = source;
            poems.push(poem);
        }
    }
    poems
}

/// Serializes poems back to corpus text in the given format.
///
/// A blank-line corpus drops titles and sources (the format cannot carry
/// them); the record format round-trips both.
pub fn write_corpus(poems: &[Poem], format: CorpusFormat) -> String {
    let mut out = String::new();
    match format {
        CorpusFormat::BlankLine => {
            for (i, poem) in poems.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                for line in &poem.lines {
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        CorpusFormat::Records => {
            for (i, poem) in poems.iter().enumerate() {
                if i > 0 {
                    out.push_str("===\n");
                }
                if let Some(title) = &poem.title {
                    out.push_str("# title: ");
                    out.push_str(title);
                    out.push('\n');
                }
                if let Some(source) = &poem.source {
                    out.push_str("# source: ");
                    out.push_str(source);
                    out.push('\n');
                }
                for line in &poem.lines {
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
    }
    out
}

/// A whitespace token stripped of leading/trailing non-alphanumerics.
/// Returns `None` when nothing alphanumeric remains.
pub fn clean_token(token: &str) -> Option<&str> {
    let cleaned = token.trim_matches(|c: char| !c.is_alphanumeric());
    if cleaned.is_empty() {
        None
    } else {
        Some(cleaned)
    }
}

/// Computes the five reported statistics over a loaded corpus.
///
/// Words are whitespace tokens with edge punctuation stripped; uniqueness is
/// case-insensitive. `raw_bytes` is the size of the concatenated raw input,
/// as returned by [`load_corpus`].
pub fn corpus_stats(poems: &[Poem], raw_bytes: usize) -> CorpusStats {
    let mut word_count = 0;
    let mut line_count = 0;
    let mut unique: HashSet<String> = HashSet::new();
    for poem in poems {
        line_count += poem.lines.len();
        for line in &poem.lines {
            for token in line.split_whitespace() {
                if let Some(word) = clean_token(token) {
                    word_count += 1;
                    unique.insert(word.to_lowercase());
                }
            }
        }
    }
    CorpusStats {
        poem_count: poems.len(),
        line_count,
        word_count,
        unique_word_count: unique.len(),
        byte_count: raw_bytes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blank_line_split_two_poems() {
        let text = "a b\nc d\ne f\ng h\n\ni j\nk l\nm n\no p\n";
        let poems = parse_corpus(text, CorpusFormat::BlankLine).unwrap();
        assert_eq!(poems.len(), 2);
        assert_eq!(poems[0].lines.len(), 4);
        assert_eq!(poems[1].lines.len(), 4);
    }

    #[test]
    fn no_trailing_newline() {
        let poems = parse_corpus("one line\ntwo line", CorpusFormat::BlankLine).unwrap();
        assert_eq!(poems.len(), 1);
        assert_eq!(poems[0].lines, vec!["one line", "two line"]);
    }

    #[test]
    fn empty_file_is_zero_poems() {
        assert!(matches!(
            parse_corpus("", CorpusFormat::BlankLine),
            Err(CorpusError::ZeroPoems)
        ));
        assert!(matches!(
            parse_corpus("\n  \n\n", CorpusFormat::BlankLine),
            Err(CorpusError::ZeroPoems)
        ));
    }

    #[test]
    fn non_blank_lines_conserved() {
        let text = "a\nb\n\n\nc\n\nd\ne\n";
        let poems = parse_corpus(text, CorpusFormat::BlankLine).unwrap();
        let loaded: usize = poems.iter().map(|p| p.lines.len()).sum();
        let in_file = text.lines().filter(|l| !l.trim().is_empty()).count();
        assert_eq!(loaded, in_file);
    }

    #[test]
    fn records_format_headers() {
        let text = "# title: First\n# source: model-a\nline one\nline two\n===\nline three\n";
        let poems = parse_corpus(text, CorpusFormat::Records).unwrap();
        assert_eq!(poems.len(), 2);
        assert_eq!(poems[0].title.as_deref(), Some("First"));
        assert_eq!(poems[0].source.as_deref(), Some("model-a"));
        assert_eq!(poems[0].lines, vec!["line one", "line two"]);
        assert_eq!(poems[1].title, None);
        assert_eq!(poems[1].lines, vec!["line three"]);
    }

    #[test]
    fn round_trip_both_formats() {
        let text = "# title: T\n# source: s\nalpha\nbeta\n===\ngamma\ndelta\n";
        let poems = parse_corpus(text, CorpusFormat::Records).unwrap();
        let rewritten = write_corpus(&poems, CorpusFormat::Records);
        let reloaded = parse_corpus(&rewritten, CorpusFormat::Records).unwrap();
        assert_eq!(poems, reloaded);

        let blank = "alpha\nbeta\n\ngamma\n";
        let poems = parse_corpus(blank, CorpusFormat::BlankLine).unwrap();
        let rewritten = write_corpus(&poems, CorpusFormat::BlankLine);
        let reloaded = parse_corpus(&rewritten, CorpusFormat::BlankLine).unwrap();
        assert_eq!(poems, reloaded);
    }

    #[test]
    fn stats_hand_counted() {
        let poem = Poem::from_lines(["the cat", "the hat"]).unwrap();
        let stats = corpus_stats(&[poem], 16);
        assert_eq!(stats.word_count, 4);
        assert_eq!(stats.unique_word_count, 3);
        assert_eq!(stats.line_count, 2);
        assert_eq!(stats.byte_count, 16);
    }

    #[test]
    fn stats_empty_is_zero() {
        let stats = corpus_stats(&[], 0);
        assert_eq!(stats.poem_count, 0);
        assert_eq!(stats.word_count, 0);
        assert_eq!(stats.unique_word_count, 0);
    }

    #[test]
    fn uniqueness_is_case_insensitive() {
        let poem = Poem::from_lines(["Cat cat CAT"]).unwrap();
        let stats = corpus_stats(&[poem], 11);
        assert_eq!(stats.unique_word_count, 1);
        assert_eq!(stats.word_count, 3);
    }

    #[test]
    fn duplicated_corpus_keeps_unique_count() {
        let poems = vec![
            Poem::from_lines(["west wind wild"]).unwrap(),
            Poem::from_lines(["ode to the west wind"]).unwrap(),
        ];
        let once = corpus_stats(&poems, 0).unique_word_count;
        let mut doubled = poems.clone();
        doubled.extend(poems);
        assert_eq!(corpus_stats(&doubled, 0).unique_word_count, once);
    }

    #[test]
    fn stats_permutation_invariant() {
        let poems = vec![
            Poem::from_lines(["a b c"]).unwrap(),
            Poem::from_lines(["d e"]).unwrap(),
            Poem::from_lines(["f"]).unwrap(),
        ];
        let forward = corpus_stats(&poems, 9);
        let mut reversed = poems;
        reversed.reverse();
        assert_eq!(corpus_stats(&reversed, 9), forward);
    }

    #[test]
    fn edge_punctuation_stripped() {
        let poem = Poem::from_lines(["\"Stop!\" -- she said."]).unwrap();
        let stats = corpus_stats(&[poem], 0);
        // "--" carries no alphanumerics and is not a word.
        assert_eq!(stats.word_count, 3);
    }
}

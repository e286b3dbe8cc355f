//! End-rhyme detection and quatrain scheme classification.
//!
//! Default rhyme keys are grapheme suffixes: the case-folded tail of a word
//! from its last vowel group onward, run through a small normalization table
//! ("igh" → "i", final "y" → "i", terminal silent e stripped after a
//! consonant coda). A pronouncing lexicon file (`word<TAB>rime-key`) can
//! replace keys with phonetic rimes when supplied. Identical words count as
//! rhyming; purists disagree, but it keeps the partition consistent.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Poem;

/// The quatrain schemes named for early English Romanticism, plus a bucket
/// for everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Aabb,
    Abab,
    Abba,
    Irregular,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scheme::Aabb => "AABB",
            Scheme::Abab => "ABAB",
            Scheme::Abba => "ABBA",
            Scheme::Irregular => "irregular",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhymeReport {
    /// One scheme per consecutive 4-line window, stepped by 4.
    pub quatrain_schemes: Vec<Scheme>,
    /// All line-index pairs (i < j) whose ending keys match.
    pub rhyme_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RhymeError {
    #[error("no alphabetic content in {0:?}")]
    NotAWord(String),
}

/// Optional pronouncing lexicon mapping case-folded words to phonetic rimes.
#[derive(Debug, Clone, Default)]
pub struct RhymeLexicon {
    entries: HashMap<String, String>,
}

impl RhymeLexicon {
    pub fn parse(text: &str) -> RhymeLexicon {
        let mut entries = HashMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((word, key)) = line.split_once('\t') {
                entries.insert(word.trim().to_lowercase(), key.trim().to_string());
            }
        }
        RhymeLexicon { entries }
    }

    pub fn load(path: &Path) -> std::io::Result<RhymeLexicon> {
        Ok(RhymeLexicon::parse(&fs::read_to_string(path)?))
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.entries.get(&word.to_lowercase()).map(String::as_str)
    }
}

fn is_vowel(c: char, word_initial: bool) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u') || (c == 'y' && !word_initial)
}

/// Grapheme rhyme key: case-folded suffix from the last vowel group to the
/// word end, normalized so equivalent spellings collapse.
pub fn rhyme_key(word: &str) -> Result<String, RhymeError> {
    let letters: Vec<char> = word
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphabetic())
        .collect();
    if letters.is_empty() {
        return Err(RhymeError::NotAWord(word.to_string()));
    }

    // Terminal silent e after a consonant coda drops before the suffix is
    // taken, so "stone"/"tone" key on "on" rather than a bare "e".
    let mut word_part = &letters[..];
    let n = word_part.len();
    if n >= 2 && word_part[n - 1] == 'e' && !is_vowel(word_part[n - 2], n == 2) {
        let trimmed = &word_part[..n - 1];
        if trimmed.iter().enumerate().any(|(i, &c)| is_vowel(c, i == 0)) {
            word_part = trimmed;
        }
    }

    // last maximal vowel group
    let mut start = None;
    let mut in_group = false;
    for (i, &c) in word_part.iter().enumerate() {
        let v = is_vowel(c, i == 0);
        if v && !in_group {
            start = Some(i);
        }
        in_group = v;
    }
    let suffix: String = match start {
        Some(s) => word_part[s..].iter().collect(),
        // vowel-less words ("hmm") key on themselves
        None => word_part.iter().collect(),
    };

    let mut key = suffix.replace("igh", "i");
    if key.ends_with('y') {
        key.pop();
        key.push('i');
    }
    Ok(key)
}

/// Classifies four line endings against the named schemes, in the fixed
/// priority AABB > ABAB > ABBA. An all-rhyming quatrain is AABB.
pub fn classify_quatrain(endings: &[&str; 4]) -> Scheme {
    let keys: Vec<Option<String>> = endings.iter().map(|w| rhyme_key(w).ok()).collect();
    classify_keys(&keys)
}

fn classify_keys(keys: &[Option<String>]) -> Scheme {
    debug_assert_eq!(keys.len(), 4);
    let eq = |a: usize, b: usize| match (&keys[a], &keys[b]) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    };
    if eq(0, 1) && eq(2, 3) {
        Scheme::Aabb
    } else if eq(0, 2) && eq(1, 3) {
        Scheme::Abab
    } else if eq(0, 3) && eq(1, 2) {
        Scheme::Abba
    } else {
        Scheme::Irregular
    }
}

/// The last token of a line that carries alphabetic content, with trailing
/// punctuation still attached (the key function strips it).
fn ending_token(line: &str) -> Option<&str> {
    line.split_whitespace()
        .rev()
        .find(|t| t.chars().any(|c| c.is_alphabetic()))
}

fn ending_key(line: &str, lexicon: Option<&RhymeLexicon>) -> Option<String> {
    let token = ending_token(line)?;
    if let Some(lexicon) = lexicon {
        let folded: String = token
            .to_lowercase()
            .chars()
            .filter(|c| c.is_alphabetic() || *c == '\'')
            .collect();
        if let Some(key) = lexicon.get(folded.trim_matches('\'')) {
            return Some(format!("lex:{key}"));
        }
    }
    rhyme_key(token).ok()
}

/// Scheme labels for every 4-line window plus all rhyming line pairs.
pub fn rhyme_report(poem: &Poem) -> RhymeReport {
    rhyme_report_with(poem, None)
}

/// [`rhyme_report`] with an optional pronouncing lexicon upgrading the keys.
pub fn rhyme_report_with(poem: &Poem, lexicon: Option<&RhymeLexicon>) -> RhymeReport {
    let keys: Vec<Option<String>> = poem
        .lines
        .iter()
        .map(|line| ending_key(line, lexicon))
        .collect();

    let mut rhyme_pairs = Vec::new();
    for i in 0..keys.len() {
        for j in (i + 1)..keys.len() {
            if let (Some(a), Some(b)) = (&keys[i], &keys[j]) {
                if a == b {
                    rhyme_pairs.push((i, j));
                }
            }
        }
    }

    let quatrain_schemes = keys
        .chunks_exact(4)
        .map(classify_keys)
        .collect();

    RhymeReport { quatrain_schemes, rhyme_pairs }
}

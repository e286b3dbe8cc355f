//! Classify rhyme schemes: ending keys, rhyming line pairs, and the
//! per-quatrain AABB / ABAB / ABBA verdicts.
//!
//! ```sh
//! cargo run --example detect_rhyme
//! cargo run --example detect_rhyme -- path/to/poem.txt
//! ```

use std::path::PathBuf;

use anyhow::{Context, Result};
use poetbench::rhyme::{rhyme_key, rhyme_report_with, RhymeLexicon};
use poetbench::Poem;

fn main() -> Result<()> {
    let poem = match std::env::args().nth(1).map(PathBuf::from) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            Poem::from_text(&text).context("poem file has no non-blank lines")?
        }
        None => Poem::from_text(concat!(
            "The sun was bright above the day,\n",
            "The gulls were wheeling on their way,\n",
            "And every wave that crossed the sand\n",
            "Threw silver pebbles on the land.\n",
            "I heard a song at fall of night,\n",
            "A lantern swinging in the dew,\n",
            "The singer kept the flame alight,\n",
            "And when it passed, the song I knew.",
        ))
        .expect("builtin poem is non-empty"),
    };

    // A lexicon entry rescues spellings the grapheme key cannot unify
    // (cough/off rhyme in sound, not in letters).
    let lexicon = RhymeLexicon::parse("cough\tof\noff\tof\n");
    let report = rhyme_report_with(&poem, Some(&lexicon));

    println!("line endings and rhyme keys:");
    for line in &poem.lines {
        let ending = line
            .split_whitespace()
            .rev()
            .find_map(|w| rhyme_key(w).ok().map(|k| (w, k)));
        match ending {
            Some((word, key)) => println!("  {word:<14} -> {key}"),
            None => println!("  (no rhymable ending)"),
        }
    }

    println!("\nrhyming line pairs (0-based): {:?}", report.rhyme_pairs);
    for (i, scheme) in report.quatrain_schemes.iter().enumerate() {
        println!("lines {:>2}-{:>2}: {scheme}", i * 4 + 1, i * 4 + 4);
    }
    Ok(())
}

//! Load the bundled anthology and print its corpus statistics.
//!
//! ```sh
//! cargo run --example corpus_stats
//! cargo run --example corpus_stats -- path/to/corpus.txt records
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use poetbench::corpus::{corpus_stats, load_corpus};
use poetbench::CorpusFormat;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/anthology.txt"));
    let format = match args.next() {
        Some(name) => CorpusFormat::parse(&name)
            .with_context(|| format!("unknown corpus format {name:?} (try 'blank' or 'records')"))?,
        None => CorpusFormat::Records,
    };

    let (poems, raw_bytes) =
        load_corpus(&path, format).with_context(|| format!("loading {}", path.display()))?;
    let stats = corpus_stats(&poems, raw_bytes);

    println!("corpus: {}", path.display());
    println!("poems:        {}", stats.poem_count);
    println!("lines:        {}", stats.line_count);
    println!("words:        {}", stats.word_count);
    println!("unique words: {}", stats.unique_word_count);
    println!("bytes:        {}", stats.byte_count);

    let longest = poems
        .iter()
        .max_by_key(|p| p.lines.len())
        .expect("load_corpus guarantees at least one poem");
    println!(
        "longest poem: {} ({} lines)",
        longest.title.as_deref().unwrap_or("untitled"),
        longest.lines.len()
    );
    Ok(())
}

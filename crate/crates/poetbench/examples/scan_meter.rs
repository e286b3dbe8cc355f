//! Score a poem's metrical regularity: per-line syllable counts, the
//! leading/trailing trim rule, and the population standard deviation.
//!
//! ```sh
//! cargo run --example scan_meter
//! cargo run --example scan_meter -- path/to/poem.txt
//! ```

use std::path::PathBuf;

use anyhow::{Context, Result};
use poetbench::meter::meter_report;
use poetbench::{Poem, SyllableLexicon};

fn main() -> Result<()> {
    let poem = match std::env::args().nth(1).map(PathBuf::from) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            Poem::from_text(&text).context("poem file has no non-blank lines")?
        }
        None => Poem::from_text(
            "Roses are red,\nViolets are blue,\nI love you,\nAnd I always will too.",
        )
        .expect("builtin poem is non-empty"),
    };

    let lexicon = SyllableLexicon::bundled();
    let report = meter_report(&poem, &lexicon)?;

    for (line, count) in poem.lines.iter().zip(&report.raw_counts) {
        println!("{count:>3}  {line}");
    }
    println!();
    if report.dropped_first {
        println!("dropped the short leading line (title-like)");
    }
    if report.dropped_last {
        println!("dropped the short trailing line (fragment)");
    }
    println!("lines used: {}", report.used_counts.len());
    println!("syllable sigma: {:.4}", report.sigma);
    Ok(())
}

//! Train a small character language model on the bundled anthology and
//! save a checkpoint. Training is deterministic for a fixed seed.
//!
//! ```sh
//! cargo run --release --example train_charlm
//! cargo run --release --example train_charlm -- 800   # more steps
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use poetbench::charlm::{train, TrainConfig};
use poetbench::corpus::{load_corpus, write_corpus};
use poetbench::CorpusFormat;

fn main() -> Result<()> {
    let steps: usize = match std::env::args().nth(1) {
        Some(raw) => raw.parse().context("steps must be a number")?,
        None => 300,
    };

    let anthology = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/anthology.txt");
    let (poems, _) = load_corpus(&anthology, CorpusFormat::Records)?;
    // Re-render without headers/separators so the model sees verse only.
    let text = write_corpus(&poems, CorpusFormat::BlankLine);
    println!("training on {} chars from {} poems", text.chars().count(), poems.len());

    let config = TrainConfig {
        steps,
        hidden_size: 64,
        layer_count: 2,
        chunk_length: 96,
        batch_size: 16,
        seed: 7,
        ..TrainConfig::default()
    };
    let (model, losses) = train(&text, &config)?;

    let first = losses.first().copied().unwrap_or(f64::NAN);
    let last = losses.last().copied().unwrap_or(f64::NAN);
    println!("loss: {first:.4} -> {last:.4} over {} steps", losses.len());

    let out = std::env::temp_dir().join("poetbench-example-checkpoint.json");
    model.save(&out)?;
    println!("checkpoint written to {}", out.display());
    println!("sample from it with: cargo run --release --example sample_charlm");
    Ok(())
}

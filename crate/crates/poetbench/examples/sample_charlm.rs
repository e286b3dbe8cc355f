//! Sample from a saved character-model checkpoint at several temperatures.
//! Runs `train_charlm`'s output if present, else trains a tiny model first.
//!
//! ```sh
//! cargo run --release --example sample_charlm
//! cargo run --release --example sample_charlm -- "Shall I " 0.8
//! ```

use anyhow::{Context, Result};
use poetbench::charlm::{train, CharLm, GenParams, TrainConfig};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let prompt = args.next().unwrap_or_else(|| "The ".to_string());
    let temperature: f64 = match args.next() {
        Some(raw) => raw.parse().context("temperature must be a number")?,
        None => 0.7,
    };

    let checkpoint = std::env::temp_dir().join("poetbench-example-checkpoint.json");
    let model = if checkpoint.is_file() {
        println!("loading {}", checkpoint.display());
        CharLm::load(&checkpoint)?
    } else {
        println!("no checkpoint found; training a throwaway model on repeated verse");
        let text = "Tyger Tyger, burning bright,\nIn the forests of the night;\n".repeat(160);
        let config = TrainConfig {
            steps: 200,
            hidden_size: 48,
            layer_count: 2,
            chunk_length: 64,
            batch_size: 8,
            seed: 11,
            ..TrainConfig::default()
        };
        train(&text, &config)?.0
    };

    // Temperatures below 1e-6 degenerate to argmax (zero itself is invalid).
    for (label, temp) in [("cold (argmax)", 1e-9), ("chosen", temperature), ("hot", 1.3)] {
        let params = GenParams {
            temperature: temp,
            max_chars: 240,
            prompt: prompt.clone(),
        };
        let text = model.sample(&params, 42)?;
        println!("\n--- {label} (T = {temp}) ---");
        println!("{text}");
    }
    Ok(())
}

//! Evaluate generation records end to end: per-record meter, rhyme, and
//! coherence rows, then the per-model summary table. Uses an in-process
//! mock for both the completion endpoint and the grammar scorer.
//!
//! ```sh
//! cargo run --example evaluate_records
//! ```

use anyhow::Result;
use poetbench::coherence::RemoteScorer;
use poetbench::genclient::{run_batch, BatchOptions, EndpointConfig, GenerationRequest, PromptMode};
use poetbench::mockserver::{CompletionBehavior, MockConfig, MockServer};
use poetbench::report::{evaluate_records_file, render_summary_table, summarize, summary_to_json};
use poetbench::SyllableLexicon;

fn main() -> Result<()> {
    // Two "models": a regular-verse endpoint and a ragged free-verse one.
    let regular = MockServer::start(MockConfig {
        completion: CompletionBehavior::Canned(vec![concat!(
            "The morning sun was climbing high,\n",
            "It painted gold across the sky,\n",
            "The sleepy town began to wake,\n",
            "And ripples crossed the silver lake.",
        )
        .to_string()]),
        scorer_score: 0.9,
        ..MockConfig::default()
    })?;
    let ragged = MockServer::start(MockConfig {
        completion: CompletionBehavior::Canned(vec![concat!(
            "sun\n",
            "the improbable cartography of an ordinary tuesday morning\n",
            "wet stones\n",
            "nobody remembered to wind the municipal clocks again today",
        )
        .to_string()]),
        ..MockConfig::default()
    })?;

    let records = std::env::temp_dir().join("poetbench-example-eval.jsonl");
    let _ = std::fs::remove_file(&records);
    for (label, server) in [("regular-verse", &regular), ("free-verse", &ragged)] {
        let requests: Vec<GenerationRequest> = (0..4)
            .map(|i| GenerationRequest {
                id: format!("{label}-{i}"),
                prompt: "Write a poem.".to_string(),
                mode: PromptMode::Instruction,
                temperature: 0.7,
                max_words: 60,
                max_chars: 300,
                model_label: label.to_string(),
            })
            .collect();
        let endpoint = EndpointConfig::new(label, server.completion_url());
        run_batch(&requests, &endpoint, &records, &BatchOptions::default())?;
    }

    let lexicon = SyllableLexicon::bundled();
    let scorer = RemoteScorer::new(regular.scorer_url());
    let rows = evaluate_records_file(&records, &lexicon, None, &scorer)?;

    println!("per-record rows:");
    for row in &rows {
        println!(
            "  {:<16} sigma={:>6} coherence={:>6} schemes={:?}{}",
            row.record_id,
            row.meter_sigma.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
            row.coherence_composite.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
            row.rhyme_schemes,
            if row.warnings.is_empty() { String::new() } else { format!("  warnings={:?}", row.warnings) },
        );
    }

    let summary = summarize(&rows)?;
    println!("\n{}", render_summary_table(&summary));
    println!("as JSON:\n{}", summary_to_json(&summary));
    Ok(())
}

//! Collect completions from a remote endpoint: batch dispatch with an
//! in-flight cap, retries with backoff, crash-safe JSONL appends, and
//! resume. Runs entirely against an in-process mock server.
//!
//! ```sh
//! cargo run --example generate_remote
//! ```

use std::time::Duration;

use anyhow::Result;
use poetbench::genclient::{
    completed_ids, read_records, run_batch, BatchOptions, EndpointConfig, GenerationRequest,
    PromptMode, RetryPolicy,
};
use poetbench::mockserver::{CompletionBehavior, MockConfig, MockServer};

fn main() -> Result<()> {
    // Flaky endpoint: echoes the prompt, fails every 5th request outright.
    let server = MockServer::start(MockConfig {
        completion: CompletionBehavior::Echo { suffix: "the stars looked down to listen.".to_string() },
        fail_every: Some(5),
        ..MockConfig::default()
    })?;
    let endpoint = EndpointConfig::new("mock", server.completion_url());

    let requests: Vec<GenerationRequest> = (0..8)
        .map(|i| GenerationRequest {
            id: format!("poem-{i:03}"),
            prompt: "Roses are red, ".to_string(),
            mode: PromptMode::Prefix,
            temperature: 0.8,
            max_words: 40,
            max_chars: 200,
            model_label: "mock-endpoint".to_string(),
        })
        .collect();

    let out = std::env::temp_dir().join("poetbench-example-records.jsonl");
    let _ = std::fs::remove_file(&out);

    let options = BatchOptions {
        policy: RetryPolicy {
            max_retries: 2,
            base_delay: Duration::from_millis(20),
            ..RetryPolicy::default()
        },
        in_flight_cap: 3,
        ..BatchOptions::default()
    };
    let outcome = run_batch(&requests, &endpoint, &out, &options)?;
    println!(
        "first pass: {} succeeded, {} failed, {} skipped",
        outcome.successes, outcome.failures, outcome.skipped
    );

    // Resume: completed ids are skipped, failures are retried and appended.
    let options = BatchOptions { skip_ids: completed_ids(&out)?, ..options };
    let outcome = run_batch(&requests, &endpoint, &out, &options)?;
    println!(
        "resume pass: {} succeeded, {} failed, {} skipped",
        outcome.successes, outcome.failures, outcome.skipped
    );

    let records = read_records(&out)?;
    println!("\n{} records in {}:", records.len(), out.display());
    for record in records.iter().take(3) {
        println!(
            "  {} success={} retries={} text={:?}",
            record.request.id,
            record.success,
            record.retry_count,
            record.output_text.as_deref().unwrap_or("-"),
        );
    }
    println!("  ...");
    println!("peak concurrent requests at the server: {}", server.max_in_flight());
    Ok(())
}

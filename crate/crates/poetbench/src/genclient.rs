//! Completion-endpoint client: sends prompts, persists results as
//! JSON-lines records, and bridges the local character model into the same
//! record format.
//!
//! The wire protocol is one neutral completion call — HTTP POST
//! `{"prompt","max_tokens","temperature"}` → `{"text"}` — plus an adapter
//! per endpoint style. Prompts travel byte-exact: nothing here trims,
//! case-changes, or re-spaces them, and prefix-mode outputs always begin
//! with the prompt (echoed by the endpoint or prepended by the client;
//! the record says which). Every request produces exactly one persisted
//! record, success or failure, flushed as soon as it is written.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::charlm::{CharLm, GenParams};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GenClientError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("record file line {line}: {message}")]
    BadRecord { line: usize, message: String },
    #[error("endpoint config: {0}")]
    Config(String),
    #[error("instruction prompts are unsupported by the local model")]
    InstructionUnsupported,
    #[error("local model: {0}")]
    CharLm(#[from] crate::charlm::CharLmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptMode {
    /// The prompt is the opening of the poem; output continues it.
    Prefix,
    /// The prompt is an instruction ("Write a poem …"); output stands alone.
    Instruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    /// Stable identity for joins and resume; never empty after loading.
    #[serde(default)]
    pub id: String,
    pub prompt: String,
    pub mode: PromptMode,
    pub temperature: f64,
    #[serde(default = "default_max_words")]
    pub max_words: usize,
    #[serde(default = "default_max_chars")]
    pub max_chars: usize,
    pub model_label: String,
}

fn default_max_words() -> usize {
    75
}

fn default_max_chars() -> usize {
    300
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub schema_version: u32,
    pub request: GenerationRequest,
    pub success: bool,
    /// Non-empty whenever `success`; None on failure.
    pub output_text: Option<String>,
    pub error: Option<String>,
    pub endpoint: String,
    /// True when the endpoint echoed the prompt itself (prefix mode).
    pub echoed_prompt: bool,
    pub retry_count: u32,
    pub timestamp_unix: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdapterStyle {
    /// `{"prompt","max_tokens","temperature"}` → `{"text"}`
    Neutral,
    /// Same request plus bearer auth → `{"choices":[{"text": …}]}`
    Openai,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    Chars,
    Words,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointConfig {
    pub name: String,
    /// Full completion URL.
    pub base_url: String,
    pub adapter: AdapterStyle,
    pub length_unit: LengthUnit,
    /// Name of the environment variable holding the API key, if any.
    pub auth_env: Option<String>,
}

impl EndpointConfig {
    /// Neutral-adapter endpoint with char-unit lengths and no auth — the
    /// common case for local and mock servers.
    pub fn new(name: impl Into<String>, base_url: impl Into<String>) -> EndpointConfig {
        EndpointConfig {
            name: name.into(),
            base_url: base_url.into(),
            adapter: AdapterStyle::Neutral,
            length_unit: LengthUnit::Chars,
            auth_env: None,
        }
    }

    /// Parses the `key=value` endpoint file (# comments allowed):
    /// `name=`, `base_url=`, `adapter=neutral|openai`,
    /// `length_unit=chars|words`, optional `auth_env=`.
    pub fn parse(text: &str) -> Result<EndpointConfig, GenClientError> {
        let mut fields = HashMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GenClientError::Config(format!("expected key=value, got {line:?}")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let take = |key: &str| {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| GenClientError::Config(format!("missing key {key:?}")))
        };
        let adapter = match take("adapter")?.as_str() {
            "neutral" => AdapterStyle::Neutral,
            "openai" => AdapterStyle::Openai,
            other => {
                return Err(GenClientError::Config(format!("unknown adapter {other:?}")))
            }
        };
        let length_unit = match take("length_unit")?.as_str() {
            "chars" => LengthUnit::Chars,
            "words" => LengthUnit::Words,
            other => {
                return Err(GenClientError::Config(format!("unknown length_unit {other:?}")))
            }
        };
        Ok(EndpointConfig {
            name: take("name")?,
            base_url: take("base_url")?,
            adapter,
            length_unit,
            auth_env: fields.get("auth_env").cloned(),
        })
    }

    pub fn load(path: &Path) -> Result<EndpointConfig, GenClientError> {
        EndpointConfig::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub timeout: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay: Duration::from_millis(250),
            timeout: Duration::from_secs(30),
        }
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Truncates `text` after its `max_words`th whitespace token; text with
/// fewer tokens passes through untouched.
fn truncate_words(text: &str, max_words: usize) -> String {
    let mut count = 0;
    let mut in_word = false;
    for (offset, c) in text.char_indices() {
        if c.is_whitespace() {
            in_word = false;
        } else if !in_word {
            in_word = true;
            count += 1;
            if count > max_words {
                return text[..offset].trim_end().to_string();
            }
        }
    }
    text.to_string()
}

fn attempt_request(
    client: &reqwest::blocking::Client,
    request: &GenerationRequest,
    endpoint: &EndpointConfig,
) -> Result<String, String> {
    let max_tokens = match endpoint.length_unit {
        LengthUnit::Chars => request.max_chars,
        LengthUnit::Words => request.max_words,
    };
    let body = json!({
        "prompt": request.prompt,
        "max_tokens": max_tokens,
        "temperature": request.temperature,
    });
    let mut builder = client.post(&endpoint.base_url).json(&body);
    if let Some(env_name) = &endpoint.auth_env {
        if let Ok(key) = std::env::var(env_name) {
            builder = builder.bearer_auth(key);
        }
    }
    let response = builder.send().map_err(|e| e.to_string())?;
    if !response.status().is_success() {
        return Err(format!("status {}", response.status()));
    }
    let value: serde_json::Value = response.json().map_err(|e| e.to_string())?;
    let text = match endpoint.adapter {
        AdapterStyle::Neutral => value.get("text").and_then(|v| v.as_str()),
        AdapterStyle::Openai => value
            .pointer("/choices/0/text")
            .and_then(|v| v.as_str()),
    };
    text.map(str::to_string)
        .ok_or_else(|| "response missing completion text".to_string())
}

/// One request against a remote endpoint: bounded retries with exponential
/// backoff, then a success or failure record. Never errors — failures are
/// data.
pub fn generate(
    request: &GenerationRequest,
    endpoint: &EndpointConfig,
    policy: &RetryPolicy,
) -> GenerationRecord {
    let client = reqwest::blocking::Client::builder()
        .timeout(policy.timeout)
        .build()
        .expect("client construction only fails on TLS backend misconfiguration");

    let mut retry_count = 0;
    let last_error = loop {
        match attempt_request(&client, request, endpoint) {
            Ok(raw_text) => {
                return finish_record(request, endpoint, raw_text, retry_count);
            }
            Err(message) => {
                if retry_count >= policy.max_retries {
                    break message;
                }
                let backoff = policy.base_delay * 2u32.pow(retry_count);
                std::thread::sleep(backoff);
                retry_count += 1;
            }
        }
    };
    GenerationRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        request: request.clone(),
        success: false,
        output_text: None,
        error: Some(last_error),
        endpoint: endpoint.name.clone(),
        echoed_prompt: false,
        retry_count,
        timestamp_unix: now_unix(),
    }
}

/// Assembles the success record: prefix-mode outputs begin with the prompt
/// (prepended when the endpoint did not echo it), and word-unit endpoints
/// get the word cap applied client-side to the continuation.
fn finish_record(
    request: &GenerationRequest,
    endpoint: &EndpointConfig,
    raw_text: String,
    retry_count: u32,
) -> GenerationRecord {
    let (echoed, output_text) = match request.mode {
        PromptMode::Instruction => (false, raw_text),
        PromptMode::Prefix => {
            let (echoed, continuation) = match raw_text.strip_prefix(request.prompt.as_str()) {
                Some(rest) => (true, rest.to_string()),
                None => (false, raw_text),
            };
            let continuation = if endpoint.length_unit == LengthUnit::Words {
                truncate_words(&continuation, request.max_words)
            } else {
                continuation
            };
            (echoed, format!("{}{}", request.prompt, continuation))
        }
    };
    GenerationRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        request: request.clone(),
        success: true,
        output_text: Some(output_text),
        error: None,
        endpoint: endpoint.name.clone(),
        echoed_prompt: echoed,
        retry_count,
        timestamp_unix: now_unix(),
    }
}

/// Samples the local character model into the standard record format.
/// Prefix mode only.
pub fn local_generate(
    request: &GenerationRequest,
    model: &CharLm,
    seed: u64,
) -> Result<GenerationRecord, GenClientError> {
    if request.mode == PromptMode::Instruction {
        return Err(GenClientError::InstructionUnsupported);
    }
    let gen = GenParams {
        temperature: request.temperature,
        max_chars: request.max_chars,
        prompt: request.prompt.clone(),
    };
    let output = model.sample(&gen, seed)?;
    Ok(GenerationRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        request: request.clone(),
        success: true,
        output_text: Some(output),
        error: None,
        endpoint: "local-charlm".to_string(),
        echoed_prompt: true,
        retry_count: 0,
        timestamp_unix: now_unix(),
    })
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub policy: RetryPolicy,
    /// Maximum simultaneous requests.
    pub in_flight_cap: usize,
    /// Request ids to skip (already completed in an earlier run).
    pub skip_ids: HashSet<String>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            policy: RetryPolicy::default(),
            in_flight_cap: 4,
            skip_ids: HashSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchOutcome {
    pub successes: usize,
    pub failures: usize,
    pub skipped: usize,
}

/// Runs all requests against the endpoint with at most `in_flight_cap` in
/// flight, appending each record to the JSON-lines file the moment it
/// finishes (one flushed write per record, so an interrupted run leaves a
/// valid file of exactly the completed records). Write order may differ
/// from request order; records carry request ids for joining.
pub fn run_batch(
    requests: &[GenerationRequest],
    endpoint: &EndpointConfig,
    out_path: &Path,
    options: &BatchOptions,
) -> Result<BatchOutcome, GenClientError> {
    let file = OpenOptions::new().create(true).append(true).open(out_path)?;
    let writer = Mutex::new(file);
    let successes = AtomicUsize::new(0);
    let skipped = requests
        .iter()
        .filter(|r| options.skip_ids.contains(&r.id))
        .count();
    let pending: Vec<&GenerationRequest> = requests
        .iter()
        .filter(|r| !options.skip_ids.contains(&r.id))
        .collect();
    let next = AtomicUsize::new(0);
    let write_error: Mutex<Option<std::io::Error>> = Mutex::new(None);

    let workers = options.in_flight_cap.max(1).min(pending.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                let Some(request) = pending.get(index) else { break };
                let record = generate(request, endpoint, &options.policy);
                if record.success {
                    successes.fetch_add(1, Ordering::SeqCst);
                }
                let line = serde_json::to_string(&record)
                    .expect("records serialize");
                let mut guard = writer.lock().expect("writer lock");
                let result = guard
                    .write_all(line.as_bytes())
                    .and_then(|_| guard.write_all(b"\n"))
                    .and_then(|_| guard.flush());
                if let Err(error) = result {
                    *write_error.lock().expect("error lock") = Some(error);
                    break;
                }
            });
        }
    });

    if let Some(error) = write_error.into_inner().expect("error lock") {
        return Err(GenClientError::Io(error));
    }
    let successes = successes.into_inner();
    Ok(BatchOutcome {
        successes,
        failures: pending.len() - successes,
        skipped,
    })
}

/// Strict JSON-lines read: every non-empty line must parse as a record.
pub fn read_records(path: &Path) -> Result<Vec<GenerationRecord>, GenClientError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: GenerationRecord =
            serde_json::from_str(&line).map_err(|e| GenClientError::BadRecord {
                line: idx + 1,
                message: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

/// Ids of requests that already have a successful record on disk; a
/// missing file means nothing is completed yet.
pub fn completed_ids(path: &Path) -> Result<HashSet<String>, GenClientError> {
    if !path.exists() {
        return Ok(HashSet::new());
    }
    Ok(read_records(path)?
        .into_iter()
        .filter(|r| r.success)
        .map(|r| r.request.id)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mockserver::{CompletionBehavior, MockConfig, MockServer};

    fn endpoint_for(server: &MockServer) -> EndpointConfig {
        EndpointConfig {
            name: "mock".to_string(),
            base_url: server.completion_url(),
            adapter: AdapterStyle::Neutral,
            length_unit: LengthUnit::Chars,
            auth_env: None,
        }
    }

    fn request(prompt: &str) -> GenerationRequest {
        GenerationRequest {
            id: "r1".to_string(),
            prompt: prompt.to_string(),
            mode: PromptMode::Prefix,
            temperature: 0.7,
            max_words: 75,
            max_chars: 300,
            model_label: "mock-model".to_string(),
        }
    }

    fn fast_policy() -> RetryPolicy {
        RetryPolicy {
            max_retries: 3,
            base_delay: Duration::from_millis(5),
            timeout: Duration::from_secs(5),
        }
    }

    #[test]
    fn echoing_endpoint_output_starts_with_prompt() {
        let server = MockServer::start(MockConfig::default()).unwrap();
        let record = generate(&request("Roses are red, "), &endpoint_for(&server), &fast_policy());
        assert!(record.success);
        assert!(record.echoed_prompt);
        let text = record.output_text.unwrap();
        assert!(text.starts_with("Roses are red, "));
        assert_eq!(record.retry_count, 0);
    }

    #[test]
    fn non_echoing_endpoint_gets_prompt_prepended() {
        let config = MockConfig {
            completion: CompletionBehavior::Canned(vec!["violets are blue".to_string()]),
            ..MockConfig::default()
        };
        let server = MockServer::start(config).unwrap();
        let record = generate(&request("Roses are red, "), &endpoint_for(&server), &fast_policy());
        assert!(record.success);
        assert!(!record.echoed_prompt);
        assert_eq!(record.output_text.unwrap(), "Roses are red, violets are blue");
    }

    #[test]
    fn instruction_mode_stores_response_verbatim() {
        let config = MockConfig {
            completion: CompletionBehavior::Canned(vec!["A poem.\nLine two.".to_string()]),
            ..MockConfig::default()
        };
        let server = MockServer::start(config).unwrap();
        let mut req = request("Write a poem in the style of Percy Bysshe Shelley.");
        req.mode = PromptMode::Instruction;
        let record = generate(&req, &endpoint_for(&server), &fast_policy());
        assert_eq!(record.output_text.unwrap(), "A poem.\nLine two.");
        assert_eq!(record.request.mode, PromptMode::Instruction);
    }

    #[test]
    fn unreachable_endpoint_fails_after_three_retries() {
        let endpoint = EndpointConfig {
            name: "nowhere".to_string(),
            // bound-then-dropped port: nothing listens here
            base_url: "http://127.0.0.1:9/complete".to_string(),
            adapter: AdapterStyle::Neutral,
            length_unit: LengthUnit::Chars,
            auth_env: None,
        };
        let record = generate(&request("hi"), &endpoint, &fast_policy());
        assert!(!record.success);
        assert_eq!(record.retry_count, 3);
        assert!(record.output_text.is_none());
        assert!(record.error.is_some());
    }

    #[test]
    fn transient_failure_retries_to_success() {
        let server = MockServer::start(MockConfig {
            fail_every: Some(2),
            ..MockConfig::default()
        })
        .unwrap();
        let endpoint = endpoint_for(&server);
        // request 1 succeeds outright; request 2 fails then its retry succeeds
        let first = generate(&request("a"), &endpoint, &fast_policy());
        assert_eq!(first.retry_count, 0);
        let second = generate(&request("b"), &endpoint, &fast_policy());
        assert!(second.success);
        assert_eq!(second.retry_count, 1);
    }

    #[test]
    fn local_generate_prefixes_prompt_and_rejects_instructions() {
        let corpus = "ab".repeat(300);
        let config = crate::charlm::TrainConfig {
            hidden_size: 12,
            steps: 60,
            batch_size: 4,
            chunk_length: 16,
            ..crate::charlm::TrainConfig::default()
        };
        let (model, _) = crate::charlm::train(&corpus, &config).unwrap();
        let mut req = request("ab");
        req.max_chars = 12;
        let record = local_generate(&req, &model, 3).unwrap();
        assert!(record.success);
        assert!(record.echoed_prompt);
        let text = record.output_text.unwrap();
        assert!(text.starts_with("ab"));
        assert_eq!(text.chars().count(), 2 + 12);
        assert_eq!(record.endpoint, "local-charlm");

        req.mode = PromptMode::Instruction;
        assert!(matches!(
            local_generate(&req, &model, 3),
            Err(GenClientError::InstructionUnsupported)
        ));
    }

    #[test]
    fn word_unit_truncates_continuation() {
        let long = (1..=100).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ");
        let config = MockConfig {
            completion: CompletionBehavior::Canned(vec![long]),
            ..MockConfig::default()
        };
        let server = MockServer::start(config).unwrap();
        let mut endpoint = endpoint_for(&server);
        endpoint.length_unit = LengthUnit::Words;
        let mut req = request("Start: ");
        req.max_words = 10;
        let record = generate(&req, &endpoint, &fast_policy());
        let text = record.output_text.unwrap();
        let continuation = text.strip_prefix("Start: ").unwrap();
        assert_eq!(continuation.split_whitespace().count(), 10);
        assert_eq!(continuation, "w1 w2 w3 w4 w5 w6 w7 w8 w9 w10");
    }

    #[test]
    fn truncate_words_leaves_short_text() {
        assert_eq!(truncate_words("one two three", 75), "one two three");
        assert_eq!(truncate_words("one two three", 2), "one two");
        assert_eq!(truncate_words("", 75), "");
    }

    #[test]
    fn batch_writes_one_record_per_request() {
        let server = MockServer::start(MockConfig::default()).unwrap();
        let endpoint = endpoint_for(&server);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("records.jsonl");
        let requests: Vec<GenerationRequest> = (0..10)
            .map(|i| {
                let mut r = request(&format!("prompt {i} "));
                r.id = format!("req{i}");
                r
            })
            .collect();
        let outcome =
            run_batch(&requests, &endpoint, &out, &BatchOptions::default()).unwrap();
        assert_eq!(outcome.successes, 10);
        assert_eq!(outcome.failures, 0);
        let records = read_records(&out).unwrap();
        assert_eq!(records.len(), 10);
        let mut ids: Vec<String> = records.iter().map(|r| r.request.id.clone()).collect();
        ids.sort();
        let mut expected: Vec<String> = (0..10).map(|i| format!("req{i}")).collect();
        expected.sort();
        assert_eq!(ids, expected);
    }

    #[test]
    fn batch_respects_in_flight_cap() {
        let server = MockServer::start(MockConfig {
            delay: Some(Duration::from_millis(40)),
            ..MockConfig::default()
        })
        .unwrap();
        let endpoint = endpoint_for(&server);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("records.jsonl");
        let requests: Vec<GenerationRequest> = (0..9)
            .map(|i| {
                let mut r = request(&format!("p{i}"));
                r.id = format!("req{i}");
                r
            })
            .collect();
        let options = BatchOptions { in_flight_cap: 2, ..Default::default() };
        run_batch(&requests, &endpoint, &out, &options).unwrap();
        assert!(server.max_in_flight() <= 2, "observed {}", server.max_in_flight());
    }

    #[test]
    fn batch_skips_completed_ids_and_appends() {
        let server = MockServer::start(MockConfig::default()).unwrap();
        let endpoint = endpoint_for(&server);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("records.jsonl");
        let requests: Vec<GenerationRequest> = (0..4)
            .map(|i| {
                let mut r = request(&format!("p{i}"));
                r.id = format!("req{i}");
                r
            })
            .collect();
        run_batch(&requests[..2], &endpoint, &out, &BatchOptions::default()).unwrap();
        let skip = completed_ids(&out).unwrap();
        assert_eq!(skip.len(), 2);
        let options = BatchOptions { skip_ids: skip, ..Default::default() };
        let outcome = run_batch(&requests, &endpoint, &out, &options).unwrap();
        assert_eq!(outcome.skipped, 2);
        assert_eq!(outcome.successes, 2);
        let records = read_records(&out).unwrap();
        assert_eq!(records.len(), 4);
        let unique: HashSet<String> =
            records.iter().map(|r| r.request.id.clone()).collect();
        assert_eq!(unique.len(), 4, "no id appears twice");
    }

    #[test]
    fn duplicate_requests_write_duplicate_records() {
        let server = MockServer::start(MockConfig::default()).unwrap();
        let endpoint = endpoint_for(&server);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("records.jsonl");
        let req = request("same ");
        run_batch(
            &[req.clone(), req.clone()],
            &endpoint,
            &out,
            &BatchOptions::default(),
        )
        .unwrap();
        assert_eq!(read_records(&out).unwrap().len(), 2);
    }

    #[test]
    fn endpoint_config_parses_and_validates() {
        let text = "\
# endpoint description
name = mock
base_url = http://127.0.0.1:1/complete
adapter = neutral
length_unit = words
auth_env = POETBENCH_API_KEY
";
        let config = EndpointConfig::parse(text).unwrap();
        assert_eq!(config.name, "mock");
        assert_eq!(config.adapter, AdapterStyle::Neutral);
        assert_eq!(config.length_unit, LengthUnit::Words);
        assert_eq!(config.auth_env.as_deref(), Some("POETBENCH_API_KEY"));

        assert!(EndpointConfig::parse("name=x\nbase_url=y\nadapter=zzz\nlength_unit=chars").is_err());
        assert!(EndpointConfig::parse("name=x").is_err());
    }

    #[test]
    fn read_records_rejects_corrupt_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"not\": \"a record\"}\n").unwrap();
        assert!(matches!(
            read_records(&path),
            Err(GenClientError::BadRecord { line: 1, .. })
        ));
    }

    #[test]
    fn openai_adapter_reads_choices() {
        // the mock speaks the neutral protocol, so emulate an openai-style
        // body through a canned neutral response is not possible; instead
        // check the pointer logic directly
        let value: serde_json::Value =
            serde_json::from_str(r#"{"choices": [{"text": "hello"}]}"#).unwrap();
        assert_eq!(value.pointer("/choices/0/text").and_then(|v| v.as_str()), Some("hello"));
    }
}

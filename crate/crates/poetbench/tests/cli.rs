//! Process-level checks of the `poetbench` binary: exit codes, artifact
//! files, resume semantics, and stderr warnings. In-process flag parsing
//! is covered by unit tests next to the CLI module; everything here runs
//! the real executable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use poetbench::genclient::read_records;
use poetbench::mockserver::{CompletionBehavior, MockConfig, MockServer};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn poetbench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poetbench"))
        .args(args)
        .current_dir(dir)
        .env_remove("POETBENCH_SCORER_URL")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_requests(path: &Path, count: usize) {
    let mut lines = String::new();
    for i in 0..count {
        lines.push_str(&format!(
            "{{\"id\":\"req-{i:02}\",\"prompt\":\"Roses are red, \",\"mode\":\"prefix\",\
             \"temperature\":0.7,\"max_words\":75,\"max_chars\":300,\
             \"model_label\":\"cli-test\"}}\n"
        ));
    }
    std::fs::write(path, lines).expect("requests written");
}

fn write_endpoint(path: &Path, url: &str) {
    std::fs::write(path, format!("name=mock\nbase_url={url}\nadapter=neutral\nlength_unit=chars\n"))
        .expect("endpoint written");
}

#[test]
fn version_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let output = poetbench(&["--version"], dir.path());
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("poetbench"));
}

#[test]
fn stats_json_matches_plain_text() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("tiny_corpus.txt");
    let corpus = corpus.to_str().unwrap();

    let plain = poetbench(&["stats", "--corpus", corpus, "--format", "blank"], dir.path());
    assert_eq!(plain.status.code(), Some(0), "stderr: {}", stderr(&plain));

    let json = poetbench(&["stats", "--corpus", corpus, "--format", "blank", "--json"], dir.path());
    assert_eq!(json.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).expect("valid JSON");
    for key in ["poem_count", "line_count", "word_count", "unique_word_count", "byte_count"] {
        let value = parsed[key].as_u64().unwrap_or_else(|| panic!("{key} missing"));
        assert!(value > 0, "{key} is zero");
        assert!(
            stdout(&plain).contains(&value.to_string()),
            "plain output lacks {key}={value}"
        );
    }
}

#[test]
fn train_sample_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("tiny_corpus.txt");
    let train = poetbench(
        &[
            "train",
            "--corpus",
            corpus.to_str().unwrap(),
            "--checkpoint",
            "ck.json",
            "--steps",
            "30",
            "--hidden-size",
            "16",
            "--layer-count",
            "1",
            "--chunk-length",
            "32",
            "--batch-size",
            "4",
            "--seed",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(train.status.code(), Some(0), "stderr: {}", stderr(&train));
    assert!(dir.path().join("ck.json").exists(), "checkpoint file missing");

    let sample = poetbench(
        &[
            "sample",
            "--checkpoint",
            "ck.json",
            "--prompt",
            "The ",
            "--temperature",
            "0.8",
            "--max-chars",
            "40",
            "--seed",
            "4",
        ],
        dir.path(),
    );
    assert_eq!(sample.status.code(), Some(0), "stderr: {}", stderr(&sample));
    let text = stdout(&sample);
    assert!(text.starts_with("The "), "sample must begin with the prompt: {text:?}");
    assert!(text.trim_end().len() > "The ".len(), "sample produced no continuation");
}

#[test]
fn zero_learning_rate_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("tiny_corpus.txt");
    let output = poetbench(
        &[
            "train",
            "--corpus",
            corpus.to_str().unwrap(),
            "--checkpoint",
            "flat.json",
            "--steps",
            "8",
            "--learning-rate",
            "0",
            "--hidden-size",
            "12",
            "--layer-count",
            "1",
            "--chunk-length",
            "24",
            "--batch-size",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(
        stderr(&output).contains("learning rate is 0"),
        "expected a flat-loss warning, got: {}",
        stderr(&output)
    );
}

#[test]
fn missing_required_flag_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let output = poetbench(&["train", "--checkpoint", "ck.json"], dir.path());
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("--corpus"), "stderr: {}", stderr(&output));
}

#[test]
fn sample_with_missing_checkpoint_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let output = poetbench(
        &["sample", "--checkpoint", "missing.json", "--prompt", "x"],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.conf");
    std::fs::write(
        &config_path,
        "corpus=unused.txt\nsteps=50\nhidden_size=12\ncheckpoint=from-file.json\n",
    )
    .unwrap();
    let output = poetbench(
        &[
            "train",
            "--config",
            config_path.to_str().unwrap(),
            "--steps",
            "3",
            "--print-config",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("steps = 3"), "flag should beat the file: {text}");
    assert!(text.contains("hidden_size = 12"), "file value should fill the gap: {text}");
    assert!(text.contains("checkpoint = from-file.json"), "file path ignored: {text}");
}

#[test]
fn generate_failures_exit_two_but_write_records() {
    let server = MockServer::start(MockConfig {
        fail_every: Some(1), // every request 500s
        ..MockConfig::default()
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_requests(&dir.path().join("requests.jsonl"), 3);
    write_endpoint(&dir.path().join("endpoint.conf"), &server.completion_url());

    let output = poetbench(
        &[
            "generate",
            "--requests",
            "requests.jsonl",
            "--endpoint",
            "endpoint.conf",
            "--out",
            "records.jsonl",
            "--retries",
            "1",
            "--base-delay-ms",
            "10",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
    assert!(stderr(&output).contains("3 of 3 requests failed"), "stderr: {}", stderr(&output));

    let records = read_records(&dir.path().join("records.jsonl")).expect("failure records parse");
    assert_eq!(records.len(), 3);
    for record in &records {
        assert!(!record.success);
        assert!(record.error.is_some());
        assert_eq!(record.retry_count, 1, "one retry was requested");
    }
}

#[test]
fn generate_resume_skips_completed_requests() {
    let server = MockServer::start(MockConfig {
        completion: CompletionBehavior::Echo { suffix: "violets are blue.".to_string() },
        ..MockConfig::default()
    })
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_requests(&dir.path().join("requests.jsonl"), 3);
    write_endpoint(&dir.path().join("endpoint.conf"), &server.completion_url());
    let args = [
        "generate",
        "--requests",
        "requests.jsonl",
        "--endpoint",
        "endpoint.conf",
        "--out",
        "records.jsonl",
        "--resume",
    ];

    let first = poetbench(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr(&first));
    assert!(stdout(&first).contains("3/3 requests succeeded"), "stdout: {}", stdout(&first));
    let after_first = std::fs::read(dir.path().join("records.jsonl")).unwrap();

    let second = poetbench(&args, dir.path());
    assert_eq!(second.status.code(), Some(0), "stderr: {}", stderr(&second));
    assert!(stdout(&second).contains("(3 skipped)"), "stdout: {}", stdout(&second));
    let after_second = std::fs::read(dir.path().join("records.jsonl")).unwrap();
    assert_eq!(after_first, after_second, "resume must not rewrite completed records");
}

#[test]
fn eval_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let records = fixture("records_fixture.jsonl");
    let output = poetbench(
        &[
            "eval",
            "--records",
            records.to_str().unwrap(),
            "--rows-out",
            "rows.json",
            "--summary-out",
            "summary.json",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rows.json")).unwrap())
            .expect("rows.json parses");
    assert_eq!(rows.as_array().map(Vec::len), Some(8), "one row per record");

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .expect("summary.json parses");
    let models = summary.as_object().expect("summary is a per-model map");
    assert!(models.contains_key("alpha-model") && models.contains_key("beta-model"));
    assert_eq!(models["alpha-model"]["n"].as_u64(), Some(3), "one alpha row lacks metrics");

    let table = stdout(&output);
    assert!(table.contains("alpha-model") && table.contains("beta-model"), "table: {table}");
    // The fixture contains one failed generation and one blank output, so
    // the run must mention warning rows without failing.
    assert!(stderr(&output).contains("rows carry warnings"), "stderr: {}", stderr(&output));
}

#[test]
fn eval_with_unreadable_records_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let output = poetbench(
        &[
            "eval",
            "--records",
            "no-such-file.jsonl",
            "--rows-out",
            "rows.json",
            "--summary-out",
            "summary.json",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1));
}

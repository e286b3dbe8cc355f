//! Command-line pipeline: `stats | train | sample | generate | eval`,
//! one verb per stage.
//!
//! Flag values may also come from a `key=value` config file (`--config`);
//! an explicit flag always wins over the file. `--print-config` shows the
//! merged settings a run would use and exits. All randomness flows from
//! the single `--seed` flag. Exit codes: 0 success, 1 usage or input
//! error, 2 runtime failure.

use std::collections::{HashMap, HashSet};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::charlm::{self, CharLm, CharLmError, GenParams, TrainConfig};
use crate::coherence::{GrammarScorer, NeutralScorer, RemoteScorer};
use crate::corpus::{corpus_stats, load_corpus, write_corpus, CorpusFormat};
use crate::genclient::{
    self, BatchOptions, EndpointConfig, GenerationRequest, RetryPolicy,
};
use crate::report::{
    evaluate_records, render_summary_table, rows_to_json, summarize, summary_to_json,
    ReportError,
};
use crate::rhyme::RhymeLexicon;
use crate::syllable::SyllableLexicon;

/// Errors sorted by exit code: `Input` → 1, `Runtime` → 2.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Runtime(String),
}

impl CliError {
    fn input(err: impl std::fmt::Display) -> CliError {
        CliError::Input(err.to_string())
    }

    fn runtime(err: impl std::fmt::Display) -> CliError {
        CliError::Runtime(err.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "poetbench",
    version,
    about = "Poetry generation study pipeline: corpus stats, char-level \
             language model training and sampling, remote generation, and \
             meter/rhyme/coherence evaluation."
)]
struct Cli {
    /// key=value file supplying defaults for any long flag name
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for all randomness (training batches and sampling)
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Print the effective merged configuration and exit
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report corpus statistics (poems, lines, words, unique words, bytes)
    Stats(StatsArgs),
    /// Train the character-level model and write a checkpoint
    Train(TrainArgs),
    /// Sample text from a trained checkpoint
    Sample(SampleArgs),
    /// Send a batch of prompts to a completion endpoint
    Generate(GenerateArgs),
    /// Score generation records and write rows + summary
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Corpus file to analyze
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Corpus format: "blank" (blank-line separated) or "records"
    #[arg(long, value_name = "FORMAT")]
    format: Option<String>,
    /// Emit machine-readable JSON instead of the text block
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Corpus file to train on
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Corpus format: "blank" or "records"
    #[arg(long, value_name = "FORMAT")]
    format: Option<String>,
    /// Where to write the trained checkpoint
    #[arg(long, value_name = "FILE")]
    checkpoint: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    #[arg(long, value_name = "F")]
    learning_rate: Option<f64>,
    #[arg(long, value_name = "N")]
    chunk_length: Option<usize>,
    #[arg(long, value_name = "N")]
    batch_size: Option<usize>,
    #[arg(long, value_name = "N")]
    hidden_size: Option<usize>,
    #[arg(long, value_name = "N")]
    layer_count: Option<usize>,
    #[arg(long, value_name = "F")]
    clip_norm: Option<f64>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Trained checkpoint to sample from
    #[arg(long, value_name = "FILE")]
    checkpoint: Option<PathBuf>,
    /// Prompt text; output begins with it verbatim
    #[arg(long, value_name = "TEXT")]
    prompt: Option<String>,
    #[arg(long, value_name = "F")]
    temperature: Option<f64>,
    /// Characters to generate after the prompt
    #[arg(long, value_name = "N")]
    max_chars: Option<usize>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// JSON-lines file of generation requests
    #[arg(long, value_name = "FILE")]
    requests: Option<PathBuf>,
    /// key=value endpoint description
    #[arg(long, value_name = "FILE")]
    endpoint: Option<PathBuf>,
    /// JSON-lines records file to append to
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Skip requests that already have a successful record in --out
    #[arg(long)]
    resume: bool,
    /// Maximum simultaneous requests
    #[arg(long, value_name = "N")]
    max_in_flight: Option<usize>,
    /// Retries per request after the initial attempt
    #[arg(long, value_name = "N")]
    retries: Option<u32>,
    /// Base backoff delay in milliseconds (doubles per retry)
    #[arg(long, value_name = "MS")]
    base_delay_ms: Option<u64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// JSON-lines generation records to score
    #[arg(long, value_name = "FILE")]
    records: Option<PathBuf>,
    /// Syllable lexicon overriding the bundled one
    #[arg(long, value_name = "FILE")]
    syllable_lexicon: Option<PathBuf>,
    /// Optional pronouncing lexicon for rhyme keys
    #[arg(long, value_name = "FILE")]
    rhyme_lexicon: Option<PathBuf>,
    /// Grammar scorer endpoint; omitted → neutral scoring
    #[arg(long, value_name = "URL")]
    scorer_url: Option<String>,
    /// Where to write per-record rows as JSON
    #[arg(long, value_name = "FILE")]
    rows_out: Option<PathBuf>,
    /// Where to write the per-model summary as JSON
    #[arg(long, value_name = "FILE")]
    summary_out: Option<PathBuf>,
}

/// Values from the `--config` file, applied wherever a flag is absent.
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig(HashMap::new()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!(
                    "config {} line {}: expected key=value",
                    path.display(),
                    idx + 1
                ))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    /// Flag value if present, else the parsed file value, else None.
    fn resolve<T: FromStr + Clone>(
        &self,
        flag: &Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        if let Some(value) = flag {
            return Ok(Some(value.clone()));
        }
        match self.0.get(key) {
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Input(format!("config key {key}: cannot parse {raw:?}"))
            }),
            None => Ok(None),
        }
    }

    fn require<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> Result<T, CliError> {
        self.resolve(flag, key)?.ok_or_else(|| {
            CliError::Input(format!("missing --{} (or {key}= in the config file)", key.replace('_', "-")))
        })
    }
}

fn parse_format(name: &str) -> Result<CorpusFormat, CliError> {
    match name {
        "blank" => Ok(CorpusFormat::BlankLine),
        "records" => Ok(CorpusFormat::Records),
        other => Err(CliError::Input(format!(
            "unknown corpus format {other:?} (expected \"blank\" or \"records\")"
        ))),
    }
}

fn print_config_lines(entries: &[(&str, String)]) {
    for (key, value) in entries {
        println!("{key} = {value}");
    }
}

/// Parses `args` and runs the selected command, returning the process exit
/// code. Split from `main` so tests can drive it in-process.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // clap exits 2 on usage errors by default; remap to 1 and keep
            // help/version at 0
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            1
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = file.resolve(&cli.seed, "seed")?.unwrap_or(0);
    match cli.command {
        Command::Stats(args) => cmd_stats(args, &file, cli.print_config),
        Command::Train(args) => cmd_train(args, &file, seed, cli.print_config),
        Command::Sample(args) => cmd_sample(args, &file, seed, cli.print_config),
        Command::Generate(args) => cmd_generate(args, &file, cli.print_config),
        Command::Eval(args) => cmd_eval(args, &file, cli.print_config),
    }
}

fn cmd_stats(args: StatsArgs, file: &FileConfig, print_only: bool) -> Result<(), CliError> {
    let corpus = file.require(&args.corpus, "corpus")?;
    let format_name = file.resolve(&args.format, "format")?.unwrap_or_else(|| "blank".to_string());
    let format = parse_format(&format_name)?;
    if print_only {
        print_config_lines(&[
            ("corpus", corpus.display().to_string()),
            ("format", format_name),
            ("json", args.json.to_string()),
        ]);
        return Ok(());
    }
    let (poems, raw_bytes) = load_corpus(&corpus, format).map_err(CliError::input)?;
    let stats = corpus_stats(&poems, raw_bytes);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
    } else {
        println!("poems:        {}", stats.poem_count);
        println!("lines:        {}", stats.line_count);
        println!("words:        {}", stats.word_count);
        println!("unique words: {}", stats.unique_word_count);
        println!("bytes:        {}", stats.byte_count);
    }
    Ok(())
}

fn train_error(err: CharLmError) -> CliError {
    match err {
        CharLmError::Divergence { .. } => CliError::runtime(err),
        other => CliError::input(other),
    }
}

fn cmd_train(
    args: TrainArgs,
    file: &FileConfig,
    seed: u64,
    print_only: bool,
) -> Result<(), CliError> {
    let corpus = file.require(&args.corpus, "corpus")?;
    let format_name = file.resolve(&args.format, "format")?.unwrap_or_else(|| "blank".to_string());
    let format = parse_format(&format_name)?;
    let checkpoint = file.require(&args.checkpoint, "checkpoint")?;
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        learning_rate: file.resolve(&args.learning_rate, "learning_rate")?.unwrap_or(defaults.learning_rate),
        chunk_length: file.resolve(&args.chunk_length, "chunk_length")?.unwrap_or(defaults.chunk_length),
        batch_size: file.resolve(&args.batch_size, "batch_size")?.unwrap_or(defaults.batch_size),
        steps: file.resolve(&args.steps, "steps")?.unwrap_or(defaults.steps),
        seed,
        hidden_size: file.resolve(&args.hidden_size, "hidden_size")?.unwrap_or(defaults.hidden_size),
        layer_count: file.resolve(&args.layer_count, "layer_count")?.unwrap_or(defaults.layer_count),
        clip_norm: file.resolve(&args.clip_norm, "clip_norm")?.unwrap_or(defaults.clip_norm),
    };
    if print_only {
        print_config_lines(&[
            ("corpus", corpus.display().to_string()),
            ("format", format_name),
            ("checkpoint", checkpoint.display().to_string()),
            ("steps", config.steps.to_string()),
            ("learning_rate", config.learning_rate.to_string()),
            ("chunk_length", config.chunk_length.to_string()),
            ("batch_size", config.batch_size.to_string()),
            ("hidden_size", config.hidden_size.to_string()),
            ("layer_count", config.layer_count.to_string()),
            ("clip_norm", config.clip_norm.to_string()),
            ("seed", seed.to_string()),
        ]);
        return Ok(());
    }

    let (poems, _) = load_corpus(&corpus, format).map_err(CliError::input)?;
    // normalized poem text: the model never sees record headers/separators
    let text = write_corpus(&poems, CorpusFormat::BlankLine);
    let report_every = (config.steps / 10).max(1);
    let (model, history) = charlm::train_with_progress(&text, &config, |step, loss| {
        if step % report_every == 0 || step == config.steps {
            eprintln!("step {step:>6}  loss {loss:.4}");
        }
    })
    .map_err(train_error)?;

    if config.learning_rate == 0.0 {
        eprintln!("warning: loss is flat — learning rate is 0");
    } else if history.len() >= 2 {
        // Chunks are resampled per step, so identical losses across a whole
        // run mean the model itself is stuck, not random noise.
        let lo = history.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = history.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 1e-9 {
            eprintln!("warning: loss did not change over {} steps", history.len());
        }
    }

    model.save(&checkpoint).map_err(CliError::runtime)?;
    let final_loss = history.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained {} steps; final loss {:.4}; checkpoint written to {}",
        config.steps,
        final_loss,
        checkpoint.display()
    );
    Ok(())
}

fn cmd_sample(
    args: SampleArgs,
    file: &FileConfig,
    seed: u64,
    print_only: bool,
) -> Result<(), CliError> {
    let checkpoint = file.require(&args.checkpoint, "checkpoint")?;
    let defaults = GenParams::default();
    let gen = GenParams {
        temperature: file.resolve(&args.temperature, "temperature")?.unwrap_or(defaults.temperature),
        max_chars: file.resolve(&args.max_chars, "max_chars")?.unwrap_or(defaults.max_chars),
        prompt: file.resolve(&args.prompt, "prompt")?.unwrap_or_default(),
    };
    if print_only {
        print_config_lines(&[
            ("checkpoint", checkpoint.display().to_string()),
            ("prompt", format!("{:?}", gen.prompt)),
            ("temperature", gen.temperature.to_string()),
            ("max_chars", gen.max_chars.to_string()),
            ("seed", seed.to_string()),
        ]);
        return Ok(());
    }
    let model = CharLm::load(&checkpoint).map_err(CliError::input)?;
    let text = model.sample(&gen, seed).map_err(CliError::input)?;
    println!("{text}");
    Ok(())
}

fn read_requests(path: &Path) -> Result<Vec<GenerationRequest>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("requests {}: {e}", path.display())))?;
    let mut requests = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let request: GenerationRequest = serde_json::from_str(line).map_err(|e| {
            CliError::Input(format!("requests line {}: {e}", idx + 1))
        })?;
        if request.id.is_empty() {
            return Err(CliError::Input(format!("requests line {}: empty id", idx + 1)));
        }
        if !seen.insert(request.id.clone()) {
            return Err(CliError::Input(format!(
                "requests line {}: duplicate id {:?}",
                idx + 1,
                request.id
            )));
        }
        requests.push(request);
    }
    if requests.is_empty() {
        return Err(CliError::Input(format!("requests {}: no requests", path.display())));
    }
    Ok(requests)
}

fn cmd_generate(args: GenerateArgs, file: &FileConfig, print_only: bool) -> Result<(), CliError> {
    let requests_path = file.require(&args.requests, "requests")?;
    let endpoint_path = file.require(&args.endpoint, "endpoint")?;
    let out = file.require(&args.out, "out")?;
    let defaults = BatchOptions::default();
    let max_in_flight = file
        .resolve(&args.max_in_flight, "max_in_flight")?
        .unwrap_or(defaults.in_flight_cap);
    let retries = file.resolve(&args.retries, "retries")?.unwrap_or(defaults.policy.max_retries);
    let base_delay_ms = file
        .resolve(&args.base_delay_ms, "base_delay_ms")?
        .unwrap_or(defaults.policy.base_delay.as_millis() as u64);
    if print_only {
        print_config_lines(&[
            ("requests", requests_path.display().to_string()),
            ("endpoint", endpoint_path.display().to_string()),
            ("out", out.display().to_string()),
            ("resume", args.resume.to_string()),
            ("max_in_flight", max_in_flight.to_string()),
            ("retries", retries.to_string()),
            ("base_delay_ms", base_delay_ms.to_string()),
        ]);
        return Ok(());
    }

    let requests = read_requests(&requests_path)?;
    let endpoint = EndpointConfig::load(&endpoint_path).map_err(CliError::input)?;
    let skip_ids = if args.resume {
        genclient::completed_ids(&out).map_err(CliError::input)?
    } else {
        HashSet::new()
    };
    let options = BatchOptions {
        policy: RetryPolicy {
            max_retries: retries,
            base_delay: std::time::Duration::from_millis(base_delay_ms),
            ..RetryPolicy::default()
        },
        in_flight_cap: max_in_flight,
        skip_ids,
    };
    let outcome =
        genclient::run_batch(&requests, &endpoint, &out, &options).map_err(CliError::runtime)?;
    let attempted = outcome.successes + outcome.failures;
    println!(
        "{}/{} requests succeeded ({} skipped); records in {}",
        outcome.successes,
        attempted,
        outcome.skipped,
        out.display()
    );
    if outcome.failures > 0 {
        return Err(CliError::Runtime(format!(
            "{} of {} requests failed; failure records were written",
            outcome.failures, attempted
        )));
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs, file: &FileConfig, print_only: bool) -> Result<(), CliError> {
    let records_path = file.require(&args.records, "records")?;
    let rows_out = file.require(&args.rows_out, "rows_out")?;
    let summary_out = file.require(&args.summary_out, "summary_out")?;
    let syllable_path = file.resolve(&args.syllable_lexicon, "syllable_lexicon")?;
    let rhyme_path = file.resolve(&args.rhyme_lexicon, "rhyme_lexicon")?;
    let scorer_url = file.resolve(&args.scorer_url, "scorer_url")?;
    if print_only {
        let display = |p: &Option<PathBuf>| {
            p.as_ref().map_or("(none)".to_string(), |p| p.display().to_string())
        };
        print_config_lines(&[
            ("records", records_path.display().to_string()),
            ("rows_out", rows_out.display().to_string()),
            ("summary_out", summary_out.display().to_string()),
            ("syllable_lexicon", display(&syllable_path)),
            ("rhyme_lexicon", display(&rhyme_path)),
            ("scorer_url", scorer_url.clone().unwrap_or_else(|| "(neutral)".to_string())),
        ]);
        return Ok(());
    }

    let syllables = match &syllable_path {
        Some(path) => SyllableLexicon::load(path).map_err(CliError::input)?,
        None => SyllableLexicon::bundled(),
    };
    let rhymes = match &rhyme_path {
        Some(path) => Some(RhymeLexicon::load(path).map_err(CliError::input)?),
        None => None,
    };
    let scorer: Box<dyn GrammarScorer> = match scorer_url {
        Some(url) => Box::new(RemoteScorer::new(url)),
        None => match RemoteScorer::from_env() {
            Some(remote) => Box::new(remote),
            None => Box::new(NeutralScorer),
        },
    };

    let records = genclient::read_records(&records_path).map_err(CliError::input)?;
    let rows = evaluate_records(&records, &syllables, rhymes.as_ref(), scorer.as_ref());
    let summary = summarize(&rows).map_err(|err| match err {
        ReportError::NoUsableRows => CliError::input(err),
        other => CliError::runtime(other),
    })?;

    std::fs::write(&rows_out, rows_to_json(&rows))
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", rows_out.display())))?;
    std::fs::write(&summary_out, summary_to_json(&summary))
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", summary_out.display())))?;
    print!("{}", render_summary_table(&summary));
    let warned = rows.iter().filter(|r| !r.warnings.is_empty()).count();
    if warned > 0 {
        eprintln!("{warned} of {} rows carry warnings", rows.len());
    }
    Ok(())
}

//! Character-level language model: a stacked LSTM trained by truncated
//! BPTT over random corpus chunks, with temperature sampling.
//!
//! Design notes, all configurable:
//!
//! - Optimizer is Adam at learning rate 0.02 with standard moment
//!   constants; gradients are clipped to global norm 5.0 before each
//!   update (BPTT at this learning rate diverges without clipping).
//! - A training step draws `batch_size` random chunks of `chunk_length`
//!   characters, averages their gradients, and applies one update; "steps"
//!   here are batches, not passes over the corpus.
//! - Characters enter through an embedding table whose width equals the
//!   hidden size; state starts at zeros for every chunk (no carryover).
//! - Everything is f64, and every run is a pure function of its seed: the
//!   batched lockstep math has no reduction whose order could vary, so
//!   loss histories and samples are bit-identical across runs.

mod checkpoint;
mod lstm;
mod optim;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{CheckpointError, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use lstm::{
    forward_step, loss_and_gradients, loss_and_gradients_batch, softmax, Gradients, LSTMParams,
    LayerParams, LstmState,
};
pub use optim::{clip_global_norm, Adam};

/// Weight initialization half-width (uniform).
const INIT_SCALE: f64 = 0.08;

/// Below this temperature sampling becomes argmax.
const ARGMAX_TEMPERATURE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CharLmError {
    #[error("tensor dimensions inconsistent")]
    DimensionMismatch,
    #[error("non-finite parameter value")]
    NonFiniteParams,
    #[error("character id {0} outside vocabulary")]
    CharIdOutOfRange(usize),
    #[error("chunk of {0} characters is too short to predict from (need at least 2)")]
    ChunkTooShort(usize),
    #[error("batch holds no chunks")]
    EmptyBatch,
    #[error("corpus of {corpus_chars} characters cannot supply chunks of {chunk_length}")]
    CorpusTooSmall { corpus_chars: usize, chunk_length: usize },
    #[error("invalid train config: {0}")]
    InvalidConfig(String),
    #[error("training diverged at step {step} (loss {loss})")]
    Divergence { step: usize, loss: f64 },
    #[error("character {0:?} not in vocabulary")]
    UnknownChar(char),
    #[error("duplicate character {0:?} in vocabulary")]
    DuplicateChar(char),
    #[error("temperature must be positive, got {0}")]
    InvalidTemperature(f64),
    #[error("max_chars must be at least 1")]
    MaxCharsZero,
    #[error("prompt must hold at least one character")]
    EmptyPrompt,
}

/// Character alphabet in first-appearance order, with its inverse map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharVocab {
    chars: Vec<char>,
    index: HashMap<char, usize>,
}

impl CharVocab {
    /// Alphabet of `text` ordered by first appearance.
    pub fn from_text(text: &str) -> CharVocab {
        let mut chars = Vec::new();
        let mut index = HashMap::new();
        for c in text.chars() {
            if !index.contains_key(&c) {
                index.insert(c, chars.len());
                chars.push(c);
            }
        }
        CharVocab { chars, index }
    }

    /// Alphabet from an explicit character order; duplicates are an error.
    pub fn from_chars(iter: impl IntoIterator<Item = char>) -> Result<CharVocab, CharLmError> {
        let mut chars = Vec::new();
        let mut index = HashMap::new();
        for c in iter {
            if index.insert(c, chars.len()).is_some() {
                return Err(CharLmError::DuplicateChar(c));
            }
            chars.push(c);
        }
        Ok(CharVocab { chars, index })
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn id(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn char(&self, id: usize) -> Option<char> {
        self.chars.get(id).copied()
    }

    pub fn encode(&self, text: &str) -> Result<Vec<usize>, CharLmError> {
        text.chars()
            .map(|c| self.id(c).ok_or(CharLmError::UnknownChar(c)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub chunk_length: usize,
    pub batch_size: usize,
    pub steps: usize,
    pub seed: u64,
    pub hidden_size: usize,
    pub layer_count: usize,
    pub clip_norm: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.02,
            chunk_length: 200,
            batch_size: 100,
            steps: 6000,
            seed: 0,
            hidden_size: 100,
            layer_count: 2,
            clip_norm: 5.0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), CharLmError> {
        let positive = [
            ("learning_rate", self.learning_rate >= 0.0),
            ("chunk_length >= 2", self.chunk_length >= 2),
            ("batch_size", self.batch_size >= 1),
            ("steps", self.steps >= 1),
            ("hidden_size", self.hidden_size >= 1),
            ("layer_count", self.layer_count >= 1),
            ("clip_norm", self.clip_norm > 0.0),
        ];
        for (what, ok) in positive {
            if !ok {
                return Err(CharLmError::InvalidConfig(what.to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Softmax temperature; below 1e-6 sampling degenerates to argmax.
    pub temperature: f64,
    /// Number of characters generated after the prompt.
    pub max_chars: usize,
    pub prompt: String,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { temperature: 0.7, max_chars: 300, prompt: String::new() }
    }
}

/// A trained model: parameters plus the vocabulary they index.
#[derive(Debug, Clone, PartialEq)]
pub struct CharLm {
    pub vocab: CharVocab,
    pub params: LSTMParams,
}

/// Trains on `text` and returns the model plus one batch-mean loss per step.
pub fn train(text: &str, config: &TrainConfig) -> Result<(CharLm, Vec<f64>), CharLmError> {
    train_with_progress(text, config, |_, _| {})
}

/// [`train`] invoking `progress(step, loss)` after every step.
pub fn train_with_progress(
    text: &str,
    config: &TrainConfig,
    mut progress: impl FnMut(usize, f64),
) -> Result<(CharLm, Vec<f64>), CharLmError> {
    config.validate()?;
    let vocab = CharVocab::from_text(text);
    let ids = vocab.encode(text).expect("vocab built from the same text");
    if ids.len() <= config.chunk_length {
        return Err(CharLmError::CorpusTooSmall {
            corpus_chars: ids.len(),
            chunk_length: config.chunk_length,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = LSTMParams::init(
        vocab.len(),
        config.hidden_size,
        config.layer_count,
        INIT_SCALE,
        &mut rng,
    );
    let mut adam = Adam::new(config.learning_rate, &params);
    let mut history = Vec::with_capacity(config.steps);
    let max_start = ids.len() - config.chunk_length;

    for step in 0..config.steps {
        let chunks: Vec<&[usize]> = (0..config.batch_size)
            .map(|_| {
                let start = rng.gen_range(0..=max_start);
                &ids[start..start + config.chunk_length]
            })
            .collect();
        let (losses, mut grads) = loss_and_gradients_batch(&params, &chunks)?;
        let loss = losses.iter().sum::<f64>() / losses.len() as f64;
        if !loss.is_finite() {
            return Err(CharLmError::Divergence { step, loss });
        }
        history.push(loss);
        clip_global_norm(&mut grads, config.clip_norm);
        adam.step(&mut params, &grads);
        progress(step, loss);
    }

    Ok((CharLm { vocab, params }, history))
}

impl CharLm {
    /// Feeds the prompt through the network, then draws `max_chars`
    /// characters from the temperature-scaled softmax (argmax below the
    /// 1e-6 threshold). The output starts with the prompt verbatim.
    pub fn sample(&self, gen: &GenParams, seed: u64) -> Result<String, CharLmError> {
        if gen.temperature <= 0.0 {
            return Err(CharLmError::InvalidTemperature(gen.temperature));
        }
        if gen.max_chars == 0 {
            return Err(CharLmError::MaxCharsZero);
        }
        let prompt_ids = self.vocab.encode(&gen.prompt)?;
        if prompt_ids.is_empty() {
            return Err(CharLmError::EmptyPrompt);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = LstmState::zeros(&self.params);
        let mut logits = None;
        for &id in &prompt_ids {
            logits = Some(forward_step(&self.params, &mut state, id)?);
        }
        let mut logits = logits.expect("prompt is non-empty");

        let mut out = gen.prompt.clone();
        for _ in 0..gen.max_chars {
            let next = if gen.temperature < ARGMAX_TEMPERATURE {
                argmax(logits.iter().copied())
            } else {
                let probs = softmax(&logits.mapv(|v| v / gen.temperature));
                debug_assert!((probs.sum() - 1.0).abs() < 1e-9);
                multinomial(probs.iter().copied(), &mut rng)
            };
            out.push(self.vocab.char(next).expect("sampled id within vocab"));
            logits = forward_step(&self.params, &mut state, next)?;
        }
        Ok(out)
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

fn multinomial(probs: impl Iterator<Item = f64>, rng: &mut impl Rng) -> usize {
    let r: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        cumulative += p;
        last = i;
        if r < cumulative {
            return i;
        }
    }
    // rounding left the cumulative a hair under 1: take the final index
    last
}

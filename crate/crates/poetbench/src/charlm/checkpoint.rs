//! Model checkpoints: a JSON container holding the vocabulary, dimensions,
//! and every parameter tensor as base64-encoded little-endian f64 bytes
//! with an explicit shape. The `version` field is mandatory; readers
//! reject versions they do not understand.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lstm::{LSTMParams, LayerParams};
use super::{CharLm, CharVocab};

pub const CHECKPOINT_FORMAT: &str = "poetbench-charlm";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("checkpoint invalid: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    shape: Vec<usize>,
    /// base64 of the row-major little-endian f64 bytes
    data: String,
}

#[derive(Serialize, Deserialize)]
struct CheckpointRepr {
    format: String,
    version: u32,
    /// vocabulary characters concatenated in id order
    vocab: String,
    hidden_size: usize,
    layer_count: usize,
    tensors: BTreeMap<String, TensorRepr>,
}

fn encode_tensor(shape: Vec<usize>, values: impl Iterator<Item = f64>) -> TensorRepr {
    let mut bytes = Vec::new();
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    TensorRepr { shape, data: BASE64.encode(bytes) }
}

fn decode_values(name: &str, repr: &TensorRepr) -> Result<Vec<f64>, CheckpointError> {
    let bytes = BASE64
        .decode(&repr.data)
        .map_err(|e| CheckpointError::Invalid(format!("tensor {name}: {e}")))?;
    if bytes.len() % 8 != 0 {
        return Err(CheckpointError::Invalid(format!(
            "tensor {name}: byte count {} not a multiple of 8",
            bytes.len()
        )));
    }
    let expected: usize = repr.shape.iter().product();
    if bytes.len() / 8 != expected {
        return Err(CheckpointError::Invalid(format!(
            "tensor {name}: shape {:?} wants {expected} values, data holds {}",
            repr.shape,
            bytes.len() / 8
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks_exact(8)")))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CheckpointError::Invalid(format!("tensor {name}: non-finite value")));
    }
    Ok(values)
}

fn decode_matrix(
    tensors: &BTreeMap<String, TensorRepr>,
    name: &str,
    rows: usize,
    cols: usize,
) -> Result<Array2<f64>, CheckpointError> {
    let repr = tensors
        .get(name)
        .ok_or_else(|| CheckpointError::Invalid(format!("missing tensor {name}")))?;
    if repr.shape != [rows, cols] {
        return Err(CheckpointError::Invalid(format!(
            "tensor {name}: expected shape [{rows}, {cols}], found {:?}",
            repr.shape
        )));
    }
    let values = decode_values(name, repr)?;
    Array2::from_shape_vec((rows, cols), values)
        .map_err(|e| CheckpointError::Invalid(format!("tensor {name}: {e}")))
}

fn decode_vector(
    tensors: &BTreeMap<String, TensorRepr>,
    name: &str,
    len: usize,
) -> Result<Array1<f64>, CheckpointError> {
    let repr = tensors
        .get(name)
        .ok_or_else(|| CheckpointError::Invalid(format!("missing tensor {name}")))?;
    if repr.shape != [len] {
        return Err(CheckpointError::Invalid(format!(
            "tensor {name}: expected shape [{len}], found {:?}",
            repr.shape
        )));
    }
    Ok(Array1::from_vec(decode_values(name, repr)?))
}

impl CharLm {
    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        let params = &self.params;
        let (v, h) = (params.vocab_size(), params.hidden_size);
        let mut tensors = BTreeMap::new();
        tensors.insert(
            "embedding".to_string(),
            encode_tensor(vec![v, h], params.embedding.iter().copied()),
        );
        for (l, layer) in params.layers.iter().enumerate() {
            tensors.insert(
                format!("layer{l}.wx"),
                encode_tensor(vec![4 * h, h], layer.wx.iter().copied()),
            );
            tensors.insert(
                format!("layer{l}.wh"),
                encode_tensor(vec![4 * h, h], layer.wh.iter().copied()),
            );
            tensors.insert(
                format!("layer{l}.b"),
                encode_tensor(vec![4 * h], layer.b.iter().copied()),
            );
        }
        tensors.insert(
            "output.w".to_string(),
            encode_tensor(vec![v, h], params.w_out.iter().copied()),
        );
        tensors.insert(
            "output.b".to_string(),
            encode_tensor(vec![v], params.b_out.iter().copied()),
        );

        let repr = CheckpointRepr {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            vocab: self.vocab.chars().iter().collect(),
            hidden_size: h,
            layer_count: params.layer_count(),
            tensors,
        };
        let json = serde_json::to_string_pretty(&repr)?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CharLm, CheckpointError> {
        let repr: CheckpointRepr = serde_json::from_str(&fs::read_to_string(path)?)?;
        if repr.format != CHECKPOINT_FORMAT {
            return Err(CheckpointError::Invalid(format!(
                "format {:?}, expected {CHECKPOINT_FORMAT:?}",
                repr.format
            )));
        }
        if repr.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Invalid(format!(
                "version {} unsupported (reader understands {CHECKPOINT_VERSION})",
                repr.version
            )));
        }
        let vocab = CharVocab::from_chars(repr.vocab.chars())
            .map_err(|e| CheckpointError::Invalid(format!("vocab: {e}")))?;
        let (v, h) = (vocab.len(), repr.hidden_size);
        if v == 0 || h == 0 || repr.layer_count == 0 {
            return Err(CheckpointError::Invalid("zero dimension".to_string()));
        }

        let embedding = decode_matrix(&repr.tensors, "embedding", v, h)?;
        let mut layers = Vec::with_capacity(repr.layer_count);
        for l in 0..repr.layer_count {
            layers.push(LayerParams {
                wx: decode_matrix(&repr.tensors, &format!("layer{l}.wx"), 4 * h, h)?,
                wh: decode_matrix(&repr.tensors, &format!("layer{l}.wh"), 4 * h, h)?,
                b: decode_vector(&repr.tensors, &format!("layer{l}.b"), 4 * h)?,
            });
        }
        let w_out = decode_matrix(&repr.tensors, "output.w", v, h)?;
        let b_out = decode_vector(&repr.tensors, "output.b", v)?;

        let params = LSTMParams { hidden_size: h, embedding, layers, w_out, b_out };
        params
            .validate()
            .map_err(|e| CheckpointError::Invalid(e.to_string()))?;
        Ok(CharLm { vocab, params })
    }
}

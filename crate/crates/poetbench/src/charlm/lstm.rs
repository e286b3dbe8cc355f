//! Stacked-LSTM forward pass and backpropagation through time.
//!
//! Everything is double precision. The batched pass runs all chunks in
//! lockstep through gemm calls on a single thread, so results are
//! bit-identical run to run: there is no reduction whose order could vary.
//!
//! Gate layout inside each layer's fused weight matrices: rows `0..H` input
//! gate, `H..2H` forget gate, `2H..3H` cell candidate, `3H..4H` output gate.

use ndarray::{s, Array1, Array2, ArrayViewD, ArrayViewMutD, Axis};
use rand::Rng;

use super::CharLmError;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// Input-to-gates weights, shape (4H, H).
    pub wx: Array2<f64>,
    /// Hidden-to-gates weights, shape (4H, H).
    pub wh: Array2<f64>,
    /// Gate biases, shape (4H,).
    pub b: Array1<f64>,
}

/// All model parameters. The embedding width equals the hidden size, so
/// every layer sees an H-dimensional input.
#[derive(Debug, Clone, PartialEq)]
pub struct LSTMParams {
    pub hidden_size: usize,
    /// Character embedding table, shape (V, H).
    pub embedding: Array2<f64>,
    pub layers: Vec<LayerParams>,
    /// Output projection, shape (V, H).
    pub w_out: Array2<f64>,
    /// Output bias, shape (V,).
    pub b_out: Array1<f64>,
}

impl LSTMParams {
    /// Uniform(−scale, scale) initialization of every weight; biases zero.
    pub fn init(
        vocab_size: usize,
        hidden_size: usize,
        layer_count: usize,
        scale: f64,
        rng: &mut impl Rng,
    ) -> LSTMParams {
        let mut mat = |rows: usize, cols: usize| {
            Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-scale..scale))
        };
        let embedding = mat(vocab_size, hidden_size);
        let layers = (0..layer_count)
            .map(|_| LayerParams {
                wx: mat(4 * hidden_size, hidden_size),
                wh: mat(4 * hidden_size, hidden_size),
                b: Array1::zeros(4 * hidden_size),
            })
            .collect();
        let w_out = mat(vocab_size, hidden_size);
        LSTMParams {
            hidden_size,
            embedding,
            layers,
            w_out,
            b_out: Array1::zeros(vocab_size),
        }
    }

    /// All-zero parameters (logits reduce to the output bias).
    pub fn zeros(vocab_size: usize, hidden_size: usize, layer_count: usize) -> LSTMParams {
        let layers = (0..layer_count)
            .map(|_| LayerParams {
                wx: Array2::zeros((4 * hidden_size, hidden_size)),
                wh: Array2::zeros((4 * hidden_size, hidden_size)),
                b: Array1::zeros(4 * hidden_size),
            })
            .collect();
        LSTMParams {
            hidden_size,
            embedding: Array2::zeros((vocab_size, hidden_size)),
            layers,
            w_out: Array2::zeros((vocab_size, hidden_size)),
            b_out: Array1::zeros(vocab_size),
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.nrows()
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Dimension consistency + finiteness of every entry.
    pub fn validate(&self) -> Result<(), CharLmError> {
        let h = self.hidden_size;
        let v = self.vocab_size();
        let ok = self.embedding.dim() == (v, h)
            && self.w_out.dim() == (v, h)
            && self.b_out.len() == v
            && !self.layers.is_empty()
            && self.layers.iter().all(|l| {
                l.wx.dim() == (4 * h, h) && l.wh.dim() == (4 * h, h) && l.b.len() == 4 * h
            });
        if !ok {
            return Err(CharLmError::DimensionMismatch);
        }
        if self.views().iter().any(|t| t.iter().any(|x| !x.is_finite())) {
            return Err(CharLmError::NonFiniteParams);
        }
        Ok(())
    }

    /// Every tensor in fixed order: embedding, then per layer wx/wh/b,
    /// then w_out, b_out. The order matches [`LSTMParams::views`].
    pub fn views(&self) -> Vec<ArrayViewD<'_, f64>> {
        let mut v: Vec<ArrayViewD<'_, f64>> = vec![self.embedding.view().into_dyn()];
        for layer in &self.layers {
            v.push(layer.wx.view().into_dyn());
            v.push(layer.wh.view().into_dyn());
            v.push(layer.b.view().into_dyn());
        }
        v.push(self.w_out.view().into_dyn());
        v.push(self.b_out.view().into_dyn());
        v
    }

    /// Mutable twin of [`Gradients::views`], same tensor order.
    pub fn views_mut(&mut self) -> Vec<ArrayViewMutD<'_, f64>> {
        let mut v: Vec<ArrayViewMutD<'_, f64>> = vec![self.embedding.view_mut().into_dyn()];
        for layer in &mut self.layers {
            v.push(layer.wx.view_mut().into_dyn());
            v.push(layer.wh.view_mut().into_dyn());
            v.push(layer.b.view_mut().into_dyn());
        }
        v.push(self.w_out.view_mut().into_dyn());
        v.push(self.b_out.view_mut().into_dyn());
        v
    }
}

/// Gradients mirroring [`LSTMParams`] tensor for tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub embedding: Array2<f64>,
    pub layers: Vec<LayerParams>,
    pub w_out: Array2<f64>,
    pub b_out: Array1<f64>,
}

impl Gradients {
    pub fn zeros_like(params: &LSTMParams) -> Gradients {
        let zero = LSTMParams::zeros(params.vocab_size(), params.hidden_size, params.layer_count());
        Gradients {
            embedding: zero.embedding,
            layers: zero.layers,
            w_out: zero.w_out,
            b_out: zero.b_out,
        }
    }

    /// sqrt of the sum of squares over every entry of every tensor.
    pub fn global_norm(&self) -> f64 {
        self.views()
            .iter()
            .map(|t| t.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for mut t in self.views_mut() {
            t.mapv_inplace(|x| x * factor);
        }
    }

    /// Every tensor in fixed order: embedding, then per layer wx/wh/b,
    /// then w_out, b_out. Gradient tensors use the same order.
    pub fn views(&self) -> Vec<ArrayViewD<'_, f64>> {
        let mut v: Vec<ArrayViewD<'_, f64>> = vec![self.embedding.view().into_dyn()];
        for layer in &self.layers {
            v.push(layer.wx.view().into_dyn());
            v.push(layer.wh.view().into_dyn());
            v.push(layer.b.view().into_dyn());
        }
        v.push(self.w_out.view().into_dyn());
        v.push(self.b_out.view().into_dyn());
        v
    }

    /// Mutable twin of [`LSTMParams::views`], same tensor order.
    pub fn views_mut(&mut self) -> Vec<ArrayViewMutD<'_, f64>> {
        let mut v: Vec<ArrayViewMutD<'_, f64>> = vec![self.embedding.view_mut().into_dyn()];
        for layer in &mut self.layers {
            v.push(layer.wx.view_mut().into_dyn());
            v.push(layer.wh.view_mut().into_dyn());
            v.push(layer.b.view_mut().into_dyn());
        }
        v.push(self.w_out.view_mut().into_dyn());
        v.push(self.b_out.view_mut().into_dyn());
        v
    }
}

/// Per-layer hidden and cell vectors for stepwise use (sampling, probing).
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<Array1<f64>>,
    pub c: Vec<Array1<f64>>,
}

impl LstmState {
    pub fn zeros(params: &LSTMParams) -> LstmState {
        let h = vec![Array1::zeros(params.hidden_size); params.layer_count()];
        let c = h.clone();
        LstmState { h, c }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Numerically stable softmax of a logit vector.
pub fn softmax(logits: &Array1<f64>) -> Array1<f64> {
    let max = logits.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut out = logits.mapv(|v| (v - max).exp());
    let sum = out.sum();
    out.mapv_inplace(|v| v / sum);
    out
}

fn softmax_rows_inplace(z: &mut Array2<f64>) {
    for mut row in z.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

/// One character through the network: returns logits over the vocabulary
/// and advances `state` in place.
pub fn forward_step(
    params: &LSTMParams,
    state: &mut LstmState,
    char_id: usize,
) -> Result<Array1<f64>, CharLmError> {
    let h = params.hidden_size;
    if char_id >= params.vocab_size() {
        return Err(CharLmError::CharIdOutOfRange(char_id));
    }
    if state.h.len() != params.layer_count()
        || state.h.iter().chain(state.c.iter()).any(|v| v.len() != h)
    {
        return Err(CharLmError::DimensionMismatch);
    }

    let mut x = params.embedding.row(char_id).to_owned();
    for (l, layer) in params.layers.iter().enumerate() {
        let z = layer.wx.dot(&x) + layer.wh.dot(&state.h[l]) + &layer.b;
        let i = z.slice(s![0..h]).mapv(sigmoid);
        let f = z.slice(s![h..2 * h]).mapv(sigmoid);
        let g = z.slice(s![2 * h..3 * h]).mapv(f64::tanh);
        let o = z.slice(s![3 * h..4 * h]).mapv(sigmoid);
        state.c[l] = &f * &state.c[l] + &i * &g;
        state.h[l] = &o * &state.c[l].mapv(f64::tanh);
        x = state.h[l].clone();
    }
    Ok(params.w_out.dot(&x) + &params.b_out)
}

/// Per-timestep, per-layer activations saved by the forward pass.
struct LayerCache {
    x_in: Array2<f64>,
    h_prev: Array2<f64>,
    c_prev: Array2<f64>,
    i: Array2<f64>,
    f: Array2<f64>,
    g: Array2<f64>,
    o: Array2<f64>,
    tanh_c: Array2<f64>,
}

/// Mean cross-entropy and full-BPTT gradients for one chunk of character
/// ids (teacher forcing: position t predicts position t+1).
pub fn loss_and_gradients(
    params: &LSTMParams,
    chunk: &[usize],
) -> Result<(f64, Gradients), CharLmError> {
    let (losses, grads) = loss_and_gradients_batch(params, &[chunk])?;
    Ok((losses[0], grads))
}

/// Batched BPTT over equal-length chunks, run in lockstep. Returns one
/// mean cross-entropy per chunk and the gradient of the batch-mean loss.
pub fn loss_and_gradients_batch(
    params: &LSTMParams,
    chunks: &[&[usize]],
) -> Result<(Vec<f64>, Gradients), CharLmError> {
    let h = params.hidden_size;
    let v = params.vocab_size();
    let l_count = params.layer_count();
    let b_count = chunks.len();
    if b_count == 0 {
        return Err(CharLmError::EmptyBatch);
    }
    let len = chunks[0].len();
    if len < 2 {
        return Err(CharLmError::ChunkTooShort(len));
    }
    if chunks.iter().any(|c| c.len() != len) {
        return Err(CharLmError::DimensionMismatch);
    }
    if chunks.iter().any(|c| c.iter().any(|&id| id >= v)) {
        return Err(CharLmError::CharIdOutOfRange(v));
    }
    let t_count = len - 1;

    // ---- forward ----
    let mut h_state = vec![Array2::<f64>::zeros((b_count, h)); l_count];
    let mut c_state = vec![Array2::<f64>::zeros((b_count, h)); l_count];
    let mut caches: Vec<Vec<LayerCache>> = Vec::with_capacity(t_count);
    let mut probs_per_t: Vec<Array2<f64>> = Vec::with_capacity(t_count);
    let mut loss_per_chunk = vec![0.0f64; b_count];

    for t in 0..t_count {
        let mut x = Array2::zeros((b_count, h));
        for (bi, chunk) in chunks.iter().enumerate() {
            x.row_mut(bi).assign(&params.embedding.row(chunk[t]));
        }
        let mut step_cache = Vec::with_capacity(l_count);
        for (l, layer) in params.layers.iter().enumerate() {
            let z = x.dot(&layer.wx.t()) + h_state[l].dot(&layer.wh.t()) + &layer.b;
            let i = z.slice(s![.., 0..h]).mapv(sigmoid);
            let f = z.slice(s![.., h..2 * h]).mapv(sigmoid);
            let g = z.slice(s![.., 2 * h..3 * h]).mapv(f64::tanh);
            let o = z.slice(s![.., 3 * h..4 * h]).mapv(sigmoid);
            let c_new = &f * &c_state[l] + &i * &g;
            let tanh_c = c_new.mapv(f64::tanh);
            let h_new = &o * &tanh_c;
            step_cache.push(LayerCache {
                x_in: x,
                h_prev: h_state[l].clone(),
                c_prev: c_state[l].clone(),
                i,
                f,
                g,
                o,
                tanh_c,
            });
            c_state[l] = c_new;
            h_state[l] = h_new.clone();
            x = h_new;
        }
        let mut probs = x.dot(&params.w_out.t()) + &params.b_out;
        softmax_rows_inplace(&mut probs);
        for (bi, chunk) in chunks.iter().enumerate() {
            loss_per_chunk[bi] -= probs[[bi, chunk[t + 1]]].ln();
        }
        probs_per_t.push(probs);
        caches.push(step_cache);
    }
    for loss in &mut loss_per_chunk {
        *loss /= t_count as f64;
    }

    // ---- backward ----
    let mut grads = Gradients::zeros_like(params);
    let mut dh_rec = vec![Array2::<f64>::zeros((b_count, h)); l_count];
    let mut dc_rec = vec![Array2::<f64>::zeros((b_count, h)); l_count];
    let inv_scale = 1.0 / (b_count as f64 * t_count as f64);

    for t in (0..t_count).rev() {
        let mut dlogits = probs_per_t[t].clone();
        for (bi, chunk) in chunks.iter().enumerate() {
            dlogits[[bi, chunk[t + 1]]] -= 1.0;
        }
        dlogits.mapv_inplace(|x| x * inv_scale);

        let step_cache = &caches[t];
        let h_top = {
            // top layer's hidden at time t is o ∘ tanh(c), already cached
            let top = &step_cache[l_count - 1];
            &top.o * &top.tanh_c
        };
        grads.w_out = grads.w_out + dlogits.t().dot(&h_top);
        grads.b_out = grads.b_out + dlogits.sum_axis(Axis(0));
        let mut dx = dlogits.dot(&params.w_out);

        for l in (0..l_count).rev() {
            let cache = &step_cache[l];
            let dh = dx + &dh_rec[l];
            let one_minus_tc2 = cache.tanh_c.mapv(|x| 1.0 - x * x);
            let dc = &dc_rec[l] + &(&dh * &cache.o * &one_minus_tc2);
            let dz_o = &dh * &cache.tanh_c * &cache.o * &cache.o.mapv(|x| 1.0 - x);
            let dz_i = &dc * &cache.g * &cache.i * &cache.i.mapv(|x| 1.0 - x);
            let dz_f = &dc * &cache.c_prev * &cache.f * &cache.f.mapv(|x| 1.0 - x);
            let dz_g = &dc * &cache.i * &cache.g.mapv(|x| 1.0 - x * x);

            let mut dz = Array2::zeros((b_count, 4 * h));
            dz.slice_mut(s![.., 0..h]).assign(&dz_i);
            dz.slice_mut(s![.., h..2 * h]).assign(&dz_f);
            dz.slice_mut(s![.., 2 * h..3 * h]).assign(&dz_g);
            dz.slice_mut(s![.., 3 * h..4 * h]).assign(&dz_o);

            let layer_grads = &mut grads.layers[l];
            layer_grads.wx = &layer_grads.wx + &dz.t().dot(&cache.x_in);
            layer_grads.wh = &layer_grads.wh + &dz.t().dot(&cache.h_prev);
            layer_grads.b = &layer_grads.b + &dz.sum_axis(Axis(0));

            dx = dz.dot(&params.layers[l].wx);
            dh_rec[l] = dz.dot(&params.layers[l].wh);
            dc_rec[l] = &dc * &cache.f;
        }

        for (bi, chunk) in chunks.iter().enumerate() {
            grads
                .embedding
                .row_mut(chunk[t])
                .scaled_add(1.0, &dx.row(bi));
        }
    }

    Ok((loss_per_chunk, grads))
}

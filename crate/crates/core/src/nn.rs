//! Recurrent building blocks shared by the attention subnet and the acoustic
//! back end: a stacked LSTM with exact backpropagation through time, a linear
//! projection, and a numerically stable softmax.
//!
//! Everything is f64 and allocation-explicit; caches hold exactly the
//! intermediates the backward pass needs.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One LSTM layer. Gate rows are ordered input, forget, cell, output.
#[derive(Debug, Clone)]
pub struct LstmLayer {
    pub input: usize,
    pub hidden: usize,
    pub w_ih: Vec<f64>, // [4H x input]
    pub w_hh: Vec<f64>, // [4H x hidden]
    pub bias: Vec<f64>, // [4H]
}

impl LstmLayer {
    /// Weights uniform in ±1/sqrt(hidden); forget-gate bias 1.0, others 0.
    pub fn init(input: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = 1.0 / (hidden as f64).sqrt();
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| (rng.random::<f64>() * 2.0 - 1.0) * scale).collect()
        };
        let w_ih = draw(4 * hidden * input);
        let w_hh = draw(4 * hidden * hidden);
        let mut bias = vec![0.0; 4 * hidden];
        bias[hidden..2 * hidden].fill(1.0);
        Self { input, hidden, w_ih, w_hh, bias }
    }

    pub fn zeros_like(&self) -> LstmLayerGrads {
        LstmLayerGrads {
            w_ih: vec![0.0; self.w_ih.len()],
            w_hh: vec![0.0; self.w_hh.len()],
            bias: vec![0.0; self.bias.len()],
        }
    }
}

#[derive(Debug, Clone)]
pub struct LstmLayerGrads {
    pub w_ih: Vec<f64>,
    pub w_hh: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Stack of LSTM layers applied frame-by-frame.
#[derive(Debug, Clone)]
pub struct LstmStack {
    pub layers: Vec<LstmLayer>,
}

impl LstmStack {
    pub fn init(input: usize, hidden: usize, layers: usize, rng: &mut ChaCha8Rng) -> Self {
        assert!(layers >= 1, "LSTM stack needs at least one layer");
        let layers = (0..layers)
            .map(|l| LstmLayer::init(if l == 0 { input } else { hidden }, hidden, rng))
            .collect();
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input
    }

    pub fn hidden_dim(&self) -> usize {
        self.layers.last().unwrap().hidden
    }

    /// Run the stack over `frames` frames of `xs` (flat [frames x input]).
    /// Returns the top layer's hidden states (flat [frames x hidden]) and the
    /// cache required for backpropagation through time.
    pub fn forward(&self, xs: &[f64], frames: usize) -> (Vec<f64>, LstmCache) {
        let input = self.input_dim();
        assert_eq!(xs.len(), frames * input, "LSTM input shape mismatch");

        let mut cache = LstmCache { frames, layers: Vec::with_capacity(self.layers.len()) };
        let mut layer_in: Vec<f64> = xs.to_vec();

        for layer in &self.layers {
            let h = layer.hidden;
            let i_dim = layer.input;
            let mut lc = LayerCache::with_capacity(frames, h, i_dim);
            let mut h_state = vec![0.0; h];
            let mut c_state = vec![0.0; h];
            let mut layer_out = vec![0.0; frames * h];

            for t in 0..frames {
                let x = &layer_in[t * i_dim..(t + 1) * i_dim];
                lc.h_prev.extend_from_slice(&h_state);
                lc.c_prev.extend_from_slice(&c_state);

                for r in 0..4 * h {
                    let mut acc = layer.bias[r];
                    let wi = &layer.w_ih[r * i_dim..(r + 1) * i_dim];
                    for (w, xv) in wi.iter().zip(x) {
                        acc += w * xv;
                    }
                    let wh = &layer.w_hh[r * h..(r + 1) * h];
                    for (w, hv) in wh.iter().zip(&h_state) {
                        acc += w * hv;
                    }
                    lc.scratch_gates[r] = acc;
                }
                for j in 0..h {
                    let ig = sigmoid(lc.scratch_gates[j]);
                    let fg = sigmoid(lc.scratch_gates[h + j]);
                    let gg = lc.scratch_gates[2 * h + j].tanh();
                    let og = sigmoid(lc.scratch_gates[3 * h + j]);
                    let c = fg * c_state[j] + ig * gg;
                    let tc = c.tanh();
                    lc.gate_i.push(ig);
                    lc.gate_f.push(fg);
                    lc.gate_g.push(gg);
                    lc.gate_o.push(og);
                    lc.tanh_c.push(tc);
                    c_state[j] = c;
                    h_state[j] = og * tc;
                }
                layer_out[t * h..(t + 1) * h].copy_from_slice(&h_state);
            }
            lc.inputs = layer_in;
            layer_in = layer_out;
            cache.layers.push(lc);
        }
        (layer_in, cache)
    }

    /// Backpropagation through time. `g_hs` is the loss gradient w.r.t. the
    /// top layer's hidden state at every frame (flat [frames x hidden]).
    /// Returns parameter gradients and the gradient w.r.t. the stack input.
    pub fn backward(&self, cache: &LstmCache, g_hs: &[f64]) -> (Vec<LstmLayerGrads>, Vec<f64>) {
        let frames = cache.frames;
        assert_eq!(g_hs.len(), frames * self.hidden_dim());

        let mut grads: Vec<LstmLayerGrads> =
            self.layers.iter().map(|l| l.zeros_like()).collect();
        let mut g_above: Vec<f64> = g_hs.to_vec();

        for (li, layer) in self.layers.iter().enumerate().rev() {
            let h = layer.hidden;
            let i_dim = layer.input;
            let lc = &cache.layers[li];
            let lg = &mut grads[li];

            let mut dh_next = vec![0.0; h];
            let mut dc_next = vec![0.0; h];
            let mut g_input = vec![0.0; frames * i_dim];
            let mut d_raw = vec![0.0; 4 * h];

            for t in (0..frames).rev() {
                let base = t * h;
                let x = &lc.inputs[t * i_dim..(t + 1) * i_dim];
                for j in 0..h {
                    let ig = lc.gate_i[base + j];
                    let fg = lc.gate_f[base + j];
                    let gg = lc.gate_g[base + j];
                    let og = lc.gate_o[base + j];
                    let tc = lc.tanh_c[base + j];
                    let cp = lc.c_prev[base + j];

                    let dh = g_above[base + j] + dh_next[j];
                    let dc = dh * og * (1.0 - tc * tc) + dc_next[j];

                    d_raw[j] = dc * gg * ig * (1.0 - ig);
                    d_raw[h + j] = dc * cp * fg * (1.0 - fg);
                    d_raw[2 * h + j] = dc * ig * (1.0 - gg * gg);
                    d_raw[3 * h + j] = dh * tc * og * (1.0 - og);
                    dc_next[j] = dc * fg;
                }
                let h_prev = &lc.h_prev[base..base + h];
                dh_next.fill(0.0);
                let gx = &mut g_input[t * i_dim..(t + 1) * i_dim];
                for r in 0..4 * h {
                    let d = d_raw[r];
                    if d == 0.0 {
                        continue;
                    }
                    lg.bias[r] += d;
                    let gw_ih = &mut lg.w_ih[r * i_dim..(r + 1) * i_dim];
                    for (gw, &xv) in gw_ih.iter_mut().zip(x) {
                        *gw += d * xv;
                    }
                    let gw_hh = &mut lg.w_hh[r * h..(r + 1) * h];
                    for (gw, &hv) in gw_hh.iter_mut().zip(h_prev) {
                        *gw += d * hv;
                    }
                    let wi = &layer.w_ih[r * i_dim..(r + 1) * i_dim];
                    for (gxv, &w) in gx.iter_mut().zip(wi) {
                        *gxv += d * w;
                    }
                    let wh = &layer.w_hh[r * h..(r + 1) * h];
                    for (dh, &w) in dh_next.iter_mut().zip(wh) {
                        *dh += d * w;
                    }
                }
            }
            g_above = g_input;
        }
        (grads, g_above)
    }
}

/// Per-layer forward intermediates retained for BPTT.
#[derive(Debug, Clone)]
struct LayerCache {
    inputs: Vec<f64>,  // [frames x input]
    gate_i: Vec<f64>,  // [frames x hidden], post-activation
    gate_f: Vec<f64>,
    gate_g: Vec<f64>,
    gate_o: Vec<f64>,
    tanh_c: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    scratch_gates: Vec<f64>, // [4H], reused per frame
}

impl LayerCache {
    fn with_capacity(frames: usize, hidden: usize, _input: usize) -> Self {
        let n = frames * hidden;
        Self {
            inputs: Vec::new(),
            gate_i: Vec::with_capacity(n),
            gate_f: Vec::with_capacity(n),
            gate_g: Vec::with_capacity(n),
            gate_o: Vec::with_capacity(n),
            tanh_c: Vec::with_capacity(n),
            h_prev: Vec::with_capacity(n),
            c_prev: Vec::with_capacity(n),
            scratch_gates: vec![0.0; 4 * hidden],
        }
    }
}

#[derive(Debug, Clone)]
pub struct LstmCache {
    frames: usize,
    layers: Vec<LayerCache>,
}

impl LstmCache {
    pub fn frames(&self) -> usize {
        self.frames
    }
}

/// Dense projection y = W x + b.
#[derive(Debug, Clone)]
pub struct Linear {
    pub in_dim: usize,
    pub out_dim: usize,
    pub w: Vec<f64>, // [out x in]
    pub b: Vec<f64>, // [out]
}

impl Linear {
    pub fn init(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = 1.0 / (in_dim as f64).sqrt();
        let w = (0..out_dim * in_dim)
            .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * scale)
            .collect();
        Self { in_dim, out_dim, w, b: vec![0.0; out_dim] }
    }

    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self { in_dim, out_dim, w: vec![0.0; out_dim * in_dim], b: vec![0.0; out_dim] }
    }

    /// Apply to every frame of `xs` (flat [frames x in]).
    pub fn forward(&self, xs: &[f64], frames: usize) -> Vec<f64> {
        assert_eq!(xs.len(), frames * self.in_dim);
        let mut out = vec![0.0; frames * self.out_dim];
        for t in 0..frames {
            let x = &xs[t * self.in_dim..(t + 1) * self.in_dim];
            let y = &mut out[t * self.out_dim..(t + 1) * self.out_dim];
            for (o, yv) in y.iter_mut().enumerate() {
                let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
                let mut acc = self.b[o];
                for (w, xv) in row.iter().zip(x) {
                    acc += w * xv;
                }
                *yv = acc;
            }
        }
        out
    }

    /// Gradients for a batch of frames. Returns (gw, gb, g_xs).
    pub fn backward(
        &self,
        xs: &[f64],
        g_ys: &[f64],
        frames: usize,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut gw = vec![0.0; self.w.len()];
        let mut gb = vec![0.0; self.b.len()];
        let mut gx = vec![0.0; xs.len()];
        for t in 0..frames {
            let x = &xs[t * self.in_dim..(t + 1) * self.in_dim];
            let gy = &g_ys[t * self.out_dim..(t + 1) * self.out_dim];
            let gxt = &mut gx[t * self.in_dim..(t + 1) * self.in_dim];
            for (o, &g) in gy.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                gb[o] += g;
                let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
                let grow = &mut gw[o * self.in_dim..(o + 1) * self.in_dim];
                for i in 0..self.in_dim {
                    grow[i] += g * x[i];
                    gxt[i] += g * row[i];
                }
            }
        }
        (gw, gb, gx)
    }
}

/// Exp-normalized with max subtraction; the output sums to 1.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for v in out.iter_mut() {
        *v /= sum;
    }
    out
}

/// Gradient of a loss through softmax: given y = softmax(z) and dL/dy,
/// returns dL/dz = y ∘ (dL/dy - <dL/dy, y>).
pub fn softmax_backward(y: &[f64], gy: &[f64]) -> Vec<f64> {
    let dot: f64 = y.iter().zip(gy).map(|(a, b)| a * b).sum();
    y.iter().zip(gy).map(|(&yv, &gv)| yv * (gv - dot)).collect()
}

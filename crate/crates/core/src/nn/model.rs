use crate::error::{Error, Result};
use crate::rng::CounterRng;

use super::layout::{LayerOffsets, Offsets, ParamLayout, TensorKind};
use super::spec::{Architecture, CnnSpec, ConvStackSpec, MlpSpec};
use super::tensor::Tensor;

/// Network weights in one flat vector plus the layout that names them.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    arch: Architecture,
    layout: ParamLayout,
    offsets: Offsets,
    params: Vec<f64>,
}

/// Uniform Xavier bound.
pub fn xavier_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

pub fn xavier_init(fan_in: usize, fan_out: usize, count: usize, rng: &mut CounterRng) -> Vec<f64> {
    assert!(fan_in > 0 && fan_out > 0, "xavier fans must be positive");
    let b = xavier_bound(fan_in, fan_out);
    (0..count).map(|_| rng.uniform(-b, b)).collect()
}

impl Model {
    pub fn zeros(arch: Architecture) -> Self {
        let (layout, offsets) = ParamLayout::for_architecture(&arch);
        let params = vec![0.0; layout.total];
        Self {
            arch,
            layout,
            offsets,
            params,
        }
    }

    /// Xavier weights in layout order, zero biases.
    pub fn xavier(arch: Architecture, rng: &mut CounterRng) -> Self {
        let mut model = Self::zeros(arch);
        for slot in &model.layout.slots {
            if slot.kind == TensorKind::Weight {
                let w = xavier_init(slot.fans.0, slot.fans.1, slot.len(), rng);
                model.params[slot.range()].copy_from_slice(&w);
            }
        }
        model
    }

    pub fn from_params(arch: Architecture, params: Vec<f64>) -> Result<Self> {
        let mut model = Self::zeros(arch);
        if params.len() != model.params.len() {
            return Err(Error::Shape(format!(
                "{} parameters expected, got {}",
                model.params.len(),
                params.len()
            )));
        }
        model.params = params;
        Ok(model)
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn tensor(&self, name: &str) -> Option<Tensor> {
        let slot = self.layout.slots.iter().find(|s| s.name == name)?;
        Tensor::new(slot.shape.clone(), self.params[slot.range()].to_vec()).ok()
    }

    pub fn set_tensor(&mut self, name: &str, values: &[f64]) -> Result<()> {
        let slot = self
            .layout
            .slots
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::Shape(format!("no tensor named {name}")))?;
        if values.len() != slot.len() {
            return Err(Error::Shape(format!(
                "{name}: {} values expected, got {}",
                slot.len(),
                values.len()
            )));
        }
        let range = slot.range();
        self.params[range].copy_from_slice(values);
        Ok(())
    }

    /// Sum of squared weights, biases excluded.
    pub fn weight_sq_norm(&self) -> f64 {
        self.layout
            .weight_ranges()
            .flat_map(|r| self.params[r].iter())
            .map(|w| w * w)
            .sum()
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_trace(input).output
    }

    fn check_input(&self, input: &[f64]) {
        assert_eq!(
            input.len(),
            self.arch.input_dim(),
            "network input has the wrong length"
        );
    }

    fn forward_trace(&self, input: &[f64]) -> Trace {
        self.check_input(input);
        match &self.arch {
            Architecture::Mlp(m) => {
                let dense = dense_forward(m, &self.offsets.dense, &self.params, input.to_vec());
                Trace {
                    output: dense.output().to_vec(),
                    dense,
                    conv: None,
                }
            }
            Architecture::Cnn(c) => {
                let (sx, sy) = split_cnn_input(c, input);
                let tx = conv_forward(&c.conv, &self.offsets.conv_x, &self.params, sx);
                let ty = conv_forward(&c.conv, &self.offsets.conv_y, &self.params, sy);
                let mut head_in = Vec::with_capacity(c.head().input_dim);
                head_in.extend_from_slice(&input[..c.state_dim]);
                head_in.extend_from_slice(tx.output());
                head_in.extend_from_slice(ty.output());
                let dense = dense_forward(&c.head(), &self.offsets.dense, &self.params, head_in);
                Trace {
                    output: dense.output().to_vec(),
                    dense,
                    conv: Some((tx, ty)),
                }
            }
        }
    }

    /// Adds d(output)/d(params) contracted with `dout` into `grad`.
    pub fn backward(&self, input: &[f64], dout: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let trace = self.forward_trace(input);
        self.backward_from(&trace, dout, grad);
        trace.output
    }

    /// Runs one forward pass, asks `dloss` for the output gradient and
    /// accumulates the parameter gradient. Returns the network output.
    pub fn backprop<F>(&self, input: &[f64], grad: &mut [f64], dloss: F) -> Vec<f64>
    where
        F: FnOnce(&[f64]) -> Vec<f64>,
    {
        let trace = self.forward_trace(input);
        let dout = dloss(&trace.output);
        self.backward_from(&trace, &dout, grad);
        trace.output
    }

    fn backward_from(&self, trace: &Trace, dout: &[f64], grad: &mut [f64]) {
        assert_eq!(grad.len(), self.params.len());
        assert_eq!(dout.len(), self.arch.output_dim());
        match (&self.arch, &trace.conv) {
            (Architecture::Mlp(m), _) => {
                dense_backward(m, &self.offsets.dense, &self.params, &trace.dense, dout, grad, false);
            }
            (Architecture::Cnn(c), Some((tx, ty))) => {
                let dh = dense_backward(
                    &c.head(),
                    &self.offsets.dense,
                    &self.params,
                    &trace.dense,
                    dout,
                    grad,
                    true,
                )
                .expect("head input gradient");
                let n = c.conv.output_len(c.signal_len);
                let dx = &dh[c.state_dim..c.state_dim + n];
                let dy = &dh[c.state_dim + n..];
                conv_backward(&c.conv, &self.offsets.conv_x, &self.params, tx, dx, grad);
                conv_backward(&c.conv, &self.offsets.conv_y, &self.params, ty, dy, grad);
            }
            (Architecture::Cnn(_), None) => unreachable!("cnn trace without conv activations"),
        }
    }
}

fn split_cnn_input<'a>(c: &CnnSpec, input: &'a [f64]) -> (&'a [f64], &'a [f64]) {
    let a = c.state_dim;
    let b = a + c.signal_len;
    (&input[a..b], &input[b..b + c.signal_len])
}

struct Trace {
    output: Vec<f64>,
    dense: DenseTrace,
    conv: Option<(ConvTrace, ConvTrace)>,
}

/// Layer inputs and pre-activations of a dense stack.
struct DenseTrace {
    /// `inputs[k]` feeds layer k; the last entry is the network output.
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
}

impl DenseTrace {
    fn output(&self) -> &[f64] {
        self.inputs.last().expect("non-empty trace")
    }
}

fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Dot product with four interleaved partial sums.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let (a4, a_tail) = a.split_at(a.len() / 4 * 4);
    let (b4, b_tail) = b.split_at(a4.len());
    for (x, y) in a4.chunks_exact(4).zip(b4.chunks_exact(4)) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in a_tail.iter().zip(b_tail) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn affine(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let n_in = x.len();
    for (o, z) in out.iter_mut().enumerate() {
        *z = b[o] + dot(&w[o * n_in..(o + 1) * n_in], x);
    }
}

fn dense_forward(spec: &MlpSpec, offs: &[LayerOffsets], params: &[f64], input: Vec<f64>) -> DenseTrace {
    let dims = spec.layer_dims();
    let last = dims.len() - 1;
    let mut inputs = Vec::with_capacity(dims.len() + 1);
    let mut pre = Vec::with_capacity(dims.len());
    inputs.push(input);
    for (k, (&(n_in, n_out), off)) in dims.iter().zip(offs).enumerate() {
        let w = &params[off.weight..off.weight + n_in * n_out];
        let b = &params[off.bias..off.bias + n_out];
        let mut z = vec![0.0; n_out];
        affine(w, b, &inputs[k], &mut z);
        let h = if k == last {
            z.clone()
        } else {
            z.iter().map(|&v| relu(v)).collect()
        };
        pre.push(z);
        inputs.push(h);
    }
    DenseTrace { inputs, pre }
}

fn dense_backward(
    spec: &MlpSpec,
    offs: &[LayerOffsets],
    params: &[f64],
    trace: &DenseTrace,
    dout: &[f64],
    grad: &mut [f64],
    want_input_grad: bool,
) -> Option<Vec<f64>> {
    let dims = spec.layer_dims();
    let mut delta = dout.to_vec();
    for k in (0..dims.len()).rev() {
        let (n_in, n_out) = dims[k];
        let off = offs[k];
        let x = &trace.inputs[k];
        for o in 0..n_out {
            let d = delta[o];
            grad[off.bias + o] += d;
            if d != 0.0 {
                let g = &mut grad[off.weight + o * n_in..off.weight + (o + 1) * n_in];
                for (gi, xi) in g.iter_mut().zip(x) {
                    *gi += d * xi;
                }
            }
        }
        if k == 0 && !want_input_grad {
            return None;
        }
        let w = &params[off.weight..off.weight + n_in * n_out];
        let mut dx = vec![0.0; n_in];
        for o in 0..n_out {
            let d = delta[o];
            if d != 0.0 {
                for (dxi, wi) in dx.iter_mut().zip(&w[o * n_in..(o + 1) * n_in]) {
                    *dxi += wi * d;
                }
            }
        }
        if k == 0 {
            return Some(dx);
        }
        for (dxi, z) in dx.iter_mut().zip(&trace.pre[k - 1]) {
            if *z <= 0.0 {
                *dxi = 0.0;
            }
        }
        delta = dx;
    }
    None
}

/// Per-layer inputs (channel-major) and pooled pre-activations.
struct ConvTrace {
    inputs: Vec<Vec<f64>>,
    pooled: Vec<Vec<f64>>,
}

impl ConvTrace {
    fn output(&self) -> &[f64] {
        self.inputs.last().expect("non-empty trace")
    }
}

/// Same-padded stride-1 convolution, channel-major buffers.
pub(crate) fn conv1d(w: &[f64], b: &[f64], x: &[f64], cin: usize, cout: usize, k: usize, len: usize) -> Vec<f64> {
    let pad = k / 2;
    let mut z = vec![0.0; cout * len];
    for o in 0..cout {
        let zo = &mut z[o * len..(o + 1) * len];
        zo.iter_mut().for_each(|v| *v = b[o]);
        for c in 0..cin {
            let xc = &x[c * len..(c + 1) * len];
            for j in 0..k {
                let wv = w[(o * cin + c) * k + j];
                // z[t] += w * x[t + j - pad] for valid source indices.
                let lo = pad.saturating_sub(j);
                let hi = (len + pad).saturating_sub(j).min(len);
                for t in lo..hi {
                    zo[t] += wv * xc[t + j - pad];
                }
            }
        }
    }
    z
}

/// Mean over non-overlapping windows; an incomplete tail is dropped.
pub fn avg_pool(x: &[f64], pool: usize) -> Vec<f64> {
    x.chunks_exact(pool)
        .map(|w| w.iter().sum::<f64>() / pool as f64)
        .collect()
}

fn conv_forward(spec: &ConvStackSpec, offs: &[LayerOffsets], params: &[f64], signal: &[f64]) -> ConvTrace {
    let lengths = spec.lengths(signal.len());
    let k = spec.kernel;
    let mut inputs = vec![signal.to_vec()];
    let mut pooled = Vec::with_capacity(spec.channels.len());
    for (layer, ((cin, cout), off)) in spec.layer_channels().into_iter().zip(offs).enumerate() {
        let (len, out_len) = (lengths[layer], lengths[layer + 1]);
        let w = &params[off.weight..off.weight + cout * cin * k];
        let b = &params[off.bias..off.bias + cout];
        let z = conv1d(w, b, &inputs[layer], cin, cout, k, len);
        let mut p = Vec::with_capacity(cout * out_len);
        for o in 0..cout {
            let pooled_o = avg_pool(&z[o * len..(o + 1) * len], spec.pool);
            p.extend_from_slice(&pooled_o[..out_len]);
        }
        let h = p.iter().map(|&v| relu(v)).collect();
        pooled.push(p);
        inputs.push(h);
    }
    ConvTrace { inputs, pooled }
}

fn conv_backward(
    spec: &ConvStackSpec,
    offs: &[LayerOffsets],
    params: &[f64],
    trace: &ConvTrace,
    dout: &[f64],
    grad: &mut [f64],
) {
    let lengths = spec.lengths(trace.inputs[0].len());
    let k = spec.kernel;
    let pad = k / 2;
    let pool = spec.pool;
    let channels = spec.layer_channels();
    let mut dh = dout.to_vec();
    for layer in (0..channels.len()).rev() {
        let (cin, cout) = channels[layer];
        let (len, out_len) = (lengths[layer], lengths[layer + 1]);
        let off = offs[layer];
        let x = &trace.inputs[layer];
        let p = &trace.pooled[layer];
        let mut dz = vec![0.0; cout * len];
        for o in 0..cout {
            for m in 0..out_len {
                let i = o * out_len + m;
                if p[i] > 0.0 {
                    let share = dh[i] / pool as f64;
                    for r in 0..pool {
                        dz[o * len + m * pool + r] = share;
                    }
                }
            }
        }
        let mut dx = if layer > 0 { vec![0.0; cin * len] } else { Vec::new() };
        for o in 0..cout {
            let dzo = &dz[o * len..(o + 1) * len];
            grad[off.bias + o] += dzo.iter().sum::<f64>();
            for c in 0..cin {
                let xc = &x[c * len..(c + 1) * len];
                for j in 0..k {
                    let lo = pad.saturating_sub(j);
                    let hi = (len + pad).saturating_sub(j).min(len);
                    let widx = (o * cin + c) * k + j;
                    grad[off.weight + widx] += dot(&dzo[lo..hi], &xc[lo + j - pad..hi + j - pad]);
                    if layer > 0 {
                        let wv = params[off.weight + widx];
                        let dxc = &mut dx[c * len..(c + 1) * len];
                        for t in lo..hi {
                            dxc[t + j - pad] += wv * dzo[t];
                        }
                    }
                }
            }
        }
        dh = dx;
    }
}

//! Layered reconstruction networks with hand-written forward and backward
//! passes.
//!
//! Activations are flat `f64` buffers. Image tensors use channel-major
//! layout, `index = (channel·h + row)·w + col`. Convolutions are stride 1,
//! zero "same" padding, cross-correlation (no kernel flip).

mod arch;
mod io;
mod train;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StcaError};
use crate::linalg::gemm;
use crate::seed::SeedSpec;

pub use arch::{mnist_net, synthetic_net, Architecture};
pub use io::DECODER_MAGIC;
pub use train::{evaluate, train_decoder, Optimizer, TrainConfig, TrainOutcome, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerSpec {
    Dense {
        input: usize,
        output: usize,
    },
    Conv2d {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
    },
    Relu,
    Tanh,
    Reshape {
        h: usize,
        w: usize,
        c: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Flat(usize),
    Image { c: usize, h: usize, w: usize },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Flat(n) => n,
            Shape::Image { c, h, w } => c * h * w,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layer {
    spec: LayerSpec,
    input: Shape,
    output: Shape,
    weight: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    fn resolve(spec: LayerSpec, input: Shape) -> Result<Layer> {
        let output = match spec {
            LayerSpec::Dense { input: i, output } => {
                if i != input.len() || i == 0 || output == 0 {
                    return Err(StcaError::shape(format!(
                        "dense({i} -> {output}) fed with {} values",
                        input.len()
                    )));
                }
                Shape::Flat(output)
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
            } => match input {
                Shape::Image { c, h, w } if c == in_channels && out_channels > 0 && kernel % 2 == 1 => {
                    Shape::Image { c: out_channels, h, w }
                }
                _ => {
                    return Err(StcaError::shape(format!(
                        "conv2d({in_channels} -> {out_channels}, k={kernel}) needs an odd kernel and a \
                         {in_channels}-channel image, got {input:?}"
                    )))
                }
            },
            LayerSpec::Relu | LayerSpec::Tanh => input,
            LayerSpec::Reshape { h, w, c } => {
                if h * w * c != input.len() || h * w * c == 0 {
                    return Err(StcaError::shape(format!(
                        "reshape({h}, {w}, {c}) of {} values",
                        input.len()
                    )));
                }
                Shape::Image { c, h, w }
            }
        };
        let (wn, bn) = match spec {
            LayerSpec::Dense { input, output } => (input * output, output),
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
            } => (out_channels * in_channels * kernel * kernel, out_channels),
            _ => (0, 0),
        };
        Ok(Layer {
            spec,
            input,
            output,
            weight: vec![0.0; wn],
            bias: vec![0.0; bn],
        })
    }

    fn fan_in(&self) -> usize {
        match self.spec {
            LayerSpec::Dense { input, .. } => input,
            LayerSpec::Conv2d {
                in_channels, kernel, ..
            } => in_channels * kernel * kernel,
            _ => 0,
        }
    }

    fn forward(&self, x: &[f64], batch: usize) -> Vec<f64> {
        let in_len = self.input.len();
        let out_len = self.output.len();
        match self.spec {
            LayerSpec::Dense { input, output } => {
                let mut y = Vec::with_capacity(batch * output);
                for _ in 0..batch {
                    y.extend_from_slice(&self.bias);
                }
                // Y (batch×out) += X (batch×in) · Wᵀ, W stored out×in.
                gemm(
                    batch,
                    input,
                    output,
                    1.0,
                    (x, input as isize, 1),
                    (&self.weight, 1, input as isize),
                    1.0,
                    (&mut y, output as isize, 1),
                );
                y
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
            } => {
                let Shape::Image { h, w, .. } = self.input else { unreachable!() };
                let hw = h * w;
                let rows = in_channels * kernel * kernel;
                let mut cols = vec![0.0; rows * hw];
                let mut y = vec![0.0; batch * out_len];
                for (xs, ys) in x.chunks_exact(in_len).zip(y.chunks_exact_mut(out_len)) {
                    im2col(xs, in_channels, h, w, kernel, &mut cols);
                    for (oc, plane) in ys.chunks_exact_mut(hw).enumerate() {
                        plane.fill(self.bias[oc]);
                    }
                    gemm(
                        out_channels,
                        rows,
                        hw,
                        1.0,
                        (&self.weight, rows as isize, 1),
                        (&cols, hw as isize, 1),
                        1.0,
                        (ys, hw as isize, 1),
                    );
                }
                y
            }
            LayerSpec::Relu => x.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect(),
            LayerSpec::Tanh => x.iter().map(|v| v.tanh()).collect(),
            LayerSpec::Reshape { .. } => x.to_vec(),
        }
    }

    /// Back-propagates `dy` given this layer's input `x` and output `y`.
    /// Returns the input gradient when `need_input` is set.
    fn backward(
        &self,
        x: &[f64],
        y: &[f64],
        dy: &[f64],
        batch: usize,
        grads: &mut LayerGrad,
        need_input: bool,
    ) -> Option<Vec<f64>> {
        let in_len = self.input.len();
        let out_len = self.output.len();
        match self.spec {
            LayerSpec::Dense { input, output } => {
                // dW (out×in) += dYᵀ · X
                gemm(
                    output,
                    batch,
                    input,
                    1.0,
                    (dy, 1, output as isize),
                    (x, input as isize, 1),
                    1.0,
                    (&mut grads.weight, input as isize, 1),
                );
                for row in dy.chunks_exact(output) {
                    for (b, g) in grads.bias.iter_mut().zip(row) {
                        *b += g;
                    }
                }
                need_input.then(|| {
                    let mut dx = vec![0.0; batch * input];
                    gemm(
                        batch,
                        output,
                        input,
                        1.0,
                        (dy, output as isize, 1),
                        (&self.weight, input as isize, 1),
                        0.0,
                        (&mut dx, input as isize, 1),
                    );
                    dx
                })
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
            } => {
                let Shape::Image { h, w, .. } = self.input else { unreachable!() };
                let hw = h * w;
                let rows = in_channels * kernel * kernel;
                let mut cols = vec![0.0; rows * hw];
                let mut dcols = vec![0.0; rows * hw];
                let mut dx = if need_input { vec![0.0; batch * in_len] } else { Vec::new() };
                for s in 0..batch {
                    let xs = &x[s * in_len..(s + 1) * in_len];
                    let dys = &dy[s * out_len..(s + 1) * out_len];
                    im2col(xs, in_channels, h, w, kernel, &mut cols);
                    // dW (cout×rows) += dY (cout×hw) · colsᵀ
                    gemm(
                        out_channels,
                        hw,
                        rows,
                        1.0,
                        (dys, hw as isize, 1),
                        (&cols, 1, hw as isize),
                        1.0,
                        (&mut grads.weight, rows as isize, 1),
                    );
                    for (oc, plane) in dys.chunks_exact(hw).enumerate() {
                        grads.bias[oc] += plane.iter().sum::<f64>();
                    }
                    if need_input {
                        // dcols (rows×hw) = Wᵀ · dY
                        gemm(
                            rows,
                            out_channels,
                            hw,
                            1.0,
                            (&self.weight, 1, rows as isize),
                            (dys, hw as isize, 1),
                            0.0,
                            (&mut dcols, hw as isize, 1),
                        );
                        col2im(&dcols, in_channels, h, w, kernel, &mut dx[s * in_len..(s + 1) * in_len]);
                    }
                }
                need_input.then_some(dx)
            }
            LayerSpec::Relu => need_input.then(|| {
                x.iter()
                    .zip(dy)
                    .map(|(&xi, &g)| if xi > 0.0 { g } else { 0.0 })
                    .collect()
            }),
            LayerSpec::Tanh => need_input.then(|| {
                y.iter().zip(dy).map(|(&yi, &g)| g * (1.0 - yi * yi)).collect()
            }),
            LayerSpec::Reshape { .. } => need_input.then(|| dy.to_vec()),
        }
    }
}

fn im2col(x: &[f64], channels: usize, h: usize, w: usize, k: usize, cols: &mut [f64]) {
    let pad = (k / 2) as isize;
    let hw = h * w;
    for c in 0..channels {
        let plane = &x[c * hw..(c + 1) * hw];
        for ky in 0..k {
            for kx in 0..k {
                let row = (c * k + ky) * k + kx;
                let dst = &mut cols[row * hw..(row + 1) * hw];
                let dy = ky as isize - pad;
                let dx = kx as isize - pad;
                for oy in 0..h {
                    let iy = oy as isize + dy;
                    let line = &mut dst[oy * w..(oy + 1) * w];
                    if iy < 0 || iy >= h as isize {
                        line.fill(0.0);
                        continue;
                    }
                    let src = &plane[iy as usize * w..(iy as usize + 1) * w];
                    let lo = (-dx).max(0) as usize;
                    let hi = (w as isize - dx).min(w as isize).max(0) as usize;
                    line[..lo.min(w)].fill(0.0);
                    if hi > lo {
                        let start = (lo as isize + dx) as usize;
                        line[lo..hi].copy_from_slice(&src[start..start + (hi - lo)]);
                    }
                    line[hi.max(lo)..].fill(0.0);
                }
            }
        }
    }
}

fn col2im(cols: &[f64], channels: usize, h: usize, w: usize, k: usize, dx_out: &mut [f64]) {
    let pad = (k / 2) as isize;
    let hw = h * w;
    for c in 0..channels {
        let plane = &mut dx_out[c * hw..(c + 1) * hw];
        for ky in 0..k {
            for kx in 0..k {
                let row = (c * k + ky) * k + kx;
                let src = &cols[row * hw..(row + 1) * hw];
                let dy = ky as isize - pad;
                let dx = kx as isize - pad;
                for oy in 0..h {
                    let iy = oy as isize + dy;
                    if iy < 0 || iy >= h as isize {
                        continue;
                    }
                    let lo = (-dx).max(0) as usize;
                    let hi = (w as isize - dx).min(w as isize).max(0) as usize;
                    if hi <= lo {
                        continue;
                    }
                    let start = (lo as isize + dx) as usize;
                    let dst = &mut plane[iy as usize * w + start..iy as usize * w + start + (hi - lo)];
                    for (d, s) in dst.iter_mut().zip(&src[oy * w + lo..oy * w + hi]) {
                        *d += s;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LayerGrad {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Parameter gradients of a whole model, one entry per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub(crate) Vec<LayerGrad>);

impl Gradients {
    /// Flattened in the same order as [`DecoderModel::parameters`].
    pub fn flatten(&self) -> Vec<f64> {
        self.0
            .iter()
            .flat_map(|g| g.weight.iter().chain(&g.bias).copied())
            .collect()
    }
}

/// Activations retained by a batched forward pass.
pub struct ForwardCache {
    batch: usize,
    activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("input is always cached")
    }

    pub fn batch(&self) -> usize {
        self.batch
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderModel {
    input_len: usize,
    layers: Vec<Layer>,
}

impl DecoderModel {
    /// Resolves the shape chain without drawing parameters (all zero).
    pub fn zeroed(arch: &[LayerSpec], input_len: usize) -> Result<Self> {
        if input_len == 0 {
            return Err(StcaError::shape("decoder input length must be positive"));
        }
        if arch.is_empty() {
            return Err(StcaError::shape("decoder needs at least one layer"));
        }
        let mut shape = Shape::Flat(input_len);
        let mut layers = Vec::with_capacity(arch.len());
        for &spec in arch {
            let layer = Layer::resolve(spec, shape)?;
            shape = layer.output;
            layers.push(layer);
        }
        Ok(DecoderModel { input_len, layers })
    }

    /// Gaussian initialization: variance `2/fan_in` for layers feeding a
    /// ReLU, `1/fan_in` otherwise; biases start at zero.
    pub fn init(arch: &[LayerSpec], input_len: usize, seed: &SeedSpec) -> Result<Self> {
        let mut model = DecoderModel::zeroed(arch, input_len)?;
        let count = model.layers.len();
        for i in 0..count {
            let fan_in = model.layers[i].fan_in();
            if fan_in == 0 {
                continue;
            }
            let feeds_relu = model.layers[i + 1..]
                .iter()
                .find(|l| !matches!(l.spec, LayerSpec::Reshape { .. }))
                .is_some_and(|l| l.spec == LayerSpec::Relu);
            let gain = if feeds_relu { 2.0 } else { 1.0 };
            let std = (gain / fan_in as f64).sqrt();
            let mut rng = seed.child(format!("layer{i}")).rng();
            for v in model.layers[i].weight.iter_mut() {
                *v = std * rng.sample::<f64, _>(StandardNormal);
            }
        }
        Ok(model)
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.layers.last().map_or(self.input_len, |l| l.output.len())
    }

    pub fn architecture(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(|l| l.spec).collect()
    }

    pub fn ends_with_tanh(&self) -> bool {
        matches!(self.layers.last().map(|l| l.spec), Some(LayerSpec::Tanh))
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    /// All parameters in declaration order: per layer, weights then biases.
    pub fn parameters(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weight.iter().chain(&l.bias).copied())
            .collect()
    }

    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.parameter_count() {
            return Err(StcaError::shape(format!(
                "model has {} parameters, got {}",
                self.parameter_count(),
                values.len()
            )));
        }
        let mut rest = values;
        for l in &mut self.layers {
            let (w, tail) = rest.split_at(l.weight.len());
            l.weight.copy_from_slice(w);
            let (b, tail) = tail.split_at(l.bias.len());
            l.bias.copy_from_slice(b);
            rest = tail;
        }
        Ok(())
    }

    pub(crate) fn zero_gradients(&self) -> Gradients {
        Gradients(
            self.layers
                .iter()
                .map(|l| LayerGrad {
                    weight: vec![0.0; l.weight.len()],
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        )
    }

    pub fn forward(&self, u: &[f64]) -> Result<Vec<f64>> {
        let cache = self.forward_batch(u, 1)?;
        Ok(cache.output().to_vec())
    }

    /// `inputs` holds `batch` samples back to back.
    pub fn forward_batch(&self, inputs: &[f64], batch: usize) -> Result<ForwardCache> {
        if batch == 0 || inputs.len() != batch * self.input_len {
            return Err(StcaError::shape(format!(
                "decoder expects {batch} samples of length {}, got {} values",
                self.input_len,
                inputs.len()
            )));
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(inputs.to_vec());
        for layer in &self.layers {
            let next = layer.forward(activations.last().unwrap(), batch);
            activations.push(next);
        }
        Ok(ForwardCache { batch, activations })
    }

    /// Accumulates parameter gradients of `Σ_s ⟨d_output_s, f(u_s)⟩` into `grads`.
    pub(crate) fn backward_into(&self, cache: &ForwardCache, d_output: &[f64], grads: &mut Gradients) {
        let mut upstream = d_output.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let x = &cache.activations[i];
            let y = &cache.activations[i + 1];
            match layer.backward(x, y, &upstream, cache.batch, &mut grads.0[i], i > 0) {
                Some(dx) => upstream = dx,
                None => break,
            }
        }
    }

    pub fn backward(&self, cache: &ForwardCache, d_output: &[f64]) -> Result<Gradients> {
        if d_output.len() != cache.batch * self.output_len() {
            return Err(StcaError::shape("output gradient has the wrong length"));
        }
        let mut grads = self.zero_gradients();
        self.backward_into(cache, d_output, &mut grads);
        Ok(grads)
    }

    /// Gradient of `Σ_s ⟨d_output_s, f(u_s)⟩` with respect to the inputs.
    pub fn input_gradient(&self, cache: &ForwardCache, d_output: &[f64]) -> Vec<f64> {
        let mut upstream = d_output.to_vec();
        let mut scratch = self.zero_gradients();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let x = &cache.activations[i];
            let y = &cache.activations[i + 1];
            upstream = layer
                .backward(x, y, &upstream, cache.batch, &mut scratch.0[i], true)
                .expect("input gradient requested");
        }
        upstream
    }
}

/// Applies a model to one code.
pub fn forward(model: &DecoderModel, u: &[f64]) -> Result<Vec<f64>> {
    model.forward(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(n: usize, seed: &SeedSpec) -> Vec<f64> {
        let mut rng = seed.rng();
        (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    }

    // Explicit quadruple loop, same-padding cross-correlation.
    fn direct_conv(x: &[f64], cin: usize, h: usize, w: usize, weight: &[f64], bias: &[f64], k: usize) -> Vec<f64> {
        let cout = bias.len();
        let p = (k / 2) as isize;
        let mut y = vec![0.0; cout * h * w];
        for oc in 0..cout {
            for oy in 0..h {
                for ox in 0..w {
                    let mut acc = bias[oc];
                    for ic in 0..cin {
                        for ky in 0..k {
                            for kx in 0..k {
                                let iy = oy as isize + ky as isize - p;
                                let ix = ox as isize + kx as isize - p;
                                if iy >= 0 && ix >= 0 && (iy as usize) < h && (ix as usize) < w {
                                    acc += weight[((oc * cin + ic) * k + ky) * k + kx]
                                        * x[(ic * h + iy as usize) * w + ix as usize];
                                }
                            }
                        }
                    }
                    y[(oc * h + oy) * w + ox] = acc;
                }
            }
        }
        y
    }

    fn loss_and_grads(model: &DecoderModel, u: &[f64], probe: &[f64], batch: usize) -> (f64, Vec<f64>) {
        let cache = model.forward_batch(u, batch).unwrap();
        let loss = cache.output().iter().zip(probe).map(|(a, b)| a * b).sum();
        (loss, model.backward(&cache, probe).unwrap().flatten())
    }

    /// Central differences on `⟨probe, f(u)⟩` over every parameter.
    fn gradient_error(model: &DecoderModel, u: &[f64], batch: usize, seed: u64) -> f64 {
        let probe = gauss(batch * model.output_len(), &SeedSpec::new(seed, "probe"));
        let (_, analytic) = loss_and_grads(model, u, &probe, batch);
        let base = model.parameters();
        let h = 1e-5;
        let mut worst = 0.0f64;
        let mut m = model.clone();
        for i in 0..base.len() {
            let mut p = base.clone();
            p[i] += h;
            m.set_parameters(&p).unwrap();
            let (lp, _) = loss_and_grads(&m, u, &probe, batch);
            p[i] -= 2.0 * h;
            m.set_parameters(&p).unwrap();
            let (lm, _) = loss_and_grads(&m, u, &probe, batch);
            let fd = (lp - lm) / (2.0 * h);
            worst = worst.max((fd - analytic[i]).abs() / analytic[i].abs().max(1e-2));
        }
        worst
    }

    #[test]
    fn identity_dense_passes_input_through() {
        let mut model = DecoderModel::zeroed(&[LayerSpec::Dense { input: 4, output: 4 }], 4).unwrap();
        let mut params = vec![0.0; 20];
        for i in 0..4 {
            params[i * 4 + i] = 1.0;
        }
        model.set_parameters(&params).unwrap();
        assert_eq!(forward(&model, &[1.0, -2.0, 3.0, 0.5]).unwrap(), vec![1.0, -2.0, 3.0, 0.5]);
    }

    #[test]
    fn unit_kernel_conv_is_identity() {
        let arch = [
            LayerSpec::Reshape { h: 3, w: 4, c: 1 },
            LayerSpec::Conv2d { in_channels: 1, out_channels: 1, kernel: 1 },
        ];
        let mut model = DecoderModel::zeroed(&arch, 12).unwrap();
        model.set_parameters(&[1.0, 0.0]).unwrap();
        let x = gauss(12, &SeedSpec::new(1, "img"));
        assert_eq!(model.forward(&x).unwrap(), x);
    }

    #[test]
    fn conv_matches_direct_loop() {
        let (cin, cout, h, w, k) = (2, 3, 5, 5, 3);
        let arch = [
            LayerSpec::Reshape { h, w, c: cin },
            LayerSpec::Conv2d { in_channels: cin, out_channels: cout, kernel: k },
        ];
        let model = DecoderModel::init(&arch, cin * h * w, &SeedSpec::new(2, "init")).unwrap();
        let mut params = model.parameters();
        let bias = gauss(cout, &SeedSpec::new(2, "bias"));
        let nw = params.len() - cout;
        params[nw..].copy_from_slice(&bias);
        let mut model = model;
        model.set_parameters(&params).unwrap();
        let x = gauss(cin * h * w, &SeedSpec::new(2, "x"));
        let expected = direct_conv(&x, cin, h, w, &params[..nw], &bias, k);
        let got = model.forward(&x).unwrap();
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() <= 1e-10);
        }
    }

    #[test]
    fn non_square_conv_matches_direct_loop() {
        let (cin, cout, h, w, k) = (1, 2, 4, 7, 5);
        let arch = [
            LayerSpec::Reshape { h, w, c: cin },
            LayerSpec::Conv2d { in_channels: cin, out_channels: cout, kernel: k },
        ];
        let model = DecoderModel::init(&arch, h * w, &SeedSpec::new(3, "init")).unwrap();
        let params = model.parameters();
        let x = gauss(h * w, &SeedSpec::new(3, "x"));
        let expected = direct_conv(&x, cin, h, w, &params[..params.len() - cout], &params[params.len() - cout..], k);
        for (g, e) in model.forward(&x).unwrap().iter().zip(&expected) {
            assert!((g - e).abs() <= 1e-10);
        }
    }

    #[test]
    fn dense_gradient_check() {
        for t in 0..20 {
            let model = DecoderModel::init(&[LayerSpec::Dense { input: 3, output: 4 }], 3, &SeedSpec::new(t, "d")).unwrap();
            let u = gauss(6, &SeedSpec::new(t, "u"));
            let err = gradient_error(&model, &u, 2, t);
            assert!(err <= 1e-5, "trial {t}: {err}");
        }
    }

    #[test]
    fn conv_gradient_check() {
        let arch = [
            LayerSpec::Dense { input: 5, output: 72 },
            LayerSpec::Reshape { h: 6, w: 6, c: 2 },
            LayerSpec::Conv2d { in_channels: 2, out_channels: 2, kernel: 3 },
        ];
        for t in 0..20 {
            let model = DecoderModel::init(&arch, 5, &SeedSpec::new(t, "c")).unwrap();
            let u = gauss(10, &SeedSpec::new(t, "u"));
            let err = gradient_error(&model, &u, 2, t);
            assert!(err <= 1e-5, "trial {t}: {err}");
        }
    }

    #[test]
    fn activation_derivatives() {
        let arch = [LayerSpec::Tanh];
        let model = DecoderModel::zeroed(&arch, 4).unwrap();
        let x = [-1.5, -0.2, 0.0, 0.7];
        let cache = model.forward_batch(&x, 1).unwrap();
        let d = model.input_gradient(&cache, &[1.0; 4]);
        for (di, xi) in d.iter().zip(x) {
            assert!((di - (1.0 - xi.tanh().powi(2))).abs() < 1e-15);
        }
        let model = DecoderModel::zeroed(&[LayerSpec::Relu], 4).unwrap();
        let cache = model.forward_batch(&x, 1).unwrap();
        assert_eq!(cache.output(), &[0.0, 0.0, 0.0, 0.7]);
        assert_eq!(model.input_gradient(&cache, &[2.0; 4]), vec![0.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn input_gradient_check_through_stack() {
        let arch = [
            LayerSpec::Dense { input: 6, output: 16 },
            LayerSpec::Tanh,
            LayerSpec::Reshape { h: 4, w: 4, c: 1 },
            LayerSpec::Conv2d { in_channels: 1, out_channels: 3, kernel: 3 },
            LayerSpec::Relu,
            LayerSpec::Conv2d { in_channels: 3, out_channels: 1, kernel: 3 },
            LayerSpec::Tanh,
        ];
        for t in 0..20 {
            let model = DecoderModel::init(&arch, 6, &SeedSpec::new(t, "s")).unwrap();
            let u = gauss(6, &SeedSpec::new(t, "u"));
            let probe = gauss(16, &SeedSpec::new(t, "p"));
            let cache = model.forward_batch(&u, 1).unwrap();
            let analytic = model.input_gradient(&cache, &probe);
            let f = |v: &[f64]| -> f64 {
                model.forward(v).unwrap().iter().zip(&probe).map(|(a, b)| a * b).sum()
            };
            let h = 1e-5;
            for i in 0..6 {
                let mut p = u.clone();
                p[i] += h;
                let mut q = u.clone();
                q[i] -= h;
                let fd = (f(&p) - f(&q)) / (2.0 * h);
                assert!((fd - analytic[i]).abs() <= 1e-5 * analytic[i].abs().max(1e-2), "{fd} vs {}", analytic[i]);
            }
            // Full-stack parameter check with every layer type active.
            assert!(gradient_error(&model, &u, 1, t) <= 1e-5);
        }
    }

    #[test]
    fn shape_chain_is_validated() {
        assert!(DecoderModel::zeroed(&[LayerSpec::Dense { input: 3, output: 2 }], 4).is_err());
        assert!(DecoderModel::zeroed(&[LayerSpec::Reshape { h: 2, w: 2, c: 2 }], 7).is_err());
        let conv_on_flat = [LayerSpec::Conv2d { in_channels: 1, out_channels: 1, kernel: 3 }];
        assert!(DecoderModel::zeroed(&conv_on_flat, 9).is_err());
        let even = [
            LayerSpec::Reshape { h: 3, w: 3, c: 1 },
            LayerSpec::Conv2d { in_channels: 1, out_channels: 1, kernel: 2 },
        ];
        assert!(DecoderModel::zeroed(&even, 9).is_err());
        let model = DecoderModel::zeroed(&[LayerSpec::Relu], 3).unwrap();
        assert!(model.forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn init_is_seeded() {
        let arch = synthetic_net(64).layers().to_vec();
        let a = DecoderModel::init(&arch, 64, &SeedSpec::new(1, "init")).unwrap();
        let b = DecoderModel::init(&arch, 64, &SeedSpec::new(1, "init")).unwrap();
        let c = DecoderModel::init(&arch, 64, &SeedSpec::new(2, "init")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.output_len(), 529);
    }
}

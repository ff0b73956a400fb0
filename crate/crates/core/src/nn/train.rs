//! Mini-batch training of reconstruction networks on (code, signal) pairs.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{DecoderModel, Gradients, LayerSpec};
use crate::error::{Result, StcaError};
use crate::seed::SeedSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Optimizer {
    Sgd,
    SgdMomentum { momentum: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: SeedSpec,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 64,
            learning_rate: 1e-3,
            seed: SeedSpec::new(0, "train"),
            optimizer: Optimizer::SgdMomentum { momentum: 0.9 },
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(StcaError::param("batch size must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(StcaError::param(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if let Optimizer::SgdMomentum { momentum } = self.optimizer {
            if !(0.0..1.0).contains(&momentum) {
                return Err(StcaError::param(format!("momentum must lie in [0, 1), got {momentum}")));
            }
        }
        Ok(())
    }
}

/// Training pairs stored back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    input_len: usize,
    target_len: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl TrainingSet {
    pub fn new(input_len: usize, target_len: usize) -> Self {
        TrainingSet {
            input_len,
            target_len,
            inputs: Vec::new(),
            targets: Vec::new(),
        }
    }

    pub fn with_capacity(input_len: usize, target_len: usize, count: usize) -> Self {
        TrainingSet {
            input_len,
            target_len,
            inputs: Vec::with_capacity(count * input_len),
            targets: Vec::with_capacity(count * target_len),
        }
    }

    pub fn push(&mut self, input: &[f64], target: &[f64]) -> Result<()> {
        if input.len() != self.input_len || target.len() != self.target_len {
            return Err(StcaError::shape(format!(
                "pair of lengths ({}, {}) in a set of ({}, {})",
                input.len(),
                target.len(),
                self.input_len,
                self.target_len
            )));
        }
        self.inputs.extend_from_slice(input);
        self.targets.extend_from_slice(target);
        Ok(())
    }

    pub fn len(&self) -> usize {
        if self.input_len == 0 {
            0
        } else {
            self.inputs.len() / self.input_len
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_len..(i + 1) * self.input_len]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.target_len..(i + 1) * self.target_len]
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: DecoderModel,
    /// Mean per-dimension squared error of each epoch, averaged over samples.
    pub losses: Vec<f64>,
}

/// Minimizes the mean squared error `(1/(M·n)) Σ_j ‖f(u_j) − x_j‖²` by
/// mini-batch (momentum) SGD. Sample order per epoch comes from
/// `cfg.seed`, so the result is a pure function of the inputs.
pub fn train_decoder(data: &TrainingSet, arch: &[LayerSpec], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(StcaError::param("training set is empty"));
    }
    let mut model = DecoderModel::init(arch, data.input_len, &cfg.seed.child("init"))?;
    if model.output_len() != data.target_len {
        return Err(StcaError::shape(format!(
            "architecture produces {} values, targets have {}",
            model.output_len(),
            data.target_len
        )));
    }
    let n_out = data.target_len as f64;
    let mut velocity = model.zero_gradients();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut batch_in = Vec::with_capacity(cfg.batch_size * data.input_len);
    let mut batch_tg = Vec::with_capacity(cfg.batch_size * data.target_len);

    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut cfg.seed.child(format!("epoch{epoch}")).rng());
        let mut total = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            batch_in.clear();
            batch_tg.clear();
            for &i in chunk {
                batch_in.extend_from_slice(data.input(i));
                batch_tg.extend_from_slice(data.target(i));
            }
            let b = chunk.len();
            let cache = model.forward_batch(&batch_in, b)?;
            let scale = 2.0 / (b as f64 * n_out);
            let mut sq = 0.0;
            let d_out: Vec<f64> = cache
                .output()
                .iter()
                .zip(&batch_tg)
                .map(|(y, t)| {
                    let e = y - t;
                    sq += e * e;
                    scale * e
                })
                .collect();
            if !sq.is_finite() {
                return Err(StcaError::Divergence(format!("non-finite training loss in epoch {}", epoch + 1)));
            }
            total += sq / n_out;
            let mut grads = model.zero_gradients();
            model.backward_into(&cache, &d_out, &mut grads);
            apply_update(&mut model, &grads, &mut velocity, cfg);
        }
        let epoch_loss = total / data.len() as f64;
        if !epoch_loss.is_finite() {
            return Err(StcaError::Divergence(format!("non-finite training loss in epoch {}", epoch + 1)));
        }
        losses.push(epoch_loss);
    }
    Ok(TrainOutcome { model, losses })
}

fn apply_update(model: &mut DecoderModel, grads: &Gradients, velocity: &mut Gradients, cfg: &TrainConfig) {
    let lr = cfg.learning_rate;
    for ((layer, g), v) in model.layers.iter_mut().zip(&grads.0).zip(velocity.0.iter_mut()) {
        let pairs = [
            (&mut layer.weight, &g.weight, &mut v.weight),
            (&mut layer.bias, &g.bias, &mut v.bias),
        ];
        for (param, grad, vel) in pairs {
            match cfg.optimizer {
                Optimizer::Sgd => {
                    for (p, gi) in param.iter_mut().zip(grad) {
                        *p -= lr * gi;
                    }
                }
                Optimizer::SgdMomentum { momentum } => {
                    for ((p, gi), vi) in param.iter_mut().zip(grad).zip(vel.iter_mut()) {
                        *vi = momentum * *vi + gi;
                        *p -= lr * *vi;
                    }
                }
            }
        }
    }
}

/// Mean per-dimension squared error of `model` over `data`.
pub fn evaluate(model: &DecoderModel, data: &TrainingSet) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..data.len() {
        let y = model.forward(data.input(i))?;
        total += y.iter().zip(data.target(i)).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    Ok(total / (data.len() * data.target_len) as f64)
}

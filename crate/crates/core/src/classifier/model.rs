use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ClassifierError, EncodedTitle, Label};

/// Layer sizes of the title classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub buffer_size: usize,
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub conv_filters: usize,
    pub kernel_size: usize,
    pub dense_units: usize,
}

impl Default for ModelConfig {
    /// 72-character titles over 7-bit ASCII, embed 64, conv 32x5, dense 128.
    fn default() -> Self {
        Self {
            buffer_size: 72,
            vocab_size: 128,
            embed_dim: 64,
            conv_filters: 32,
            kernel_size: 5,
            dense_units: 128,
        }
    }
}

impl ModelConfig {
    /// Small model with the standard kernel size, for tests and gradient checks.
    pub fn tiny(
        buffer_size: usize,
        vocab_size: usize,
        embed_dim: usize,
        conv_filters: usize,
        dense_units: usize,
    ) -> Self {
        Self {
            buffer_size,
            vocab_size,
            embed_dim,
            conv_filters,
            kernel_size: 5,
            dense_units,
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.vocab_size == 0 {
            return Err(ClassifierError::InvalidConfig("vocab_size must be positive"));
        }
        if self.embed_dim == 0 || self.conv_filters == 0 || self.dense_units == 0 {
            return Err(ClassifierError::InvalidConfig("layer widths must be positive"));
        }
        if self.kernel_size == 0 {
            return Err(ClassifierError::InvalidConfig("kernel_size must be positive"));
        }
        if self.buffer_size <= self.kernel_size {
            return Err(ClassifierError::InvalidConfig(
                "buffer_size must exceed kernel_size",
            ));
        }
        Ok(())
    }

    /// Length of the valid-padding convolution output.
    pub fn conv_len(&self) -> usize {
        self.buffer_size + 1 - self.kernel_size
    }

    /// Width of the flattened convolution output feeding the dense layer.
    pub fn flat_len(&self) -> usize {
        self.conv_len() * self.conv_filters
    }

    pub fn parameter_count(&self) -> usize {
        self.vocab_size * self.embed_dim
            + self.kernel_size * self.embed_dim * self.conv_filters
            + self.conv_filters
            + self.flat_len() * self.dense_units
            + self.dense_units
            + self.dense_units
            + 1
    }
}

/// Learnable weights. All tensors are row-major:
///
/// - `embedding`: `vocab_size x embed_dim`
/// - `conv_kernel`: `kernel_size x embed_dim x conv_filters`
/// - `dense_weights`: `flat_len x dense_units`, rows indexed `t * conv_filters + f`
/// - `output_weights`: `dense_units`
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub embedding: Vec<f64>,
    pub conv_kernel: Vec<f64>,
    pub conv_bias: Vec<f64>,
    pub dense_weights: Vec<f64>,
    pub dense_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

/// Gradients share the parameter layout.
pub type Gradients = ModelParams;

impl ModelParams {
    pub fn zeros(config: ModelConfig) -> Self {
        Self {
            config,
            embedding: vec![0.0; config.vocab_size * config.embed_dim],
            conv_kernel: vec![0.0; config.kernel_size * config.embed_dim * config.conv_filters],
            conv_bias: vec![0.0; config.conv_filters],
            dense_weights: vec![0.0; config.flat_len() * config.dense_units],
            dense_bias: vec![0.0; config.dense_units],
            output_weights: vec![0.0; config.dense_units],
            output_bias: 0.0,
        }
    }

    /// Seeded initialization: embedding uniform in (-0.05, 0.05), Glorot
    /// uniform kernels, zero biases.
    pub fn init(config: ModelConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        Self::init_with(config, &mut rng)
    }

    pub fn init_with<R: Rng>(config: ModelConfig, rng: &mut R) -> Self {
        let mut params = Self::zeros(config);
        let k = config.kernel_size;
        fill_uniform(rng, &mut params.embedding, 0.05);
        fill_uniform(
            rng,
            &mut params.conv_kernel,
            glorot(k * config.embed_dim, k * config.conv_filters),
        );
        fill_uniform(
            rng,
            &mut params.dense_weights,
            glorot(config.flat_len(), config.dense_units),
        );
        fill_uniform(rng, &mut params.output_weights, glorot(config.dense_units, 1));
        params
    }

    /// Same shape, all zeros.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.config)
    }

    /// Every tensor as a flat slice, in a fixed order.
    pub fn tensors(&self) -> [&[f64]; 7] {
        [
            &self.embedding,
            &self.conv_kernel,
            &self.conv_bias,
            &self.dense_weights,
            &self.dense_bias,
            &self.output_weights,
            core::slice::from_ref(&self.output_bias),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 7] {
        [
            &mut self.embedding,
            &mut self.conv_kernel,
            &mut self.conv_bias,
            &mut self.dense_weights,
            &mut self.dense_bias,
            &mut self.output_weights,
            core::slice::from_mut(&mut self.output_bias),
        ]
    }

    pub fn check_shapes(&self) -> Result<(), ClassifierError> {
        self.config.validate()?;
        let c = &self.config;
        let expected = [
            c.vocab_size * c.embed_dim,
            c.kernel_size * c.embed_dim * c.conv_filters,
            c.conv_filters,
            c.flat_len() * c.dense_units,
            c.dense_units,
            c.dense_units,
            1,
        ];
        for (have, want) in self.tensors().iter().zip(expected) {
            if have.len() != want {
                return Err(ClassifierError::ShapeMismatch(
                    "tensor length does not match config",
                ));
            }
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    fn embedding_row(&self, code: u32) -> &[f64] {
        let e = self.config.embed_dim;
        let start = code as usize * e;
        &self.embedding[start..start + e]
    }
}

fn glorot(fan_in: usize, fan_out: usize) -> f64 {
    libm::sqrt(6.0 / (fan_in + fan_out) as f64)
}

fn fill_uniform<R: Rng>(rng: &mut R, values: &mut [f64], limit: f64) {
    for v in values {
        *v = rng.gen_range(-limit..limit);
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Largest double below one.
const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

/// Per-example activations kept for the backward pass.
pub(crate) struct Activations {
    conv: Vec<f64>,
    hidden: Vec<f64>,
    probability: f64,
}

impl Activations {
    fn new(config: &ModelConfig) -> Self {
        Self {
            conv: vec![0.0; config.flat_len()],
            hidden: vec![0.0; config.dense_units],
            probability: 0.5,
        }
    }
}

fn check_input(params: &ModelParams, title: &EncodedTitle) -> Result<(), ClassifierError> {
    if title.len() != params.config.buffer_size {
        return Err(ClassifierError::ShapeMismatch(
            "encoded title length differs from buffer_size",
        ));
    }
    if title
        .codes
        .iter()
        .any(|&c| c as usize >= params.config.vocab_size)
    {
        return Err(ClassifierError::ShapeMismatch("code outside vocabulary"));
    }
    Ok(())
}

fn forward_one(params: &ModelParams, title: &EncodedTitle, act: &mut Activations) {
    let cfg = &params.config;
    let (e, f, u) = (cfg.embed_dim, cfg.conv_filters, cfg.dense_units);

    for t in 0..cfg.conv_len() {
        let out = &mut act.conv[t * f..(t + 1) * f];
        out.copy_from_slice(&params.conv_bias);
        for k in 0..cfg.kernel_size {
            let emb = params.embedding_row(title.codes[t + k]);
            let base = k * e * f;
            for (d, &x) in emb.iter().enumerate() {
                let row = &params.conv_kernel[base + d * f..base + (d + 1) * f];
                for (o, &w) in out.iter_mut().zip(row) {
                    *o += x * w;
                }
            }
        }
        for o in out.iter_mut() {
            *o = o.max(0.0);
        }
    }

    act.hidden.copy_from_slice(&params.dense_bias);
    for (i, &x) in act.conv.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let row = &params.dense_weights[i * u..(i + 1) * u];
        for (h, &w) in act.hidden.iter_mut().zip(row) {
            *h += x * w;
        }
    }
    let mut logit = params.output_bias;
    for (h, &w) in act.hidden.iter_mut().zip(&params.output_weights) {
        *h = h.max(0.0);
        logit += *h * w;
    }
    act.probability = sigmoid(logit).clamp(f64::MIN_POSITIVE, ONE_MINUS_ULP);
}

/// Probability of the real class for every title in the batch.
pub fn forward(params: &ModelParams, batch: &[EncodedTitle]) -> Result<Vec<f64>, ClassifierError> {
    if batch.is_empty() {
        return Err(ClassifierError::EmptyInput);
    }
    params.check_shapes()?;
    let mut act = Activations::new(&params.config);
    batch
        .iter()
        .map(|title| {
            check_input(params, title)?;
            forward_one(params, title, &mut act);
            Ok(act.probability)
        })
        .collect()
}

/// Accumulates `scale * dL/dtheta` for one example into `grads`.
///
/// `dL/dlogit = p - y` is the derivative of the unclamped cross-entropy; the
/// clamp in [`super::bce_loss`] only matters once `p` is within `1e-7` of 0 or 1.
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn backward_one(
    params: &ModelParams,
    title: &EncodedTitle,
    label: Label,
    act: &Activations,
    scale: f64,
    grads: &mut Gradients,
    d_conv: &mut [f64],
    d_hidden: &mut [f64],
) {
    let cfg = &params.config;
    let (e, f, u) = (cfg.embed_dim, cfg.conv_filters, cfg.dense_units);

    let d_logit = (act.probability - label.as_f64()) * scale;
    grads.output_bias += d_logit;
    for j in 0..u {
        grads.output_weights[j] += d_logit * act.hidden[j];
        d_hidden[j] = if act.hidden[j] > 0.0 {
            d_logit * params.output_weights[j]
        } else {
            0.0
        };
        grads.dense_bias[j] += d_hidden[j];
    }

    for (i, &x) in act.conv.iter().enumerate() {
        if x <= 0.0 {
            // ReLU was inactive: no gradient flows back and the weight
            // gradient x * dh is zero.
            d_conv[i] = 0.0;
            continue;
        }
        let row = &params.dense_weights[i * u..(i + 1) * u];
        let grad_row = &mut grads.dense_weights[i * u..(i + 1) * u];
        let mut acc = 0.0;
        for ((g, &w), &dh) in grad_row.iter_mut().zip(row).zip(d_hidden.iter()) {
            *g += x * dh;
            acc += w * dh;
        }
        d_conv[i] = acc;
    }

    for t in 0..cfg.conv_len() {
        let dc = &d_conv[t * f..(t + 1) * f];
        if dc.iter().all(|&g| g == 0.0) {
            continue;
        }
        for (b, &g) in grads.conv_bias.iter_mut().zip(dc) {
            *b += g;
        }
        for k in 0..cfg.kernel_size {
            let code = title.codes[t + k] as usize;
            let base = k * e * f;
            for d in 0..e {
                let x = params.embedding[code * e + d];
                let w_row = &params.conv_kernel[base + d * f..base + (d + 1) * f];
                let gw_row = &mut grads.conv_kernel[base + d * f..base + (d + 1) * f];
                let mut acc = 0.0;
                for ((gw, &w), &g) in gw_row.iter_mut().zip(w_row).zip(dc) {
                    *gw += x * g;
                    acc += w * g;
                }
                grads.embedding[code * e + d] += acc;
            }
        }
    }
}

/// Mean BCE over the batch, its gradients, and the forward probabilities.
pub(crate) fn loss_and_gradients(
    params: &ModelParams,
    batch: &[EncodedTitle],
    labels: &[Label],
) -> Result<(f64, Gradients, Vec<f64>), ClassifierError> {
    if batch.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            left: batch.len(),
            right: labels.len(),
        });
    }
    if batch.is_empty() {
        return Err(ClassifierError::EmptyInput);
    }
    params.check_shapes()?;
    let cfg = params.config;
    let mut grads = params.zeros_like();
    let mut act = Activations::new(&cfg);
    let mut d_conv = vec![0.0; cfg.flat_len()];
    let mut d_hidden = vec![0.0; cfg.dense_units];
    let scale = 1.0 / batch.len() as f64;
    let mut probs = Vec::with_capacity(batch.len());
    for (title, &label) in batch.iter().zip(labels) {
        check_input(params, title)?;
        forward_one(params, title, &mut act);
        backward_one(
            params,
            title,
            label,
            &act,
            scale,
            &mut grads,
            &mut d_conv,
            &mut d_hidden,
        );
        probs.push(act.probability);
    }
    let loss = super::bce_loss(&probs, labels)?;
    Ok((loss, grads, probs))
}

/// Analytical gradients of the mean binary cross-entropy over the batch.
pub fn backward(
    params: &ModelParams,
    batch: &[EncodedTitle],
    labels: &[Label],
) -> Result<Gradients, ClassifierError> {
    loss_and_gradients(params, batch, labels).map(|(_, grads, _)| grads)
}

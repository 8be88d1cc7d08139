use super::{Gradients, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: ModelParams,
    pub v: ModelParams,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            m: params.zeros_like(),
            v: params.zeros_like(),
        }
    }
}

/// One bias-corrected Adam update over a flat parameter slice.
///
/// # Panics
///
/// If `t == 0` or the slices differ in length.
pub fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    config: &AdamConfig,
    t: u64,
) {
    assert!(t >= 1, "adam step index starts at 1");
    assert!(
        params.len() == grads.len() && m.len() == grads.len() && v.len() == grads.len(),
        "adam tensors must have equal length"
    );
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        eps,
    } = *config;
    let bias1 = 1.0 - libm::pow(beta1, t as f64);
    let bias2 = 1.0 - libm::pow(beta2, t as f64);
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / bias1;
        let v_hat = v[i] / bias2;
        params[i] -= learning_rate * m_hat / (libm::sqrt(v_hat) + eps);
    }
}

/// Applies [`adam_update`] to every tensor of the model.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut AdamState,
    config: &AdamConfig,
    t: u64,
) {
    let AdamState { m, v } = state;
    for (((p, g), m), v) in params
        .tensors_mut()
        .into_iter()
        .zip(grads.tensors())
        .zip(m.tensors_mut())
        .zip(v.tensors_mut())
    {
        adam_update(p, g, m, v, config, t);
    }
}

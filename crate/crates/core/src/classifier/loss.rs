use super::{ClassifierError, Label};

/// Probabilities are clamped into `[eps, 1 - eps]` before taking logs.
pub const PROB_CLAMP_EPS: f64 = 1e-7;

/// Mean binary cross-entropy `-[y ln p + (1 - y) ln(1 - p)]`.
pub fn bce_loss(probabilities: &[f64], labels: &[Label]) -> Result<f64, ClassifierError> {
    if probabilities.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            left: probabilities.len(),
            right: labels.len(),
        });
    }
    if probabilities.is_empty() {
        return Err(ClassifierError::EmptyInput);
    }
    let total: f64 = probabilities
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_CLAMP_EPS, 1.0 - PROB_CLAMP_EPS);
            match y {
                Label::Real => -libm::log(p),
                Label::Fake => -libm::log(1.0 - p),
            }
        })
        .sum();
    Ok(total / probabilities.len() as f64)
}

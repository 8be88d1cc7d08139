use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::loss_and_gradients;
use super::{
    adam_step, bce_loss, encode_title, evaluate, forward, stratified_split, AdamConfig,
    AdamState, ClassifierError, EncodedTitle, Label, MetricsReport, ModelConfig, ModelParams,
    TitleExample,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Fraction of each class used for training.
    pub split_ratio: f64,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 64,
            split_ratio: 0.8,
            adam: AdamConfig::default(),
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.batch_size == 0 {
            return Err(ClassifierError::InvalidTrainConfig("batch_size must be positive"));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(ClassifierError::InvalidTrainConfig("split ratio must be in (0, 1)"));
        }
        if self.adam.learning_rate.is_nan() || self.adam.learning_rate <= 0.0 {
            return Err(ClassifierError::InvalidTrainConfig("learning rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
    pub steps: u64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub report: MetricsReport,
    pub epochs: Vec<EpochStats>,
    pub train_size: usize,
    pub validation_size: usize,
}

/// Trains from a seeded initialization and reports validation metrics.
pub fn train(
    dataset: &[TitleExample],
    model: &ModelConfig,
    config: &TrainConfig,
) -> Result<TrainOutcome, ClassifierError> {
    train_with(dataset, model, config, |_| {})
}

/// [`train`] with a callback after every epoch.
///
/// Each epoch shuffles the training set with a generator keyed by
/// `(seed, epoch)`, so a run is reproducible bit for bit.
pub fn train_with(
    dataset: &[TitleExample],
    model: &ModelConfig,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome, ClassifierError> {
    model.validate()?;
    config.validate()?;
    let (train_set, validation_set) = stratified_split(dataset, config.split_ratio, config.seed)?;
    let encode = |set: &[TitleExample]| -> (Vec<EncodedTitle>, Vec<Label>) {
        set.iter()
            .map(|ex| (encode_title(&ex.text, model), ex.label))
            .unzip()
    };
    let (train_x, train_y) = encode(&train_set);
    let (val_x, val_y) = encode(&validation_set);

    let mut params = ModelParams::init(*model, config.seed);
    let mut state = AdamState::new(&params);
    let mut step = 0u64;
    let mut order: Vec<usize> = (0..train_x.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut batch_x = Vec::with_capacity(config.batch_size);
    let mut batch_y = Vec::with_capacity(config.batch_size);

    for epoch in 0..config.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(2 + epoch as u64);
        order.sort_unstable();
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            batch_x.clear();
            batch_y.clear();
            batch_x.extend(chunk.iter().map(|&i| train_x[i].clone()));
            batch_y.extend(chunk.iter().map(|&i| train_y[i]));
            let (loss, grads, _) = loss_and_gradients(&params, &batch_x, &batch_y)?;
            loss_sum += loss * chunk.len() as f64;
            step += 1;
            adam_step(&mut params, &grads, &mut state, &config.adam, step);
        }
        let val_probs = forward(&params, &val_x)?;
        let stats = EpochStats {
            epoch: epoch + 1,
            train_loss: loss_sum / train_x.len() as f64,
            validation_loss: bce_loss(&val_probs, &val_y)?,
            steps: step,
        };
        on_epoch(&stats);
        history.push(stats);
    }

    let validation: Vec<(EncodedTitle, Label)> = val_x.into_iter().zip(val_y).collect();
    let report = evaluate(&params, &validation)?;
    Ok(TrainOutcome {
        params,
        report,
        epochs: history,
        train_size: train_set.len(),
        validation_size: validation_set.len(),
    })
}

/// Label and real-class probability for one title; `p >= 0.5` is real.
pub fn predict_label(params: &ModelParams, text: &str) -> Result<(Label, f64), ClassifierError> {
    let encoded = encode_title(text, &params.config);
    let p = forward(params, core::slice::from_ref(&encoded))?[0];
    Ok((Label::from_probability(p), p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_rule() {
        assert_eq!(Label::from_probability(0.9), Label::Real);
        assert_eq!(Label::from_probability(0.2), Label::Fake);
        assert_eq!(Label::from_probability(0.5), Label::Real);
    }

    #[test]
    fn zero_weights_predict_real_at_one_half() {
        let params = ModelParams::zeros(ModelConfig::default());
        assert_eq!(predict_label(&params, "Anything").unwrap(), (Label::Real, 0.5));
    }

    #[test]
    fn rejects_bad_train_config() {
        let data = [
            TitleExample::new("a b c d e f", Label::Fake).unwrap(),
            TitleExample::new("g h i j k l", Label::Real).unwrap(),
        ];
        let cfg = TrainConfig { batch_size: 0, ..TrainConfig::default() };
        assert!(train(&data, &ModelConfig::default(), &cfg).is_err());
    }
}

//! Fake-news title classifier.
//!
//! Titles are padded or truncated to a fixed buffer, mapped to ASCII codes and
//! run through `embed -> conv1d(valid, ReLU) -> flatten -> dense(ReLU) ->
//! sigmoid`. Training is mini-batch Adam on mean binary cross-entropy with
//! hand-written gradients.

mod adam;
mod encode;
mod loss;
mod metrics;
mod model;
mod split;
mod train;

use alloc::string::String;

pub use adam::{adam_step, adam_update, AdamConfig, AdamState};
pub use encode::{encode_title, EncodedTitle, PADDING_CODE, REPLACEMENT_CODE};
pub use loss::{bce_loss, PROB_CLAMP_EPS};
pub use metrics::{
    auc, evaluate, metrics_from_scores, ClassMetrics, Confusion, MetricsReport,
};
pub use model::{backward, forward, Gradients, ModelConfig, ModelParams};
pub use split::{stratified_split, stratified_split_counts};
pub use train::{predict_label, train, train_with, EpochStats, TrainConfig, TrainOutcome};

/// Binary class of a title. Fake is the negative class, real the positive one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Fake = 0,
    Real = 1,
}

impl Label {
    pub fn from_probability(p: f64) -> Self {
        if p >= 0.5 {
            Label::Real
        } else {
            Label::Fake
        }
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Label::Fake),
            1 => Some(Label::Real),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        self as u8 as f64
    }

    pub fn is_real(self) -> bool {
        self == Label::Real
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TitleExample {
    pub text: String,
    pub label: Label,
}

impl TitleExample {
    /// Rejects titles that are blank after trimming.
    pub fn new(text: impl Into<String>, label: Label) -> Result<Self, ClassifierError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(ClassifierError::EmptyTitle);
        }
        Ok(Self { text, label })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifierError {
    #[error("invalid model config: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid train config: {0}")]
    InvalidTrainConfig(&'static str),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("title is empty")]
    EmptyTitle,
    #[error("dataset has no {0:?} examples")]
    MissingClass(Label),
}

use alloc::vec::Vec;

use super::{forward, ClassifierError, EncodedTitle, Label, ModelParams};

/// Counts with `Real` as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl Confusion {
    pub fn from_predictions(predicted: &[Label], actual: &[Label]) -> Self {
        let mut c = Self::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (Label::Real, Label::Real) => c.true_pos += 1,
                (Label::Real, Label::Fake) => c.false_pos += 1,
                (Label::Fake, Label::Real) => c.false_neg += 1,
                (Label::Fake, Label::Fake) => c.true_neg += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// The same counts with the fake class taken as positive.
    pub fn flipped(&self) -> Self {
        Self {
            true_pos: self.true_neg,
            false_pos: self.false_neg,
            false_neg: self.false_pos,
            true_neg: self.true_pos,
        }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.true_pos + self.true_neg, self.total())
    }

    /// Positive-class metrics; zero where the denominator is zero.
    pub fn class_metrics(&self) -> ClassMetrics {
        let precision = ratio(self.true_pos, self.true_pos + self.false_pos);
        let recall = ratio(self.true_pos, self.true_pos + self.false_neg);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            precision,
            recall,
            f1,
            support: self.true_pos + self.false_neg,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Validation metrics at threshold 0.5.
///
/// `auc` is `None` when only one class is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub fake: ClassMetrics,
    pub real: ClassMetrics,
    pub auc: Option<f64>,
    pub confusion: Confusion,
}

impl MetricsReport {
    /// Precision of the positive (real) class.
    pub fn precision(&self) -> f64 {
        self.real.precision
    }

    pub fn recall(&self) -> f64 {
        self.real.recall
    }

    pub fn f1(&self) -> f64 {
        self.real.f1
    }

    pub fn support_fake(&self) -> usize {
        self.fake.support
    }

    pub fn support_real(&self) -> usize {
        self.real.support
    }
}

/// Rank-based (Mann-Whitney) area under the ROC curve, `Real` positive.
/// Tied scores share their average rank, so each tied pair counts 1/2.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64, ClassifierError> {
    if scores.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let n_pos = labels.iter().filter(|l| l.is_real()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 {
        return Err(ClassifierError::MissingClass(Label::Real));
    }
    if n_neg == 0 {
        return Err(ClassifierError::MissingClass(Label::Fake));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1..=j share their mean
        let mean_rank = (i + 1 + j) as f64 / 2.0;
        let positives = order[i..j].iter().filter(|&&k| labels[k].is_real()).count();
        pos_rank_sum += mean_rank * positives as f64;
        i = j;
    }
    let n_pos = n_pos as f64;
    let u = pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0;
    Ok(u / (n_pos * n_neg as f64))
}

/// Metrics for real-class probabilities against true labels.
pub fn metrics_from_scores(
    probabilities: &[f64],
    labels: &[Label],
) -> Result<MetricsReport, ClassifierError> {
    if probabilities.len() != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            left: probabilities.len(),
            right: labels.len(),
        });
    }
    if probabilities.is_empty() {
        return Err(ClassifierError::EmptyInput);
    }
    let predicted: Vec<Label> = probabilities
        .iter()
        .map(|&p| Label::from_probability(p))
        .collect();
    let confusion = Confusion::from_predictions(&predicted, labels);
    Ok(MetricsReport {
        accuracy: confusion.accuracy(),
        fake: confusion.flipped().class_metrics(),
        real: confusion.class_metrics(),
        auc: auc(probabilities, labels).ok(),
        confusion,
    })
}

/// Runs the model over `dataset` and scores its predictions.
pub fn evaluate(
    params: &ModelParams,
    dataset: &[(EncodedTitle, Label)],
) -> Result<MetricsReport, ClassifierError> {
    if dataset.is_empty() {
        return Err(ClassifierError::EmptyInput);
    }
    let (inputs, labels): (Vec<EncodedTitle>, Vec<Label>) = dataset.iter().cloned().unzip();
    let probs = forward(params, &inputs)?;
    metrics_from_scores(&probs, &labels)
}

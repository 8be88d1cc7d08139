use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;

use super::Tool;
use crate::classifier::{predict_label, Label, ModelParams};

/// `headline assessed as REAL (p=0.93)`; the label follows the 0.5 rule.
pub fn fact_check_observation(probability: f64) -> String {
    let verdict = match Label::from_probability(probability) {
        Label::Real => "REAL",
        Label::Fake => "FAKE",
    };
    format!("headline assessed as {verdict} (p={probability:.2})")
}

/// Runs the title classifier over a headline.
#[derive(Debug, Clone, Default)]
pub struct FactCheckTool {
    params: Option<Arc<ModelParams>>,
}

impl FactCheckTool {
    pub fn new(params: Arc<ModelParams>) -> Self {
        Self {
            params: Some(params),
        }
    }

    /// A tool with no model; every call reports the checker unavailable.
    pub fn unloaded() -> Self {
        Self { params: None }
    }
}

impl Tool for FactCheckTool {
    fn name(&self) -> &str {
        "fact_check"
    }

    fn description(&self) -> &str {
        "Judges whether a single headline reads as real or fake; input is the headline."
    }

    fn invoke(&self, input: &str) -> String {
        let Some(params) = &self.params else {
            return "fact check unavailable: model not loaded".into();
        };
        let headline = input.trim();
        if headline.is_empty() {
            return "fact check needs a headline".into();
        }
        match predict_label(params, headline) {
            Ok((_, p)) => fact_check_observation(p),
            Err(e) => format!("fact check unavailable: {e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::ModelConfig;

    #[test]
    fn formatting_and_threshold() {
        assert_eq!(fact_check_observation(0.93), "headline assessed as REAL (p=0.93)");
        assert_eq!(fact_check_observation(0.12), "headline assessed as FAKE (p=0.12)");
        assert_eq!(fact_check_observation(0.5), "headline assessed as REAL (p=0.50)");
    }

    #[test]
    fn unloaded_model() {
        assert_eq!(
            FactCheckTool::unloaded().invoke("Something happened"),
            "fact check unavailable: model not loaded"
        );
    }

    #[test]
    fn zero_model_is_a_coin_flip_read_as_real() {
        let tool = FactCheckTool::new(Arc::new(ModelParams::zeros(ModelConfig::default())));
        assert_eq!(tool.invoke("Moon made of cheese"), "headline assessed as REAL (p=0.50)");
    }
}

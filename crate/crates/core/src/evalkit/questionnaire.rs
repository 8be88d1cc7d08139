use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{EvalError, SDResponse, ScaleValue};

/// A single-choice question.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuestionnaireItem {
    pub id: String,
    pub prompt: String,
    pub choices: Vec<String>,
}

/// A question answered on the [-3, 3] scale between two opposite adjectives.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ScaledItem {
    pub id: String,
    pub prompt: String,
    /// Adjective at -3.
    pub negative: String,
    /// Adjective at +3.
    pub positive: String,
}

/// Static schema of the participant questionnaire.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Questionnaire {
    pub title: String,
    pub demographics: Vec<String>,
    pub preference: QuestionnaireItem,
    pub items: Vec<ScaledItem>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Demographics {
    #[serde(default)]
    pub gender: Option<String>,
    #[serde(default)]
    pub age: Option<u32>,
    #[serde(default)]
    pub education: Option<String>,
}

/// A filled-in questionnaire as posted by the console.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuestionnaireSubmission {
    pub respondent: String,
    #[serde(default)]
    pub demographics: Demographics,
    /// Chosen option of the preference question, 1-based.
    #[serde(default)]
    pub preference: Option<u32>,
    /// Scaled answers keyed by item id.
    pub ratings: BTreeMap<String, i64>,
}

impl QuestionnaireSubmission {
    /// Checks the submission against `schema` and returns one response per
    /// scaled item, in schema order.
    pub fn to_sd_responses(&self, schema: &Questionnaire) -> Result<Vec<SDResponse>, EvalError> {
        if self.respondent.trim().is_empty() {
            return Err(EvalError::MissingItem("respondent".into()));
        }
        if let Some(choice) = self.preference {
            if choice == 0 || choice as usize > schema.preference.choices.len() {
                return Err(EvalError::InvalidChoice(format!("{choice}")));
            }
        }
        if let Some(unknown) = self
            .ratings
            .keys()
            .find(|k| !schema.items.iter().any(|i| &i.id == *k))
        {
            return Err(EvalError::UnknownItem(unknown.clone()));
        }
        schema
            .items
            .iter()
            .map(|item| {
                let v = self
                    .ratings
                    .get(&item.id)
                    .ok_or_else(|| EvalError::MissingItem(item.id.clone()))?;
                Ok(SDResponse {
                    item: item.id.clone(),
                    rating: ScaleValue::new(*v)?,
                    respondent: self.respondent.trim().into(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn schema() -> Questionnaire {
        Questionnaire {
            title: "t".into(),
            demographics: vec!["gender".into()],
            preference: QuestionnaireItem {
                id: "q2".into(),
                prompt: "p".into(),
                choices: vec!["a".into(), "b".into(), "c".into()],
            },
            items: vec![
                ScaledItem {
                    id: "relevance".into(),
                    prompt: "p".into(),
                    negative: "irrelevant".into(),
                    positive: "relevant".into(),
                },
                ScaledItem {
                    id: "bias".into(),
                    prompt: "p".into(),
                    negative: "biased".into(),
                    positive: "neutral".into(),
                },
            ],
        }
    }

    fn submission(ratings: &[(&str, i64)]) -> QuestionnaireSubmission {
        QuestionnaireSubmission {
            respondent: "p1".into(),
            demographics: Demographics::default(),
            preference: Some(3),
            ratings: ratings.iter().map(|(k, v)| (String::from(*k), *v)).collect(),
        }
    }

    #[test]
    fn valid_submission_in_schema_order() {
        let out = submission(&[("bias", -1), ("relevance", 3)])
            .to_sd_responses(&schema())
            .unwrap();
        let items: Vec<_> = out.iter().map(|r| (r.item.as_str(), r.rating.get())).collect();
        assert_eq!(items, [("relevance", 3), ("bias", -1)]);
    }

    #[test]
    fn rejects_bad_submissions() {
        let s = schema();
        assert_eq!(
            submission(&[("relevance", 4), ("bias", 0)]).to_sd_responses(&s),
            Err(EvalError::OutOfScale(4))
        );
        assert_eq!(
            submission(&[("relevance", 1)]).to_sd_responses(&s),
            Err(EvalError::MissingItem("bias".into()))
        );
        assert_eq!(
            submission(&[("relevance", 1), ("bias", 0), ("speed", 1)]).to_sd_responses(&s),
            Err(EvalError::UnknownItem("speed".into()))
        );
        let mut bad = submission(&[("relevance", 1), ("bias", 0)]);
        bad.preference = Some(4);
        assert_eq!(bad.to_sd_responses(&s), Err(EvalError::InvalidChoice("4".into())));
    }
}

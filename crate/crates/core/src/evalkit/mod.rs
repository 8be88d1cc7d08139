//! Evaluation bookkeeping: response-speed classes, Q/A records, criterion
//! ratings, semantic-differential aggregation and the report renderer.

mod questionnaire;
mod records;
mod report;

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

pub use questionnaire::{
    Demographics, Questionnaire, QuestionnaireItem, QuestionnaireSubmission, ScaledItem,
};
pub use records::{record_session, QARecord, SessionRecords, Unmatched};
pub use report::{aggregate_sd, emit_report, Report, SdSummary};

pub const SCALE_MIN: i8 = -3;
pub const SCALE_MAX: i8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("response time must be a non-negative number of seconds")]
    InvalidSeconds,
    #[error("rating {0} is outside [-3, 3]")]
    OutOfScale(i64),
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
    #[error("accuracy must be -1, 0 or +1, got `{0}`")]
    InvalidAccuracy(String),
    #[error("unknown questionnaire item `{0}`")]
    UnknownItem(String),
    #[error("questionnaire item `{0}` is missing")]
    MissingItem(String),
    #[error("invalid questionnaire choice `{0}`")]
    InvalidChoice(String),
}

/// Ordered so that `Good > Average > Poor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedClass {
    Poor,
    Average,
    Good,
}

impl SpeedClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Good => "good",
            Self::Average => "average",
            Self::Poor => "poor",
        }
    }
}

impl fmt::Display for SpeedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Under 3 s is good, 3 s to 5 s inclusive is average, above 5 s is poor.
pub fn classify_speed(seconds: f64) -> Result<SpeedClass, EvalError> {
    if seconds.is_nan() || seconds < 0.0 {
        return Err(EvalError::InvalidSeconds);
    }
    Ok(if seconds < 3.0 {
        SpeedClass::Good
    } else if seconds <= 5.0 {
        SpeedClass::Average
    } else {
        SpeedClass::Poor
    })
}

/// Human accuracy tag on an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Accuracy {
    Inaccurate = -1,
    Moderate = 0,
    Accurate = 1,
}

impl Accuracy {
    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn from_value(v: i64) -> Result<Self, EvalError> {
        match v {
            -1 => Ok(Self::Inaccurate),
            0 => Ok(Self::Moderate),
            1 => Ok(Self::Accurate),
            other => Err(EvalError::InvalidAccuracy(alloc::format!("{other}"))),
        }
    }
}

impl fmt::Display for Accuracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Accurate => f.write_str("+1"),
            Self::Moderate => f.write_str("0"),
            Self::Inaccurate => f.write_str("-1"),
        }
    }
}

impl FromStr for Accuracy {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t.strip_prefix('+').unwrap_or(t);
        t.parse::<i64>()
            .map_err(|_| EvalError::InvalidAccuracy(s.into()))
            .and_then(Self::from_value)
    }
}

impl serde::Serialize for Accuracy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> serde::Deserialize<'de> for Accuracy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Self::from_value(v).map_err(serde::de::Error::custom)
    }
}

/// An integer on the seven-point scale [-3, 3].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScaleValue(i8);

impl ScaleValue {
    pub fn new(v: i64) -> Result<Self, EvalError> {
        if (SCALE_MIN as i64..=SCALE_MAX as i64).contains(&v) {
            Ok(Self(v as i8))
        } else {
            Err(EvalError::OutOfScale(v))
        }
    }

    pub fn get(self) -> i8 {
        self.0
    }
}

impl serde::Serialize for ScaleValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.0)
    }
}

impl<'de> serde::Deserialize<'de> for ScaleValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Self::new(v).map_err(serde::de::Error::custom)
    }
}

/// The ten conversation criteria, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Relevance,
    Context,
    Bias,
    Engaging,
    Fluency,
    ErrorResilience,
    DomainOrientation,
    ResponseTime,
    Satisfaction,
    Creativity,
}

impl Criterion {
    pub const ALL: [Criterion; 10] = [
        Self::Relevance,
        Self::Context,
        Self::Bias,
        Self::Engaging,
        Self::Fluency,
        Self::ErrorResilience,
        Self::DomainOrientation,
        Self::ResponseTime,
        Self::Satisfaction,
        Self::Creativity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Relevance => "relevance",
            Self::Context => "context",
            Self::Bias => "bias",
            Self::Engaging => "engaging",
            Self::Fluency => "fluency",
            Self::ErrorResilience => "error_resilience",
            Self::DomainOrientation => "domain_orientation",
            Self::ResponseTime => "response_time",
            Self::Satisfaction => "satisfaction",
            Self::Creativity => "creativity",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = EvalError;

    /// Accepts snake_case names, case-insensitive, with spaces or dashes for underscores.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .map(|c| match c {
                ' ' | '-' => '_',
                c => c.to_ascii_lowercase(),
            })
            .collect();
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| EvalError::UnknownCriterion(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CriterionRating {
    pub criterion: Criterion,
    pub value: ScaleValue,
}

/// One respondent's rating of one bipolar adjective item.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SDResponse {
    pub item: String,
    pub rating: ScaleValue,
    pub respondent: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_boundaries() {
        assert_eq!(classify_speed(2.9), Ok(SpeedClass::Good));
        assert_eq!(classify_speed(3.0), Ok(SpeedClass::Average));
        assert_eq!(classify_speed(4.0), Ok(SpeedClass::Average));
        assert_eq!(classify_speed(5.0), Ok(SpeedClass::Average));
        assert_eq!(classify_speed(7.0), Ok(SpeedClass::Poor));
        assert_eq!(classify_speed(0.0), Ok(SpeedClass::Good));
        assert_eq!(classify_speed(-0.1), Err(EvalError::InvalidSeconds));
        assert_eq!(classify_speed(f64::NAN), Err(EvalError::InvalidSeconds));
        assert!(SpeedClass::Good > SpeedClass::Average && SpeedClass::Average > SpeedClass::Poor);
    }

    #[test]
    fn criterion_names() {
        for c in Criterion::ALL {
            assert_eq!(c.as_str().parse::<Criterion>(), Ok(c));
        }
        assert_eq!("Error Resilience".parse(), Ok(Criterion::ErrorResilience));
        assert!("speed".parse::<Criterion>().is_err());
    }

    #[test]
    fn scale_and_accuracy() {
        assert!(ScaleValue::new(3).is_ok());
        assert_eq!(ScaleValue::new(4), Err(EvalError::OutOfScale(4)));
        assert_eq!("+1".parse(), Ok(Accuracy::Accurate));
        assert_eq!("-1".parse(), Ok(Accuracy::Inaccurate));
        assert!("2".parse::<Accuracy>().is_err());
        assert_eq!(Accuracy::Accurate.to_string(), "+1");
    }
}

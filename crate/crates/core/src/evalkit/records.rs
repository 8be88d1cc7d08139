use alloc::string::String;
use alloc::vec::Vec;

use super::Accuracy;
use crate::gateway::{ErrorCode, WireMessage};

/// One user question and the robot's answer.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QARecord {
    pub question: String,
    pub answer: String,
    pub response_speed_s: f64,
    /// Left empty until a person tags it.
    #[serde(default)]
    pub accuracy: Option<Accuracy>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Unmatched {
    /// A question that never got an answer.
    Question { text: String },
    /// An answer with no open question.
    Answer { text: String },
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SessionRecords {
    pub records: Vec<QARecord>,
    pub unmatched: Vec<Unmatched>,
}

/// Pairs each question (`text_utterance` or `transcript`) with the next
/// `answer`, in session order.
pub fn record_session<'a, I>(messages: I) -> SessionRecords
where
    I: IntoIterator<Item = &'a WireMessage>,
{
    let mut out = SessionRecords::default();
    let mut open: Option<String> = None;
    for msg in messages {
        match msg {
            WireMessage::TextUtterance { text } | WireMessage::Transcript { text } => {
                if let Some(prev) = open.replace(text.trim().into()) {
                    out.unmatched.push(Unmatched::Question { text: prev });
                }
            }
            WireMessage::Answer { text, latency_ms } => match open.take() {
                Some(question) => out.records.push(QARecord {
                    question,
                    answer: text.clone(),
                    response_speed_s: latency_ms.max(0.0) / 1000.0,
                    accuracy: None,
                    note: None,
                }),
                None => out.unmatched.push(Unmatched::Answer { text: text.clone() }),
            },
            WireMessage::ErrorMsg {
                code: ErrorCode::AgentError,
                ..
            } => {
                if let Some(prev) = open.take() {
                    out.unmatched.push(Unmatched::Question { text: prev });
                }
            }
            _ => {}
        }
    }
    if let Some(prev) = open {
        out.unmatched.push(Unmatched::Question { text: prev });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> WireMessage {
        WireMessage::TextUtterance { text: text.into() }
    }

    fn a(text: &str, latency_ms: f64) -> WireMessage {
        WireMessage::Answer {
            text: text.into(),
            latency_ms,
        }
    }

    #[test]
    fn seven_seconds() {
        let log = [
            q("What is the capital of France?"),
            a("The capital of France is Paris", 7000.0),
        ];
        let out = record_session(&log);
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].response_speed_s, 7.0);
        assert_eq!(out.records[0].accuracy, None);
        assert!(out.unmatched.is_empty());
    }

    #[test]
    fn no_answers_no_records() {
        let out = record_session(&[WireMessage::ListenStart]);
        assert_eq!(out, SessionRecords::default());
    }

    #[test]
    fn order_and_unmatched() {
        let log = [
            q("one"),
            a("1", 10.0),
            WireMessage::Transcript { text: "two".into() },
            a("2", 20.0),
            a("stray", 1.0),
            q("three"),
            WireMessage::error(ErrorCode::AgentError, "boom"),
            q("four"),
        ];
        let out = record_session(&log);
        let qs: Vec<_> = out.records.iter().map(|r| r.question.as_str()).collect();
        assert_eq!(qs, ["one", "two"]);
        assert_eq!(
            out.unmatched,
            [
                Unmatched::Answer { text: "stray".into() },
                Unmatched::Question { text: "three".into() },
                Unmatched::Question { text: "four".into() },
            ]
        );
    }
}

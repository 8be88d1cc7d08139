use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

/// Completions are cut before the model can invent its own tool result.
pub const STOP_SEQUENCE: &str = "Observation:";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("provider transport failure: {0}")]
    Transport(String),
    #[error("provider returned an invalid response: {0}")]
    InvalidResponse(String),
    #[error("scripted provider has no completion left")]
    Exhausted,
}

/// A text-completion backend.
pub trait CompletionProvider: Send + Sync {
    /// Returns the completion for `prompt`, ending before the first stop sequence.
    fn complete(&self, prompt: &str, stop: &[&str]) -> Result<String, ProviderError>;
}

/// Cuts `text` at the earliest occurrence of any stop sequence.
pub fn apply_stop<'a>(text: &'a str, stop: &[&str]) -> &'a str {
    let cut = stop
        .iter()
        .filter(|s| !s.is_empty())
        .filter_map(|s| text.find(s))
        .min()
        .unwrap_or(text.len());
    &text[..cut]
}

/// Replays a fixed list of completions in order.
#[derive(Debug, Default)]
pub struct ScriptedProvider {
    script: Vec<String>,
    cursor: AtomicUsize,
}

impl ScriptedProvider {
    pub fn new<I, S>(script: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            script: script.into_iter().map(Into::into).collect(),
            cursor: AtomicUsize::new(0),
        }
    }

    pub fn script(&self) -> &[String] {
        &self.script
    }

    /// Number of completions handed out so far.
    pub fn calls(&self) -> usize {
        self.cursor.load(Ordering::SeqCst)
    }

    pub fn remaining(&self) -> usize {
        self.script.len().saturating_sub(self.calls())
    }

    pub fn rewind(&self) {
        self.cursor.store(0, Ordering::SeqCst);
    }
}

impl Clone for ScriptedProvider {
    fn clone(&self) -> Self {
        Self::new(self.script.iter().cloned())
    }
}

impl CompletionProvider for ScriptedProvider {
    fn complete(&self, _prompt: &str, stop: &[&str]) -> Result<String, ProviderError> {
        let i = self.cursor.fetch_add(1, Ordering::SeqCst);
        match self.script.get(i) {
            Some(text) => Ok(apply_stop(text, stop).to_string()),
            None => {
                self.cursor.store(self.script.len(), Ordering::SeqCst);
                Err(ProviderError::Exhausted)
            }
        }
    }
}

/// Microseconds since a fixed epoch (the Unix epoch in production).
pub trait Clock: Send + Sync {
    fn now_us(&self) -> u64;
}

/// Clock that only moves when told to.
#[derive(Debug, Default)]
pub struct ManualClock {
    now: AtomicU64,
}

impl ManualClock {
    pub fn new(start_us: u64) -> Self {
        Self {
            now: AtomicU64::new(start_us),
        }
    }

    pub fn set_us(&self, us: u64) {
        self.now.store(us, Ordering::SeqCst);
    }

    pub fn advance_ms(&self, ms: u64) {
        self.now.fetch_add(ms * 1000, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now_us(&self) -> u64 {
        self.now.load(Ordering::SeqCst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_replays_in_order_then_fails() {
        let p = ScriptedProvider::new(["one", "two"]);
        assert_eq!(p.complete("", &[]).unwrap(), "one");
        assert_eq!(p.complete("", &[]).unwrap(), "two");
        assert_eq!(p.complete("", &[]), Err(ProviderError::Exhausted));
        assert_eq!(p.calls(), 2);
        p.rewind();
        assert_eq!(p.complete("", &[]).unwrap(), "one");
    }

    #[test]
    fn stop_sequence_truncates() {
        let p = ScriptedProvider::new(["Action: news\nAction Input: USA\nObservation: made up"]);
        assert_eq!(
            p.complete("", &[STOP_SEQUENCE]).unwrap(),
            "Action: news\nAction Input: USA\n"
        );
        assert_eq!(apply_stop("abcabc", &["c", "b"]), "a");
        assert_eq!(apply_stop("abc", &[""]), "abc");
    }

    #[test]
    fn manual_clock() {
        let c = ManualClock::new(5);
        c.advance_ms(2);
        assert_eq!(c.now_us(), 2005);
    }
}

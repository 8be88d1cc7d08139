use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{one_line, truncate_line, Tool, ToolError, DEFAULT_MAX_LINE_CHARS, DEFAULT_MAX_RESULTS};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NewsHeadline {
    pub title: String,
    pub source: String,
    /// ISO-8601 timestamp as delivered by the provider.
    pub published_at: String,
    pub url: String,
}

impl NewsHeadline {
    /// Calendar date part of `published_at`.
    pub fn date(&self) -> &str {
        self.published_at
            .split_once('T')
            .map_or(self.published_at.as_str(), |(d, _)| d)
    }
}

/// A headline search service (GNews-compatible in production).
pub trait HeadlineSource: Send + Sync {
    fn headlines(&self, terms: &str, max_results: usize) -> Result<Vec<NewsHeadline>, ToolError>;
}

/// Numbered `title — source (date)` lines, at most `max_results`.
pub fn format_headlines(headlines: &[NewsHeadline], max_results: usize, max_line_chars: usize) -> String {
    let mut out = String::new();
    for (i, h) in headlines
        .iter()
        .filter(|h| !h.title.trim().is_empty())
        .take(max_results)
        .enumerate()
    {
        let mut line = format!("{}. {}", i + 1, one_line(&h.title));
        if !h.source.is_empty() {
            let _ = write!(line, " — {}", one_line(&h.source));
        }
        if !h.date().is_empty() {
            let _ = write!(line, " ({})", h.date());
        }
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(truncate_line(&line, max_line_chars));
    }
    out
}

pub struct NewsTool<S> {
    source: S,
    pub max_results: usize,
    pub max_line_chars: usize,
}

impl<S: HeadlineSource> NewsTool<S> {
    pub fn new(source: S) -> Self {
        Self {
            source,
            max_results: DEFAULT_MAX_RESULTS,
            max_line_chars: DEFAULT_MAX_LINE_CHARS,
        }
    }

    pub fn with_max_results(mut self, max_results: usize) -> Self {
        self.max_results = max_results;
        self
    }
}

impl<S: HeadlineSource> Tool for NewsTool<S> {
    fn name(&self) -> &str {
        "news"
    }

    fn description(&self) -> &str {
        "Recent article headlines for the given terms, e.g. a country or topic."
    }

    fn invoke(&self, input: &str) -> String {
        let terms = input.trim();
        if terms.is_empty() {
            return "news tool needs search terms".into();
        }
        match self.source.headlines(terms, self.max_results) {
            Err(e) => truncate_line(
                &format!("news service unavailable: {}", one_line(&format!("{e}"))),
                self.max_line_chars,
            )
            .into(),
            Ok(found) => {
                let text = format_headlines(&found, self.max_results, self.max_line_chars);
                if text.is_empty() {
                    format!("no recent articles found for '{terms}'")
                } else {
                    text
                }
            }
        }
    }
}

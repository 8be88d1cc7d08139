use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{one_line, truncate_line, Tool, ToolError, DEFAULT_MAX_LINE_CHARS, DEFAULT_MAX_RESULTS};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchResult {
    pub title: String,
    pub snippet: String,
    pub url: String,
}

/// A web search service (SerpAPI-compatible in production).
pub trait SearchBackend: Send + Sync {
    fn search(&self, query: &str, max_results: usize) -> Result<Vec<SearchResult>, ToolError>;
}

/// `title: snippet` lines; a missing half is dropped.
pub fn format_search_results(results: &[SearchResult], max_results: usize, max_line_chars: usize) -> String {
    let lines: Vec<String> = results
        .iter()
        .map(|r| (one_line(&r.title), one_line(&r.snippet)))
        .filter(|(t, s)| !t.is_empty() || !s.is_empty())
        .take(max_results)
        .map(|(t, s)| {
            let line = match (t.is_empty(), s.is_empty()) {
                (false, false) => format!("{t}: {s}"),
                (true, _) => s,
                (_, true) => t,
            };
            truncate_line(&line, max_line_chars).into()
        })
        .collect();
    lines.join("\n")
}

pub struct SearchTool<B> {
    backend: B,
    pub max_results: usize,
    pub max_line_chars: usize,
}

impl<B: SearchBackend> SearchTool<B> {
    pub fn new(backend: B) -> Self {
        Self {
            backend,
            max_results: DEFAULT_MAX_RESULTS,
            max_line_chars: DEFAULT_MAX_LINE_CHARS,
        }
    }

    pub fn with_max_results(mut self, max_results: usize) -> Self {
        self.max_results = max_results;
        self
    }
}

impl<B: SearchBackend> Tool for SearchTool<B> {
    fn name(&self) -> &str {
        "search"
    }

    fn description(&self) -> &str {
        "Web lookup for general knowledge questions; input is a query."
    }

    fn invoke(&self, input: &str) -> String {
        let query = input.trim();
        if query.is_empty() {
            return "search tool needs a query".into();
        }
        match self.backend.search(query, self.max_results) {
            Err(e) => truncate_line(
                &format!("search service unavailable: {}", one_line(&format!("{e}"))),
                self.max_line_chars,
            )
            .into(),
            Ok(found) => {
                let text = format_search_results(&found, self.max_results, self.max_line_chars);
                if text.is_empty() {
                    "no results found".into()
                } else {
                    text
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    struct Fixed(Result<Vec<SearchResult>, ToolError>);

    impl SearchBackend for Fixed {
        fn search(&self, _: &str, _: usize) -> Result<Vec<SearchResult>, ToolError> {
            self.0.clone()
        }
    }

    #[test]
    fn title_snippet_lines() {
        let tool = SearchTool::new(Fixed(Ok(vec![
            SearchResult {
                title: "Paris - Wikipedia".into(),
                snippet: "Paris is the capital and most populous city of France.".into(),
                url: "https://en.wikipedia.org/wiki/Paris".into(),
            },
            SearchResult { title: String::new(), snippet: "only snippet".into(), url: String::new() },
        ])));
        assert_eq!(
            tool.invoke("capital of France"),
            "Paris - Wikipedia: Paris is the capital and most populous city of France.\nonly snippet"
        );
    }

    #[test]
    fn empty_and_error() {
        assert_eq!(SearchTool::new(Fixed(Ok(vec![]))).invoke("q"), "no results found");
        let err = SearchTool::new(Fixed(Err(ToolError::Transport("timed out".into()))));
        assert_eq!(err.invoke("q"), "search service unavailable: timed out");
    }
}

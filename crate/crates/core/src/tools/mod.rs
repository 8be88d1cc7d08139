//! The agent's tools and their observation formats.
//!
//! A tool never fails from the agent's point of view: transport errors,
//! empty results and missing models all come back as observation text.

mod fact_check;
mod news;
mod search;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

pub use fact_check::{fact_check_observation, FactCheckTool};
pub use news::{format_headlines, HeadlineSource, NewsHeadline, NewsTool};
pub use search::{format_search_results, SearchBackend, SearchResult, SearchTool};

pub const DEFAULT_MAX_RESULTS: usize = 5;
pub const DEFAULT_MAX_LINE_CHARS: usize = 300;

/// Something the agent can call by name with a single string argument.
pub trait Tool: Send + Sync {
    fn name(&self) -> &str;
    /// One line, shown to the model in the prompt.
    fn description(&self) -> &str;
    fn invoke(&self, input: &str) -> String;
}

/// Failure reported by a tool's backing client.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ToolError {
    #[error("{0}")]
    Transport(String),
    #[error("HTTP status {0}")]
    Status(u16),
    #[error("invalid response: {0}")]
    InvalidResponse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tool `{0}` is already registered")]
pub struct DuplicateTool(pub String);

/// Tools in registration order, names unique.
#[derive(Default)]
pub struct ToolRegistry {
    tools: Vec<Box<dyn Tool>>,
}

impl ToolRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, tool: Box<dyn Tool>) -> Result<(), DuplicateTool> {
        if self.get(tool.name()).is_some() {
            return Err(DuplicateTool(tool.name().into()));
        }
        self.tools.push(tool);
        Ok(())
    }

    pub fn with(mut self, tool: impl Tool + 'static) -> Result<Self, DuplicateTool> {
        self.register(Box::new(tool))?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&dyn Tool> {
        self.tools.iter().find(|t| t.name() == name).map(|t| &**t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Tool> {
        self.tools.iter().map(|t| &**t)
    }

    pub fn names(&self) -> Vec<&str> {
        self.tools.iter().map(|t| t.name()).collect()
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }
}

impl core::fmt::Debug for ToolRegistry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

/// Cuts `line` to at most `max_chars` characters.
pub fn truncate_line(line: &str, max_chars: usize) -> &str {
    match line.char_indices().nth(max_chars) {
        Some((idx, _)) => &line[..idx],
        None => line,
    }
}

/// Observation-sized view of a string: one line, whitespace collapsed.
pub(crate) fn one_line(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo(&'static str);

    impl Tool for Echo {
        fn name(&self) -> &str {
            self.0
        }
        fn description(&self) -> &str {
            "echoes"
        }
        fn invoke(&self, input: &str) -> String {
            input.into()
        }
    }

    #[test]
    fn names_are_unique() {
        let reg = ToolRegistry::new().with(Echo("a")).unwrap().with(Echo("b")).unwrap();
        assert_eq!(reg.names(), ["a", "b"]);
        assert_eq!(reg.with(Echo("a")).unwrap_err(), DuplicateTool("a".into()));
    }

    #[test]
    fn truncation_respects_char_boundaries() {
        assert_eq!(truncate_line("héllo", 2), "hé");
        assert_eq!(truncate_line("abc", 10), "abc");
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(one_line("  a\n b\t\tc "), "a b c");
    }
}

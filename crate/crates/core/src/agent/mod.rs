//! ReAct agent: the model alternates `Thought` / `Action` / `Action Input`
//! lines with tool observations until it emits a `Final Answer`.

mod history;
mod parser;
mod prompt;
mod provider;
mod runner;

use alloc::string::String;
use alloc::vec::Vec;

pub use history::{ChatRole, ChatTurn, ConversationHistory, DEFAULT_HISTORY_TURNS};
pub use parser::{parse_llm_output, ParseError, Parsed};
pub use prompt::{build_prompt, render_scratchpad, CORRECTION_NOTICE, FINAL_ANSWER_NUDGE};
pub use provider::{
    apply_stop, Clock, CompletionProvider, ManualClock, ProviderError, ScriptedProvider,
    STOP_SEQUENCE,
};
pub use runner::{run_agent, AgentError, AgentErrorKind, AgentEvent, AgentRun, AgentTimings};

/// One reasoning step: a thought and the tool call it led to.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AgentStep {
    pub thought: String,
    pub action_name: String,
    pub action_input: String,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FinalAnswer {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ScratchpadEntry {
    pub step: AgentStep,
    pub observation: String,
}

/// Steps taken so far, each paired with its observation.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Scratchpad {
    pub entries: Vec<ScratchpadEntry>,
}

impl Scratchpad {
    pub fn push(&mut self, step: AgentStep, observation: String) {
        self.entries.push(ScratchpadEntry { step, observation });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tool_calls(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.step.action_name.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PromptTemplate {
    /// Reporter persona over the canonical ReAct line grammar.
    #[default]
    Reporter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentConfig {
    /// Upper bound on tool invocations per run.
    pub max_iterations: usize,
    /// Corrective re-prompts allowed after unparseable output.
    pub parse_retry_limit: usize,
    pub template: PromptTemplate,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            max_iterations: 6,
            parse_retry_limit: 1,
            template: PromptTemplate::Reporter,
        }
    }
}

use alloc::format;
use alloc::string::{String, ToString};

use super::{
    build_prompt, parse_llm_output, AgentConfig, AgentStep, Clock, CompletionProvider,
    ConversationHistory, FinalAnswer, ParseError, Parsed, ProviderError, Scratchpad,
    CORRECTION_NOTICE, FINAL_ANSWER_NUDGE, STOP_SEQUENCE,
};
use crate::tools::ToolRegistry;

/// Progress notifications, emitted as the loop runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentEvent {
    Thought(String),
    Action { name: String, input: String },
    Observation(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AgentTimings {
    pub llm_calls: usize,
    pub tool_calls: usize,
    pub started_us: u64,
    pub finished_us: u64,
}

impl AgentTimings {
    pub fn elapsed_us(&self) -> u64 {
        self.finished_us.saturating_sub(self.started_us)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentRun {
    pub answer: FinalAnswer,
    pub trace: Scratchpad,
    pub timings: AgentTimings,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AgentErrorKind {
    #[error("empty question")]
    EmptyQuestion,
    #[error("no tools registered")]
    NoTools,
    #[error("max_iterations must be at least 1")]
    InvalidConfig,
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("model output did not follow the required format")]
    Unparseable,
    #[error("no answer after the iteration limit")]
    IterationLimit,
}

/// Failed run; keeps whatever trace was built before the failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind}")]
pub struct AgentError {
    pub kind: AgentErrorKind,
    pub trace: Scratchpad,
    /// Last raw completion, when the failure was about its content.
    pub raw: Option<String>,
}

fn unknown_tool(name: &str, tools: &ToolRegistry) -> String {
    format!("unknown tool {name}; available: {}", tools.names().join(", "))
}

/// Runs the ReAct loop for one question.
///
/// At most `config.max_iterations` steps are dispatched. Once they are spent
/// the provider is asked a single time for a direct answer.
pub fn run_agent(
    question: &str,
    history: &ConversationHistory,
    tools: &ToolRegistry,
    provider: &dyn CompletionProvider,
    config: &AgentConfig,
    clock: &dyn Clock,
    observer: &mut dyn FnMut(&AgentEvent),
) -> Result<AgentRun, AgentError> {
    let mut trace = Scratchpad::default();
    let fail = |kind, trace: Scratchpad, raw| AgentError { kind, trace, raw };
    if question.trim().is_empty() {
        return Err(fail(AgentErrorKind::EmptyQuestion, trace, None));
    }
    if tools.is_empty() {
        return Err(fail(AgentErrorKind::NoTools, trace, None));
    }
    if config.max_iterations == 0 {
        return Err(fail(AgentErrorKind::InvalidConfig, trace, None));
    }

    let mut timings = AgentTimings {
        started_us: clock.now_us(),
        ..AgentTimings::default()
    };
    let mut retries = 0;
    let mut correcting = false;

    while trace.len() < config.max_iterations {
        let mut prompt = build_prompt(history, question, &trace, tools);
        if correcting {
            prompt.push_str(CORRECTION_NOTICE);
            prompt.push('\n');
        }
        timings.llm_calls += 1;
        let output = match provider.complete(&prompt, &[STOP_SEQUENCE]) {
            Ok(out) => out,
            Err(e) => return Err(fail(e.into(), trace, None)),
        };
        match parse_llm_output(&output) {
            Parsed::Final(answer) => {
                timings.finished_us = clock.now_us();
                return Ok(AgentRun {
                    answer,
                    trace,
                    timings,
                });
            }
            Parsed::Step(step) => {
                retries = 0;
                correcting = false;
                let observation = dispatch(&step, tools, &mut timings, observer);
                trace.push(step, observation);
            }
            Parsed::Error(ParseError { raw }) => {
                if retries >= config.parse_retry_limit {
                    return Err(fail(AgentErrorKind::Unparseable, trace, Some(raw)));
                }
                retries += 1;
                correcting = true;
            }
        }
    }

    let mut prompt = build_prompt(history, question, &trace, tools);
    prompt.push_str(FINAL_ANSWER_NUDGE);
    prompt.push('\n');
    timings.llm_calls += 1;
    let output = match provider.complete(&prompt, &[STOP_SEQUENCE]) {
        Ok(out) => out,
        Err(e) => return Err(fail(e.into(), trace, None)),
    };
    let answer = match parse_llm_output(&output) {
        Parsed::Final(answer) => answer,
        // A reply without any markers is taken as the direct answer.
        Parsed::Error(ParseError { raw }) if !raw.trim().is_empty() => FinalAnswer {
            text: raw.trim().to_string(),
        },
        _ => return Err(fail(AgentErrorKind::IterationLimit, trace, Some(output))),
    };
    timings.finished_us = clock.now_us();
    Ok(AgentRun {
        answer,
        trace,
        timings,
    })
}

fn dispatch(
    step: &AgentStep,
    tools: &ToolRegistry,
    timings: &mut AgentTimings,
    observer: &mut dyn FnMut(&AgentEvent),
) -> String {
    if !step.thought.is_empty() {
        observer(&AgentEvent::Thought(step.thought.clone()));
    }
    observer(&AgentEvent::Action {
        name: step.action_name.clone(),
        input: step.action_input.clone(),
    });
    let observation = match tools.get(&step.action_name) {
        Some(tool) => {
            timings.tool_calls += 1;
            tool.invoke(&step.action_input)
        }
        None => unknown_tool(&step.action_name, tools),
    };
    observer(&AgentEvent::Observation(observation.clone()));
    observation
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{ManualClock, ScriptedProvider};
    use crate::tools::Tool;
    use alloc::vec::Vec;

    struct Canned(&'static str, &'static str);

    impl Tool for Canned {
        fn name(&self) -> &str {
            self.0
        }
        fn description(&self) -> &str {
            "canned"
        }
        fn invoke(&self, _: &str) -> String {
            self.1.into()
        }
    }

    fn tools() -> ToolRegistry {
        ToolRegistry::new()
            .with(Canned("search", "Paris is the capital of France."))
            .unwrap()
    }

    fn run(script: &[&str], config: AgentConfig) -> (Result<AgentRun, AgentError>, Vec<AgentEvent>) {
        let provider = ScriptedProvider::new(script.iter().copied());
        let mut events = Vec::new();
        let out = run_agent(
            "What is the capital of France?",
            &ConversationHistory::default(),
            &tools(),
            &provider,
            &config,
            &ManualClock::default(),
            &mut |e| events.push(e.clone()),
        );
        (out, events)
    }

    #[test]
    fn immediate_final_answer() {
        let (out, events) = run(&["Final Answer: Paris"], AgentConfig::default());
        let out = out.unwrap();
        assert_eq!(out.answer.text, "Paris");
        assert!(out.trace.is_empty());
        assert_eq!(out.timings.tool_calls, 0);
        assert!(events.is_empty());
    }

    #[test]
    fn one_step_then_answer() {
        let (out, events) = run(
            &[
                "Thought: look it up\nAction: search\nAction Input: capital of France",
                "Thought: I now know the final answer\nFinal Answer: The capital of France is Paris",
            ],
            AgentConfig::default(),
        );
        let out = out.unwrap();
        assert_eq!(out.answer.text, "The capital of France is Paris");
        assert_eq!(out.trace.tool_calls().collect::<Vec<_>>(), ["search"]);
        assert_eq!(out.timings.llm_calls, 2);
        assert_eq!(events.len(), 3);
    }

    #[test]
    fn unknown_tool_becomes_observation() {
        let (out, _) = run(
            &["Action: weather\nAction Input: Paris", "Final Answer: sunny"],
            AgentConfig::default(),
        );
        let out = out.unwrap();
        assert_eq!(out.trace.entries[0].observation, "unknown tool weather; available: search");
        assert_eq!(out.timings.tool_calls, 0);
    }

    #[test]
    fn one_retry_then_failure() {
        let (out, _) = run(&["rambling", "Final Answer: Paris"], AgentConfig::default());
        assert_eq!(out.unwrap().answer.text, "Paris");

        let (out, _) = run(&["rambling", "still rambling"], AgentConfig::default());
        let err = out.unwrap_err();
        assert_eq!(err.kind, AgentErrorKind::Unparseable);
        assert_eq!(err.raw.as_deref(), Some("still rambling"));
    }

    #[test]
    fn best_effort_after_limit() {
        let step = "Action: search\nAction Input: again";
        let config = AgentConfig {
            max_iterations: 2,
            ..AgentConfig::default()
        };
        let (out, _) = run(&[step, step, "It is Paris."], config);
        let out = out.unwrap();
        assert_eq!(out.trace.len(), 2);
        assert_eq!(out.answer.text, "It is Paris.");

        let (out, _) = run(&[step, step, step], config);
        assert_eq!(out.unwrap_err().kind, AgentErrorKind::IterationLimit);
    }

    #[test]
    fn provider_failure_keeps_partial_trace() {
        let (out, _) = run(&["Action: search\nAction Input: x"], AgentConfig::default());
        let err = out.unwrap_err();
        assert_eq!(err.kind, AgentErrorKind::Provider(ProviderError::Exhausted));
        assert_eq!(err.trace.len(), 1);
    }
}

use alloc::string::String;
use core::fmt::Write;

use super::{ChatRole, ConversationHistory, Scratchpad};
use crate::tools::ToolRegistry;

/// Appended after a completion the parser rejected.
pub const CORRECTION_NOTICE: &str =
    "Your previous reply did not follow the required format. Respond in the required format.";

/// Appended when the tool budget is spent.
pub const FINAL_ANSWER_NUDGE: &str =
    "No more tool calls are allowed. Give your best direct answer now, starting with \"Final Answer:\".";

// Tool names appear only in the tool list, so the template itself must not
// contain any of the registered names.
const PREAMBLE: &str = "You are a robot reporter answering a person who is talking to you. \
Answer the question as well as you can. You can use these tools:";

const FORMAT: &str = "\
Use exactly this format:

Question: the question you must answer
Thought: what you should do next
Action: the tool to use, exactly one name from the list above
Action Input: the input for the tool
Observation: the tool result
... (Thought/Action/Action Input/Observation may repeat)
Thought: I now know the final answer
Final Answer: the answer to the original question";

/// Serializes each entry as `Thought` / `Action` / `Action Input` / `Observation` lines.
pub fn render_scratchpad(scratchpad: &Scratchpad) -> String {
    let mut out = String::new();
    for entry in &scratchpad.entries {
        let step = &entry.step;
        let _ = writeln!(out, "Thought: {}", step.thought);
        let _ = writeln!(out, "Action: {}", step.action_name);
        let _ = writeln!(out, "Action Input: {}", step.action_input);
        let _ = writeln!(out, "Observation: {}", entry.observation);
    }
    out
}

/// Full prompt for one model call.
pub fn build_prompt(
    history: &ConversationHistory,
    question: &str,
    scratchpad: &Scratchpad,
    tools: &ToolRegistry,
) -> String {
    let mut out = String::new();
    out.push_str(PREAMBLE);
    out.push_str("\n\n");
    for tool in tools.iter() {
        let _ = writeln!(out, "{}: {}", tool.name(), tool.description());
    }
    out.push('\n');
    out.push_str(FORMAT);
    out.push_str("\n\n");
    if !history.is_empty() {
        out.push_str("Conversation so far:\n");
        for turn in history.turns() {
            let who = match turn.role {
                ChatRole::User => "User",
                ChatRole::Assistant => "You",
            };
            let _ = writeln!(out, "{who}: {}", turn.text);
        }
        out.push('\n');
    }
    out.push_str("Begin!\n\n");
    let _ = writeln!(out, "Question: {}", question.trim());
    out.push_str(&render_scratchpad(scratchpad));
    out
}

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{AgentStep, FinalAnswer};

const THOUGHT: &str = "Thought:";
const ACTION: &str = "Action:";
const ACTION_INPUT: &str = "Action Input:";
const FINAL_ANSWER: &str = "Final Answer:";

/// Model output the grammar did not match; keeps the raw text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Step(AgentStep),
    Final(FinalAnswer),
    Error(ParseError),
}

fn strip_marker<'a>(line: &'a str, marker: &str) -> Option<&'a str> {
    line.trim_start().strip_prefix(marker)
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['"', '\'', '`'] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return s[1..s.len() - 1].trim();
        }
    }
    s
}

/// Reads one completion against the ReAct line grammar.
///
/// A `Final Answer:` line wins and takes the rest of the text. Otherwise the
/// first `Action:` line, the first `Action Input:` after it and the
/// `Thought:` before it (may be absent) form a step.
pub fn parse_llm_output(text: &str) -> Parsed {
    let error = || {
        Parsed::Error(ParseError {
            raw: text.to_string(),
        })
    };
    let lines: Vec<&str> = text.lines().collect();

    if let Some(i) = lines.iter().position(|l| strip_marker(l, FINAL_ANSWER).is_some()) {
        let mut answer = String::from(strip_marker(lines[i], FINAL_ANSWER).unwrap_or_default().trim());
        for rest in &lines[i + 1..] {
            answer.push('\n');
            answer.push_str(rest);
        }
        let answer = answer.trim();
        return if answer.is_empty() {
            error()
        } else {
            Parsed::Final(FinalAnswer {
                text: answer.to_string(),
            })
        };
    }

    let Some(a) = lines.iter().position(|l| strip_marker(l, ACTION).is_some()) else {
        return error();
    };
    let action_name = unquote(strip_marker(lines[a], ACTION).unwrap_or_default());
    let Some(action_input) = lines[a + 1..]
        .iter()
        .find_map(|l| strip_marker(l, ACTION_INPUT))
    else {
        return error();
    };
    if action_name.is_empty() {
        return error();
    }

    let thought = lines[..a]
        .iter()
        .position(|l| strip_marker(l, THOUGHT).is_some())
        .map(|t| {
            let mut parts: Vec<&str> = Vec::new();
            parts.push(strip_marker(lines[t], THOUGHT).unwrap_or_default().trim());
            parts.extend(lines[t + 1..a].iter().map(|l| l.trim()));
            parts.retain(|p| !p.is_empty());
            parts.join(" ")
        })
        .unwrap_or_default();

    Parsed::Step(AgentStep {
        thought,
        action_name: action_name.to_string(),
        action_input: unquote(action_input).to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(thought: &str, name: &str, input: &str) -> Parsed {
        Parsed::Step(AgentStep {
            thought: thought.into(),
            action_name: name.into(),
            action_input: input.into(),
        })
    }

    #[test]
    fn step_triple() {
        assert_eq!(
            parse_llm_output("Thought: need news\nAction: news\nAction Input: Egypt"),
            step("need news", "news", "Egypt")
        );
    }

    #[test]
    fn final_answer() {
        assert_eq!(
            parse_llm_output("Final Answer: The capital of France is Paris"),
            Parsed::Final(FinalAnswer {
                text: "The capital of France is Paris".into()
            })
        );
    }

    #[test]
    fn final_answer_keeps_following_lines() {
        let out = parse_llm_output("Thought: I know\nFinal Answer: line one\nline two\n");
        assert_eq!(
            out,
            Parsed::Final(FinalAnswer {
                text: "line one\nline two".into()
            })
        );
    }

    #[test]
    fn free_text_is_an_error() {
        let raw = "I think we should look this up";
        assert_eq!(
            parse_llm_output(raw),
            Parsed::Error(ParseError { raw: raw.into() })
        );
    }

    #[test]
    fn missing_thought_is_allowed() {
        assert_eq!(
            parse_llm_output("Action: search\nAction Input: \"capital of France\""),
            step("", "search", "capital of France")
        );
    }

    #[test]
    fn missing_input_or_name_is_an_error() {
        assert!(matches!(parse_llm_output("Thought: x\nAction: news"), Parsed::Error(_)));
        assert!(matches!(parse_llm_output("Action:\nAction Input: x"), Parsed::Error(_)));
        assert!(matches!(parse_llm_output("Final Answer:   "), Parsed::Error(_)));
    }

    #[test]
    fn multi_line_thought_is_joined() {
        assert_eq!(
            parse_llm_output("Thought: first\n  second\nAction: news\nAction Input: USA\n"),
            step("first second", "news", "USA")
        );
    }
}

//! Server configuration file (TOML). Every section and key is optional; see
//! `config/newsgpt.toml` for the documented defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use newsgpt_core::agent::AgentConfig;
use newsgpt_core::gateway::{SessionConfig, DEFAULT_IDLE_TIMEOUT_MS, MAX_CHUNK_BYTES};
use newsgpt_core::speechgate::DetectorConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub server: ServerSection,
    pub detector: DetectorSection,
    pub agent: AgentSection,
    pub llm: LlmSection,
    pub news: NewsSection,
    pub search: SearchSection,
    pub asr: AsrSection,
    pub classifier: ClassifierSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerSection {
    pub host: String,
    pub idle_timeout_s: u64,
    pub sweep_interval_s: u64,
    pub max_chunk_bytes: usize,
    /// Drop trace events for robot clients.
    pub suppress_robot_trace: bool,
    /// One JSONL log per session is written here.
    pub log_dir: PathBuf,
    /// Questionnaire schema; the bundled one is used when unset.
    pub questionnaire: Option<PathBuf>,
    /// Questionnaire submissions are appended here as `respondent,item,rating`.
    pub responses_csv: PathBuf,
    /// Complete submissions, one JSON object per line.
    pub submissions_log: PathBuf,
}

impl Default for ServerSection {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".into(),
            idle_timeout_s: DEFAULT_IDLE_TIMEOUT_MS / 1000,
            sweep_interval_s: 30,
            max_chunk_bytes: MAX_CHUNK_BYTES,
            suppress_robot_trace: false,
            log_dir: "sessions".into(),
            questionnaire: None,
            responses_csv: "sessions/sd_responses.csv".into(),
            submissions_log: "sessions/questionnaire.jsonl".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub rms_threshold: f64,
    pub silence_timeout_ms: f64,
    pub frame_ms: u32,
    pub preroll_frames: usize,
}

impl Default for DetectorSection {
    fn default() -> Self {
        let d = DetectorConfig::default();
        Self {
            rms_threshold: d.rms_threshold,
            silence_timeout_ms: d.silence_timeout_ms,
            frame_ms: d.frame_ms,
            preroll_frames: d.preroll_frames,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSection {
    pub max_iterations: usize,
    pub parse_retry_limit: usize,
    pub history_turns: usize,
}

impl Default for AgentSection {
    fn default() -> Self {
        let a = AgentConfig::default();
        Self {
            max_iterations: a.max_iterations,
            parse_retry_limit: a.parse_retry_limit,
            history_turns: newsgpt_core::agent::DEFAULT_HISTORY_TURNS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmSection {
    /// Base URL of an OpenAI-compatible API; `/chat/completions` is appended.
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub api_key_env: String,
    pub timeout_s: u64,
}

impl Default for LlmSection {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-3.5-turbo".into(),
            temperature: 0.0,
            api_key_env: "LLM_API_KEY".into(),
            timeout_s: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewsSection {
    pub endpoint: String,
    pub api_key_env: String,
    pub lang: String,
    pub max_results: usize,
    pub timeout_s: u64,
}

impl Default for NewsSection {
    fn default() -> Self {
        Self {
            endpoint: "https://gnews.io/api/v4/search".into(),
            api_key_env: "GNEWS_API_KEY".into(),
            lang: "en".into(),
            max_results: newsgpt_core::tools::DEFAULT_MAX_RESULTS,
            timeout_s: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub endpoint: String,
    pub api_key_env: String,
    pub engine: String,
    pub max_results: usize,
    pub timeout_s: u64,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            endpoint: "https://serpapi.com/search.json".into(),
            api_key_env: "SERP_API_KEY".into(),
            engine: "google".into(),
            max_results: newsgpt_core::tools::DEFAULT_MAX_RESULTS,
            timeout_s: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AsrSection {
    /// Transcripts looked up by utterance label (`utt-1`, `utt-2`, ...).
    Mock { fixtures: Option<PathBuf> },
    /// POST a WAV body, read `{"text": ...}` back.
    Http { url: String, timeout_s: Option<u64> },
    /// Run a program with the WAV path as last argument; stdout is the text.
    Command { program: String, #[serde(default)] args: Vec<String> },
}

impl Default for AsrSection {
    fn default() -> Self {
        Self::Mock { fixtures: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    /// Parameter file for the fact-check tool; the tool reports itself
    /// unavailable when unset.
    pub params: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            rms_threshold: self.detector.rms_threshold,
            silence_timeout_ms: self.detector.silence_timeout_ms,
            frame_ms: self.detector.frame_ms,
            preroll_frames: self.detector.preroll_frames,
        }
    }

    pub fn agent(&self) -> AgentConfig {
        AgentConfig {
            max_iterations: self.agent.max_iterations,
            parse_retry_limit: self.agent.parse_retry_limit,
            ..AgentConfig::default()
        }
    }

    pub fn session(&self) -> SessionConfig {
        SessionConfig {
            detector: self.detector(),
            history_turns: self.agent.history_turns,
            suppress_robot_trace: self.server.suppress_robot_trace,
            max_chunk_bytes: self.server.max_chunk_bytes,
        }
    }
}

/// Reads an API key from the environment variable named in the config.
pub fn api_key(var: &str) -> Option<String> {
    std::env::var(var).ok().filter(|v| !v.trim().is_empty())
}

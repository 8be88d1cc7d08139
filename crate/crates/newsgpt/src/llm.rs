//! Completion providers: an OpenAI-compatible chat endpoint and a scripted
//! replay loaded from a fixture file.

use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use newsgpt_core::agent::{apply_stop, CompletionProvider, ProviderError, ScriptedProvider};
use serde::Deserialize;
use serde_json::json;

/// `POST {base_url}/chat/completions` with the whole prompt as one user message.
pub struct RemoteProvider {
    client: reqwest::blocking::Client,
    url: String,
    api_key: Option<String>,
    model: String,
    temperature: f64,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    #[serde(default)]
    content: Option<String>,
}

impl RemoteProvider {
    pub fn new(base_url: &str, api_key: Option<String>, model: impl Into<String>, temperature: f64, timeout: Duration) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("TLS backend initialises");
        Self {
            client,
            url: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            api_key,
            model: model.into(),
            temperature,
        }
    }
}

impl CompletionProvider for RemoteProvider {
    fn complete(&self, prompt: &str, stop: &[&str]) -> Result<String, ProviderError> {
        let body = json!({
            "model": self.model,
            "temperature": self.temperature,
            "stop": stop,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut req = self.client.post(&self.url).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req
            .send()
            .map_err(|e| ProviderError::Transport(e.without_url().to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(ProviderError::Transport(format!("HTTP status {}", status.as_u16())));
        }
        let parsed: ChatResponse = resp
            .json()
            .map_err(|e| ProviderError::InvalidResponse(e.without_url().to_string()))?;
        let text = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| ProviderError::InvalidResponse("no completion in response".into()))?;
        // Servers that ignore `stop` still get cut at the first stop sequence.
        Ok(apply_stop(&text, stop).to_string())
    }
}

/// Reads a scripted-provider fixture: a JSON array of completion strings.
pub fn load_script(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: expected a JSON array of strings", path.display()))
}

pub fn scripted_provider(path: &Path) -> Result<ScriptedProvider> {
    Ok(ScriptedProvider::new(load_script(path)?))
}

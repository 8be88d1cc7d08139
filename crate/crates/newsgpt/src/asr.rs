//! Speech recognizers for the server.

use std::collections::BTreeMap;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use anyhow::{Context, Result};
use newsgpt_core::speechgate::{AsrError, MockRecognizer, SpeechRecognizer, SpeechSegment, TranscriptionResult};
use serde::Deserialize;

use crate::config::AsrSection;

/// Encodes a segment as 16-bit mono PCM WAV.
pub fn segment_to_wav(segment: &SpeechSegment) -> Vec<u8> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: segment.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut buf = Cursor::new(Vec::new());
    {
        let mut w = hound::WavWriter::new(&mut buf, spec).expect("in-memory WAV header");
        for s in &segment.samples {
            let v = (s.clamp(-1.0, 1.0) * i16::MAX as f32).round() as i16;
            w.write_sample(v).expect("in-memory WAV write");
        }
        w.finalize().expect("in-memory WAV finalize");
    }
    buf.into_inner()
}

/// POSTs `audio/wav` and expects `{"text": "...", "confidence": 0.9}` back.
pub struct HttpRecognizer {
    client: reqwest::blocking::Client,
    url: String,
}

#[derive(Deserialize)]
struct HttpTranscript {
    text: String,
    #[serde(default)]
    confidence: Option<f64>,
}

impl HttpRecognizer {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("TLS backend initialises");
        Self { client, url: url.into() }
    }
}

impl SpeechRecognizer for HttpRecognizer {
    fn transcribe(&self, segment: &SpeechSegment) -> Result<TranscriptionResult, AsrError> {
        if segment.samples.is_empty() {
            return Err(AsrError::EmptySegment);
        }
        let resp = self
            .client
            .post(&self.url)
            .header(reqwest::header::CONTENT_TYPE, "audio/wav")
            .body(segment_to_wav(segment))
            .send()
            .map_err(|e| AsrError::Transport(e.without_url().to_string()))?;
        if !resp.status().is_success() {
            return Err(AsrError::Transport(format!("HTTP status {}", resp.status().as_u16())));
        }
        let t: HttpTranscript = resp
            .json()
            .map_err(|e| AsrError::InvalidResponse(e.without_url().to_string()))?;
        Ok(TranscriptionResult {
            text: t.text.trim().to_string(),
            confidence: t.confidence,
        })
    }
}

/// Runs `program args... <wav-path>` and takes trimmed stdout as the text.
pub struct CommandRecognizer {
    program: String,
    args: Vec<String>,
}

impl CommandRecognizer {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Self {
            program: program.into(),
            args,
        }
    }
}

struct TempWav(PathBuf);

impl Drop for TempWav {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

impl SpeechRecognizer for CommandRecognizer {
    fn transcribe(&self, segment: &SpeechSegment) -> Result<TranscriptionResult, AsrError> {
        if segment.samples.is_empty() {
            return Err(AsrError::EmptySegment);
        }
        let path = TempWav(std::env::temp_dir().join(format!("newsgpt-{}.wav", uuid::Uuid::new_v4())));
        std::fs::write(&path.0, segment_to_wav(segment)).map_err(|e| AsrError::Transport(e.to_string()))?;
        let out = Command::new(&self.program)
            .args(&self.args)
            .arg(&path.0)
            .output()
            .map_err(|e| AsrError::Transport(format!("{}: {e}", self.program)))?;
        if !out.status.success() {
            return Err(AsrError::Transport(format!("{} exited with {}", self.program, out.status)));
        }
        let text = String::from_utf8(out.stdout).map_err(|e| AsrError::InvalidResponse(e.to_string()))?;
        Ok(TranscriptionResult {
            text: text.trim().to_string(),
            confidence: None,
        })
    }
}

/// Loads `{"utt-1": "text", ...}` into a mock recognizer.
pub fn load_mock(path: &Path) -> Result<MockRecognizer> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: BTreeMap<String, String> =
        serde_json::from_str(&text).with_context(|| format!("{}: expected a JSON object of strings", path.display()))?;
    Ok(map.into_iter().collect())
}

pub fn build_recognizer(section: &AsrSection) -> Result<Box<dyn SpeechRecognizer>> {
    Ok(match section {
        AsrSection::Mock { fixtures: None } => Box::new(MockRecognizer::new()),
        AsrSection::Mock { fixtures: Some(p) } => Box::new(load_mock(p)?),
        AsrSection::Http { url, timeout_s } => {
            Box::new(HttpRecognizer::new(url.clone(), Duration::from_secs(timeout_s.unwrap_or(30))))
        }
        AsrSection::Command { program, args } => Box::new(CommandRecognizer::new(program.clone(), args.clone())),
    })
}

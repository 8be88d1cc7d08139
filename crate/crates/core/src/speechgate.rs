//! Volume-gated speech detection and the speech recognition boundary.
//!
//! The detector idles until a frame's RMS reaches the threshold, records
//! until trailing silence strictly exceeds the timeout (2.5 s by default),
//! then hands the whole segment, trailing silence included, to a
//! [`SpeechRecognizer`].

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AudioError {
    #[error("audio frame is empty")]
    EmptyFrame,
    #[error("sample {index} out of range: {value}")]
    SampleOutOfRange { index: usize, value: f32 },
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error("PCM payload has odd length {0}")]
    OddPcmLength(usize),
}

/// A run of mono samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioFrame {
    samples: Vec<f32>,
    sample_rate: u32,
}

impl AudioFrame {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self, AudioError> {
        if samples.is_empty() {
            return Err(AudioError::EmptyFrame);
        }
        if sample_rate == 0 {
            return Err(AudioError::ZeroSampleRate);
        }
        if let Some((index, &value)) = samples
            .iter()
            .enumerate()
            .find(|(_, s)| !(-1.0..=1.0).contains(*s))
        {
            return Err(AudioError::SampleOutOfRange { index, value });
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate as f64
    }
}

/// Decodes little-endian signed 16-bit PCM into samples in `[-1, 1]`.
pub fn pcm16_to_samples(bytes: &[u8]) -> Result<Vec<f32>, AudioError> {
    if !bytes.len().is_multiple_of(2) {
        return Err(AudioError::OddPcmLength(bytes.len()));
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]) as f32 / 32768.0)
        .collect())
}

/// Inverse of [`pcm16_to_samples`], saturating at full scale.
pub fn samples_to_pcm16(samples: &[f32]) -> Vec<u8> {
    samples
        .iter()
        .flat_map(|&s| {
            let v = libm::roundf(s * 32768.0).clamp(i16::MIN as f32, i16::MAX as f32) as i16;
            v.to_le_bytes()
        })
        .collect()
}

/// Root mean square of the frame's samples.
pub fn frame_rms(frame: &AudioFrame) -> f64 {
    let sum: f64 = frame
        .samples
        .iter()
        .map(|&s| {
            let s = s as f64;
            s * s
        })
        .sum();
    libm::sqrt(sum / frame.samples.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Onset level; frames with RMS at or above it are speech.
    pub rms_threshold: f64,
    pub silence_timeout_ms: f64,
    pub frame_ms: u32,
    /// Quiet frames kept from before the onset.
    pub preroll_frames: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            rms_threshold: 0.02,
            silence_timeout_ms: 2500.0,
            frame_ms: 50,
            preroll_frames: 6,
        }
    }
}

impl DetectorConfig {
    /// Samples per frame at `sample_rate`, at least one.
    pub fn frame_samples(&self, sample_rate: u32) -> usize {
        ((sample_rate as u64 * self.frame_ms as u64 / 1000) as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Idle,
    Recording,
}

/// A finished utterance: every buffered frame concatenated.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeechSegment {
    /// Key used by fixture-backed recognizers; assigned by the caller.
    pub label: String,
    pub samples: Vec<f32>,
    pub sample_rate: u32,
    pub frame_count: usize,
}

impl SpeechSegment {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorEvent {
    None,
    Started,
    Stopped(SpeechSegment),
}

/// The speech detector state machine. One per session.
#[derive(Debug, Clone)]
pub struct SpeechDetector {
    config: DetectorConfig,
    phase: Phase,
    preroll: VecDeque<AudioFrame>,
    buffered: Vec<AudioFrame>,
    trailing_silence_ms: f64,
}

impl SpeechDetector {
    pub fn new(config: DetectorConfig) -> Self {
        Self {
            config,
            phase: Phase::Idle,
            preroll: VecDeque::with_capacity(config.preroll_frames),
            buffered: Vec::new(),
            trailing_silence_ms: 0.0,
        }
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn trailing_silence_ms(&self) -> f64 {
        self.trailing_silence_ms
    }

    /// Frames buffered for the current utterance (empty while idle).
    pub fn buffered_frames(&self) -> usize {
        self.buffered.len()
    }

    pub fn preroll_frames(&self) -> usize {
        self.preroll.len()
    }

    /// Back to idle, dropping any partial utterance and the preroll ring.
    pub fn reset(&mut self) {
        self.phase = Phase::Idle;
        self.preroll.clear();
        self.buffered.clear();
        self.trailing_silence_ms = 0.0;
    }

    pub fn feed(&mut self, frame: AudioFrame) -> DetectorEvent {
        let loud = frame_rms(&frame) >= self.config.rms_threshold;
        match self.phase {
            Phase::Idle if loud => {
                self.phase = Phase::Recording;
                self.trailing_silence_ms = 0.0;
                self.buffered.extend(self.preroll.drain(..));
                self.buffered.push(frame);
                DetectorEvent::Started
            }
            Phase::Idle => {
                if self.config.preroll_frames > 0 {
                    if self.preroll.len() == self.config.preroll_frames {
                        self.preroll.pop_front();
                    }
                    self.preroll.push_back(frame);
                }
                DetectorEvent::None
            }
            Phase::Recording => {
                if loud {
                    self.trailing_silence_ms = 0.0;
                } else {
                    self.trailing_silence_ms += frame.duration_ms();
                }
                self.buffered.push(frame);
                if self.trailing_silence_ms > self.config.silence_timeout_ms {
                    DetectorEvent::Stopped(self.finish())
                } else {
                    DetectorEvent::None
                }
            }
        }
    }

    fn finish(&mut self) -> SpeechSegment {
        let frames = core::mem::take(&mut self.buffered);
        let sample_rate = frames.first().map_or(16_000, |f| f.sample_rate);
        let frame_count = frames.len();
        let mut samples = Vec::with_capacity(frames.iter().map(|f| f.samples.len()).sum());
        for f in frames {
            samples.extend_from_slice(&f.samples);
        }
        self.phase = Phase::Idle;
        self.trailing_silence_ms = 0.0;
        SpeechSegment {
            label: String::new(),
            samples,
            sample_rate,
            frame_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptionResult {
    pub text: String,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsrError {
    #[error("speech segment is empty")]
    EmptySegment,
    #[error("recognizer transport error: {0}")]
    Transport(String),
    #[error("recognizer returned an invalid response: {0}")]
    InvalidResponse(String),
}

/// Turns an audio segment into text. Implementations are shared across
/// sessions and must tolerate concurrent calls.
pub trait SpeechRecognizer: Send + Sync {
    fn transcribe(&self, segment: &SpeechSegment) -> Result<TranscriptionResult, AsrError>;
}

/// Fixture recognizer keyed by segment label. Unknown labels transcribe to
/// empty text with confidence 0.
#[derive(Debug, Clone, Default)]
pub struct MockRecognizer {
    fixtures: BTreeMap<String, String>,
}

impl MockRecognizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fixture(mut self, label: impl Into<String>, text: impl Into<String>) -> Self {
        self.fixtures.insert(label.into(), text.into());
        self
    }
}

impl FromIterator<(String, String)> for MockRecognizer {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        Self {
            fixtures: iter.into_iter().collect(),
        }
    }
}

impl SpeechRecognizer for MockRecognizer {
    fn transcribe(&self, segment: &SpeechSegment) -> Result<TranscriptionResult, AsrError> {
        if segment.samples.is_empty() {
            return Err(AsrError::EmptySegment);
        }
        Ok(match self.fixtures.get(&segment.label) {
            Some(text) => TranscriptionResult {
                text: text.clone(),
                confidence: Some(1.0),
            },
            None => TranscriptionResult {
                text: String::new(),
                confidence: Some(0.0),
            },
        })
    }
}

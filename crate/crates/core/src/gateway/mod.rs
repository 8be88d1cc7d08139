//! Client/server protocol and the per-session state machine.
//!
//! Control messages travel as JSON text tagged by `type`. Audio travels as
//! binary frames: an 8-byte little-endian sequence number followed by
//! little-endian 16-bit mono PCM.

mod session;
mod table;

use alloc::string::String;
use alloc::vec::Vec;

pub use session::{measure_latency, Session, SessionConfig, SessionDeps};
pub use table::{SessionTable, DEFAULT_IDLE_TIMEOUT_MS};

pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;
pub const MAX_CHUNK_BYTES: usize = 64 * 1024;
pub const AUDIO_HEADER_BYTES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientKind {
    Robot,
    Console,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionPhase {
    Listening,
    Transcribing,
    Thinking,
    Speaking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Thought,
    Action,
    Observation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    NoSession,
    AlreadyConnected,
    OutOfOrder,
    TooLarge,
    NotListening,
    Malformed,
    AsrError,
    AgentError,
}

fn default_sample_rate() -> u32 {
    DEFAULT_SAMPLE_RATE
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WireMessage {
    ClientHello {
        client_kind: ClientKind,
        #[serde(default = "default_sample_rate")]
        sample_rate: u32,
    },
    ListenStart,
    /// Usually sent as a binary frame; the JSON form carries `pcm` as a byte array.
    AudioChunk {
        seq: u64,
        pcm: Vec<u8>,
    },
    TextUtterance {
        text: String,
    },
    Welcome {
        session_id: String,
    },
    StateUpdate {
        phase: SessionPhase,
    },
    Transcript {
        text: String,
    },
    TraceEvent {
        kind: TraceKind,
        body: String,
    },
    Answer {
        text: String,
        latency_ms: f64,
    },
    #[serde(rename = "error")]
    ErrorMsg {
        code: ErrorCode,
        message: String,
    },
}

impl WireMessage {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        Self::ErrorMsg {
            code,
            message: message.into(),
        }
    }

    /// True for the variants only a server sends.
    pub fn is_server_message(&self) -> bool {
        matches!(
            self,
            Self::Welcome { .. }
                | Self::StateUpdate { .. }
                | Self::Transcript { .. }
                | Self::TraceEvent { .. }
                | Self::Answer { .. }
                | Self::ErrorMsg { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("binary audio frame shorter than its {AUDIO_HEADER_BYTES}-byte header")]
pub struct ShortFrame;

pub fn encode_audio_frame(seq: u64, pcm: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(AUDIO_HEADER_BYTES + pcm.len());
    out.extend_from_slice(&seq.to_le_bytes());
    out.extend_from_slice(pcm);
    out
}

/// Splits a binary frame into an `AudioChunk`.
pub fn decode_audio_frame(frame: &[u8]) -> Result<WireMessage, ShortFrame> {
    if frame.len() < AUDIO_HEADER_BYTES {
        return Err(ShortFrame);
    }
    let (head, pcm) = frame.split_at(AUDIO_HEADER_BYTES);
    let mut seq = [0u8; AUDIO_HEADER_BYTES];
    seq.copy_from_slice(head);
    Ok(WireMessage::AudioChunk {
        seq: u64::from_le_bytes(seq),
        pcm: pcm.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audio_frame_round_trip() {
        let frame = encode_audio_frame(7, &[1, 2, 3, 4]);
        assert_eq!(frame.len(), 12);
        assert_eq!(
            decode_audio_frame(&frame),
            Ok(WireMessage::AudioChunk {
                seq: 7,
                pcm: alloc::vec![1, 2, 3, 4]
            })
        );
        assert_eq!(decode_audio_frame(&[0; 7]), Err(ShortFrame));
    }
}

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ClientKind, ErrorCode, SessionPhase, TraceKind, WireMessage, MAX_CHUNK_BYTES};
use crate::agent::{
    run_agent, AgentConfig, AgentEvent, ChatRole, Clock, CompletionProvider, ConversationHistory,
    DEFAULT_HISTORY_TURNS,
};
use crate::speechgate::{
    pcm16_to_samples, AudioFrame, DetectorConfig, DetectorEvent, SpeechDetector, SpeechRecognizer,
    SpeechSegment,
};
use crate::tools::ToolRegistry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub detector: DetectorConfig,
    pub history_turns: usize,
    /// Drop `trace_event` messages for robot clients.
    pub suppress_robot_trace: bool,
    pub max_chunk_bytes: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            detector: DetectorConfig::default(),
            history_turns: DEFAULT_HISTORY_TURNS,
            suppress_robot_trace: false,
            max_chunk_bytes: MAX_CHUNK_BYTES,
        }
    }
}

/// Shared, read-only services a session calls into.
#[derive(Clone, Copy)]
pub struct SessionDeps<'a> {
    pub tools: &'a ToolRegistry,
    pub provider: &'a dyn CompletionProvider,
    pub recognizer: &'a dyn SpeechRecognizer,
    pub clock: &'a dyn Clock,
    pub agent: &'a AgentConfig,
}

/// Milliseconds between two clock marks, zero if they are out of order.
pub fn measure_latency(question_ready_us: u64, answer_ready_us: u64) -> f64 {
    answer_ready_us.saturating_sub(question_ready_us) as f64 / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Client {
    kind: ClientKind,
    sample_rate: u32,
}

/// One connected client. Messages must be handled in arrival order.
pub struct Session {
    id: String,
    config: SessionConfig,
    client: Option<Client>,
    history: ConversationHistory,
    detector: SpeechDetector,
    listening: bool,
    armed_once: bool,
    last_seq: Option<u64>,
    pending: Vec<f32>,
    utterances: u64,
    phase: Option<SessionPhase>,
    created_us: u64,
    last_active_us: u64,
}

impl Session {
    pub fn new(id: impl Into<String>, config: SessionConfig, now_us: u64) -> Self {
        Self {
            id: id.into(),
            config,
            client: None,
            history: ConversationHistory::new(config.history_turns),
            detector: SpeechDetector::new(config.detector),
            listening: false,
            armed_once: false,
            last_seq: None,
            pending: Vec::new(),
            utterances: 0,
            phase: None,
            created_us: now_us,
            last_active_us: now_us,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn client_kind(&self) -> Option<ClientKind> {
        self.client.map(|c| c.kind)
    }

    pub fn history(&self) -> &ConversationHistory {
        &self.history
    }

    pub fn detector(&self) -> &SpeechDetector {
        &self.detector
    }

    pub fn is_listening(&self) -> bool {
        self.listening
    }

    pub fn last_seq(&self) -> Option<u64> {
        self.last_seq
    }

    /// Last phase announced to the client.
    pub fn phase(&self) -> Option<SessionPhase> {
        self.phase
    }

    pub fn created_us(&self) -> u64 {
        self.created_us
    }

    pub fn last_active_us(&self) -> u64 {
        self.last_active_us
    }

    /// Collects the outbound messages for `msg`.
    pub fn handle_message(&mut self, msg: WireMessage, deps: &SessionDeps<'_>) -> Vec<WireMessage> {
        let mut out = Vec::new();
        self.handle_message_with(msg, deps, &mut |m| out.push(m));
        out
    }

    /// Processes one inbound message, passing outbound messages to `sink` as
    /// they are produced.
    pub fn handle_message_with(
        &mut self,
        msg: WireMessage,
        deps: &SessionDeps<'_>,
        sink: &mut dyn FnMut(WireMessage),
    ) {
        self.last_active_us = deps.clock.now_us();
        if msg.is_server_message() {
            sink(WireMessage::error(ErrorCode::Malformed, "server-only message type"));
            return;
        }
        let client = match (&msg, self.client) {
            (
                WireMessage::ClientHello {
                    client_kind,
                    sample_rate,
                },
                None,
            ) => {
                if *sample_rate == 0 {
                    sink(WireMessage::error(ErrorCode::Malformed, "sample_rate must be positive"));
                    return;
                }
                self.client = Some(Client {
                    kind: *client_kind,
                    sample_rate: *sample_rate,
                });
                sink(WireMessage::Welcome {
                    session_id: self.id.clone(),
                });
                return;
            }
            (WireMessage::ClientHello { .. }, Some(_)) => {
                sink(WireMessage::error(ErrorCode::AlreadyConnected, "client_hello already received"));
                return;
            }
            (_, None) => {
                sink(WireMessage::error(ErrorCode::NoSession, "send client_hello first"));
                return;
            }
            (_, Some(client)) => client,
        };

        match msg {
            WireMessage::ListenStart => {
                self.arm();
                self.announce(SessionPhase::Listening, sink);
            }
            WireMessage::AudioChunk { seq, pcm } => self.on_audio(client, seq, &pcm, deps, sink),
            WireMessage::TextUtterance { text } => {
                if text.trim().is_empty() {
                    sink(WireMessage::error(ErrorCode::Malformed, "empty text_utterance"));
                    return;
                }
                let mark = deps.clock.now_us();
                self.answer(client, text.trim(), mark, deps, sink);
            }
            _ => unreachable!("hello and server messages handled above"),
        }
    }

    fn arm(&mut self) {
        self.detector.reset();
        self.pending.clear();
        self.listening = true;
        self.armed_once = true;
    }

    fn announce(&mut self, phase: SessionPhase, sink: &mut dyn FnMut(WireMessage)) {
        self.phase = Some(phase);
        sink(WireMessage::StateUpdate { phase });
    }

    fn on_audio(
        &mut self,
        client: Client,
        seq: u64,
        pcm: &[u8],
        deps: &SessionDeps<'_>,
        sink: &mut dyn FnMut(WireMessage),
    ) {
        if pcm.len() > self.config.max_chunk_bytes {
            sink(WireMessage::error(
                ErrorCode::TooLarge,
                format!("audio chunk of {} bytes exceeds {}", pcm.len(), self.config.max_chunk_bytes),
            ));
            return;
        }
        if let Some(last) = self.last_seq {
            if seq <= last {
                sink(WireMessage::error(
                    ErrorCode::OutOfOrder,
                    format!("seq {seq} after {last}"),
                ));
                return;
            }
        }
        let Ok(samples) = pcm16_to_samples(pcm) else {
            sink(WireMessage::error(ErrorCode::Malformed, "pcm must hold whole 16-bit samples"));
            return;
        };
        if !self.armed_once {
            sink(WireMessage::error(ErrorCode::NotListening, "send listen_start first"));
            return;
        }
        self.last_seq = Some(seq);
        if !self.listening {
            // Tail of a finished utterance, sent before the client saw the phase change.
            return;
        }
        self.pending.extend_from_slice(&samples);

        let frame_len = self.config.detector.frame_samples(client.sample_rate);
        let mut start = 0;
        while self.pending.len() - start >= frame_len {
            let chunk = self.pending[start..start + frame_len].to_vec();
            start += frame_len;
            let Ok(frame) = AudioFrame::new(chunk, client.sample_rate) else {
                continue;
            };
            if let DetectorEvent::Stopped(segment) = self.detector.feed(frame) {
                self.listening = false;
                self.pending.clear();
                self.on_segment(client, segment, deps, sink);
                return;
            }
        }
        self.pending.drain(..start);
    }

    fn on_segment(
        &mut self,
        client: Client,
        segment: SpeechSegment,
        deps: &SessionDeps<'_>,
        sink: &mut dyn FnMut(WireMessage),
    ) {
        self.utterances += 1;
        let segment = segment.with_label(format!("utt-{}", self.utterances));
        self.announce(SessionPhase::Transcribing, sink);
        let text = match deps.recognizer.transcribe(&segment) {
            Ok(result) => result.text,
            Err(e) => {
                sink(WireMessage::error(ErrorCode::AsrError, format!("{e}")));
                String::new()
            }
        };
        let text = text.trim();
        if text.is_empty() {
            self.arm();
            self.announce(SessionPhase::Listening, sink);
            return;
        }
        let mark = deps.clock.now_us();
        sink(WireMessage::Transcript { text: text.into() });
        self.answer(client, text, mark, deps, sink);
    }

    fn answer(
        &mut self,
        client: Client,
        question: &str,
        question_ready_us: u64,
        deps: &SessionDeps<'_>,
        sink: &mut dyn FnMut(WireMessage),
    ) {
        self.announce(SessionPhase::Thinking, sink);
        let stream_trace = !(self.config.suppress_robot_trace && client.kind == ClientKind::Robot);
        let mut observer = |event: &AgentEvent| {
            if !stream_trace {
                return;
            }
            let (kind, body) = match event {
                AgentEvent::Thought(t) => (TraceKind::Thought, t.clone()),
                AgentEvent::Action { name, input } => (TraceKind::Action, format!("{name}: {input}")),
                AgentEvent::Observation(o) => (TraceKind::Observation, o.clone()),
            };
            sink(WireMessage::TraceEvent { kind, body });
        };
        let result = run_agent(
            question,
            &self.history,
            deps.tools,
            deps.provider,
            deps.agent,
            deps.clock,
            &mut observer,
        );
        match result {
            Ok(run) => {
                let answer_ready_us = deps.clock.now_us();
                self.history
                    .push(ChatRole::User, question, question_ready_us / 1000);
                self.history
                    .push(ChatRole::Assistant, run.answer.text.clone(), answer_ready_us / 1000);
                sink(WireMessage::Answer {
                    text: run.answer.text,
                    latency_ms: measure_latency(question_ready_us, answer_ready_us),
                });
                self.announce(SessionPhase::Speaking, sink);
            }
            Err(e) => {
                sink(WireMessage::error(ErrorCode::AgentError, format!("{e}")));
            }
        }
    }
}

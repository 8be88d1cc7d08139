//! WebSocket gateway and questionnaire endpoint.
//!
//! Routes:
//! - `GET /ws`: the robot/console protocol (see `docs/protocol.md`);
//! - `GET /questionnaire`: the questionnaire schema as JSON;
//! - `POST /questionnaire`: a filled-in questionnaire;
//! - `GET /healthz`.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use axum::extract::rejection::JsonRejection;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use newsgpt_core::agent::{AgentConfig, Clock, CompletionProvider, ScriptedProvider};
use newsgpt_core::classifier::ModelParams;
use newsgpt_core::evalkit::{Questionnaire, QuestionnaireSubmission};
use newsgpt_core::gateway::{
    decode_audio_frame, ErrorCode, Session, SessionConfig, SessionDeps, SessionTable, WireMessage,
    AUDIO_HEADER_BYTES,
};
use newsgpt_core::speechgate::SpeechRecognizer;
use newsgpt_core::tools::{FactCheckTool, NewsTool, SearchTool, ToolRegistry};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::{mpsc, Notify};

use crate::asr::build_recognizer;
use crate::clients::{GNewsClient, SerpClient};
use crate::clock::SystemClock;
use crate::config::{api_key, Config};
use crate::llm::{scripted_provider, RemoteProvider};
use crate::params_io::load_params;
use crate::report::SD_HEADER;
use crate::session_log::{Direction, LogEntry, SessionLog};

pub const BUNDLED_QUESTIONNAIRE: &str = include_str!("../data/questionnaire.json");

/// Which completion provider answers questions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LlmChoice {
    /// Replay a fixture; every session starts from the top of the script.
    Scripted(PathBuf),
    Remote,
}

impl FromStr for LlmChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            _ if s == "remote" => Ok(Self::Remote),
            Some(("scripted", path)) if !path.is_empty() => Ok(Self::Scripted(path.into())),
            _ => Err(format!("expected `remote` or `scripted:<fixture>`, got `{s}`")),
        }
    }
}

pub enum ProviderSource {
    Scripted(ScriptedProvider),
    Shared(Arc<dyn CompletionProvider>),
}

impl ProviderSource {
    fn for_session(&self) -> Arc<dyn CompletionProvider> {
        match self {
            Self::Scripted(p) => Arc::new(p.clone()),
            Self::Shared(p) => p.clone(),
        }
    }
}

pub struct AppState {
    pub session_config: SessionConfig,
    pub agent: AgentConfig,
    pub tools: ToolRegistry,
    pub providers: ProviderSource,
    pub recognizer: Box<dyn SpeechRecognizer>,
    pub clock: SystemClock,
    pub questionnaire: Questionnaire,
    pub responses_csv: PathBuf,
    pub submissions_log: PathBuf,
    pub log_dir: PathBuf,
    pub idle_timeout_ms: u64,
    pub sweep_interval: Duration,
    table: Mutex<SessionTable>,
    closers: Mutex<HashMap<String, Arc<Notify>>>,
    responses_lock: Mutex<()>,
}

pub fn load_questionnaire(config: &Config) -> Result<Questionnaire> {
    match &config.server.questionnaire {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(serde_json::from_str(BUNDLED_QUESTIONNAIRE)?),
    }
}

pub fn build_tools(config: &Config) -> Result<ToolRegistry> {
    let news_key = api_key(&config.news.api_key_env);
    let serp_key = api_key(&config.search.api_key_env);
    if news_key.is_none() {
        tracing::warn!("{} is not set; news requests go out without a key", config.news.api_key_env);
    }
    if serp_key.is_none() {
        tracing::warn!("{} is not set; search requests go out without a key", config.search.api_key_env);
    }
    let news = GNewsClient::new(
        config.news.endpoint.clone(),
        news_key,
        config.news.lang.clone(),
        Duration::from_secs(config.news.timeout_s),
    );
    let search = SerpClient::new(
        config.search.endpoint.clone(),
        serp_key,
        config.search.engine.clone(),
        Duration::from_secs(config.search.timeout_s),
    );
    let fact_check = match &config.classifier.params {
        Some(p) => FactCheckTool::new(Arc::new(load_params(p)?) as Arc<ModelParams>),
        None => FactCheckTool::unloaded(),
    };
    Ok(ToolRegistry::new()
        .with(NewsTool::new(news).with_max_results(config.news.max_results))?
        .with(SearchTool::new(search).with_max_results(config.search.max_results))?
        .with(fact_check)?)
}

impl AppState {
    /// Builds every backend named by `config`. Blocking HTTP clients are
    /// created here, so call it outside an async context.
    pub fn from_config(config: &Config, llm: &LlmChoice) -> Result<Self> {
        let providers = match llm {
            LlmChoice::Scripted(p) => ProviderSource::Scripted(scripted_provider(p)?),
            LlmChoice::Remote => {
                let key = api_key(&config.llm.api_key_env);
                if key.is_none() {
                    bail!("{} must be set for the remote provider", config.llm.api_key_env);
                }
                ProviderSource::Shared(Arc::new(RemoteProvider::new(
                    &config.llm.base_url,
                    key,
                    config.llm.model.clone(),
                    config.llm.temperature,
                    Duration::from_secs(config.llm.timeout_s),
                )))
            }
        };
        Ok(Self::new(
            config,
            build_tools(config)?,
            providers,
            build_recognizer(&config.asr)?,
            load_questionnaire(config)?,
        ))
    }

    pub fn new(
        config: &Config,
        tools: ToolRegistry,
        providers: ProviderSource,
        recognizer: Box<dyn SpeechRecognizer>,
        questionnaire: Questionnaire,
    ) -> Self {
        Self {
            session_config: config.session(),
            agent: config.agent(),
            tools,
            providers,
            recognizer,
            clock: SystemClock::new(),
            questionnaire,
            responses_csv: config.server.responses_csv.clone(),
            submissions_log: config.server.submissions_log.clone(),
            log_dir: config.server.log_dir.clone(),
            idle_timeout_ms: config.server.idle_timeout_s.saturating_mul(1000),
            sweep_interval: Duration::from_secs(config.server.sweep_interval_s.max(1)),
            table: Mutex::new(SessionTable::new()),
            closers: Mutex::new(HashMap::new()),
            responses_lock: Mutex::new(()),
        }
    }

    pub fn session_count(&self) -> usize {
        self.table.lock().unwrap().len()
    }

    /// Closes idle sessions and signals their connections.
    pub fn sweep(&self) -> Vec<String> {
        let closed = self
            .table
            .lock()
            .unwrap()
            .sweep(self.clock.now_us(), self.idle_timeout_ms);
        let closers = self.closers.lock().unwrap();
        for id in &closed {
            if let Some(n) = closers.get(id) {
                n.notify_one();
            }
            tracing::info!(session = %id, "closed idle session");
        }
        closed
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/ws", get(ws_handler))
        .route("/questionnaire", get(get_questionnaire).post(post_questionnaire))
        .route("/healthz", get(|| async { "ok" }))
        .with_state(state)
}

/// Serves until Ctrl-C, sweeping idle sessions in the background.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    let sweeper = tokio::spawn(sweep_loop(state.clone()));
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    sweeper.abort();
    result
}

async fn sweep_loop(state: Arc<AppState>) {
    let mut tick = tokio::time::interval(state.sweep_interval);
    tick.tick().await;
    loop {
        tick.tick().await;
        state.sweep();
    }
}

async fn ws_handler(ws: WebSocketUpgrade, State(state): State<Arc<AppState>>) -> Response {
    let limit = (state.session_config.max_chunk_bytes + AUDIO_HEADER_BYTES) * 4;
    ws.max_message_size(limit)
        .on_upgrade(move |socket| connection(state, socket))
}

type SharedLog = Arc<Mutex<Option<SessionLog>>>;

fn log_entry(log: &SharedLog, entry: LogEntry) {
    if let Some(l) = log.lock().unwrap().as_mut() {
        if let Err(e) = l.append(&entry) {
            tracing::warn!("session log write failed: {e:#}");
        }
    }
}

async fn connection(state: Arc<AppState>, socket: WebSocket) {
    let id = uuid::Uuid::new_v4().to_string();
    state
        .table
        .lock()
        .unwrap()
        .insert(Session::new(id.clone(), state.session_config, state.clock.now_us()));
    let close = Arc::new(Notify::new());
    state.closers.lock().unwrap().insert(id.clone(), close.clone());
    let log: SharedLog = Arc::new(Mutex::new(match SessionLog::create(&state.log_dir, &id) {
        Ok(l) => Some(l),
        Err(e) => {
            tracing::warn!("session log disabled: {e:#}");
            None
        }
    }));
    let provider = state.providers.for_session();
    tracing::info!(session = %id, "connected");

    let (mut ws_tx, mut ws_rx) = socket.split();
    let (tx, mut rx) = mpsc::unbounded_channel::<WireMessage>();
    let writer = tokio::spawn(async move {
        while let Some(m) = rx.recv().await {
            let text = serde_json::to_string(&m).expect("wire messages serialize");
            if ws_tx.send(Message::Text(text.into())).await.is_err() {
                break;
            }
        }
        let _ = ws_tx.close().await;
    });

    let emit = {
        let (tx, log, state) = (tx.clone(), log.clone(), state.clone());
        move |m: WireMessage| {
            log_entry(&log, LogEntry::message(state.clock.now_us(), Direction::Out, &m));
            let _ = tx.send(m);
        }
    };

    loop {
        let incoming = tokio::select! {
            _ = close.notified() => break,
            m = ws_rx.next() => m,
        };
        let wire = match incoming {
            None | Some(Err(_)) | Some(Ok(Message::Close(_))) => break,
            Some(Ok(Message::Text(t))) => match serde_json::from_str::<WireMessage>(t.as_str()) {
                Ok(w) => w,
                Err(e) => {
                    emit(WireMessage::error(ErrorCode::Malformed, format!("invalid message: {e}")));
                    continue;
                }
            },
            Some(Ok(Message::Binary(b))) => match decode_audio_frame(&b) {
                Ok(w) => w,
                Err(_) => {
                    emit(WireMessage::error(ErrorCode::Malformed, "audio frame shorter than its header"));
                    continue;
                }
            },
            Some(Ok(_)) => continue,
        };
        log_entry(&log, LogEntry::message(state.clock.now_us(), Direction::In, &wire));
        let Some(mut session) = state.table.lock().unwrap().remove(&id) else {
            break;
        };
        let (st, provider, mut emit) = (state.clone(), provider.clone(), emit.clone());
        let done = tokio::task::spawn_blocking(move || {
            let deps = SessionDeps {
                tools: &st.tools,
                provider: provider.as_ref(),
                recognizer: st.recognizer.as_ref(),
                clock: &st.clock,
                agent: &st.agent,
            };
            session.handle_message_with(wire, &deps, &mut emit);
            session
        })
        .await;
        match done {
            Ok(session) => {
                state.table.lock().unwrap().insert(session);
            }
            Err(e) => {
                tracing::error!(session = %id, "session task failed: {e}");
                break;
            }
        }
    }

    state.table.lock().unwrap().remove(&id);
    state.closers.lock().unwrap().remove(&id);
    drop(emit);
    drop(tx);
    let _ = writer.await;
    tracing::info!(session = %id, "disconnected");
}

async fn get_questionnaire(State(state): State<Arc<AppState>>) -> Json<Questionnaire> {
    Json(state.questionnaire.clone())
}

fn json_error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn post_questionnaire(
    State(state): State<Arc<AppState>>,
    body: Result<Json<QuestionnaireSubmission>, JsonRejection>,
) -> Response {
    let Json(submission) = match body {
        Ok(b) => b,
        Err(e) => return json_error(e.status(), e.body_text()),
    };
    let responses = match submission.to_sd_responses(&state.questionnaire) {
        Ok(r) => r,
        Err(e) => return json_error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    };
    let st = state.clone();
    let stored = tokio::task::spawn_blocking(move || -> Result<()> {
        let _guard = st.responses_lock.lock().unwrap();
        append_responses(&st.responses_csv, &responses)?;
        if let Some(dir) = st.submissions_log.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&st.submissions_log)?;
        writeln!(f, "{}", serde_json::to_string(&submission)?)?;
        Ok(())
    })
    .await;
    match stored {
        Ok(Ok(())) => (
            StatusCode::CREATED,
            Json(json!({ "status": "recorded", "items": state.questionnaire.items.len() })),
        )
            .into_response(),
        Ok(Err(e)) => json_error(StatusCode::INTERNAL_SERVER_ERROR, format!("{e:#}")),
        Err(e) => json_error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

fn append_responses(path: &std::path::Path, responses: &[newsgpt_core::evalkit::SDResponse]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(SD_HEADER)?;
    }
    for r in responses {
        w.write_record([r.respondent.as_str(), r.item.as_str(), &r.rating.get().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn llm_choice_parsing() {
        assert_eq!("remote".parse::<LlmChoice>(), Ok(LlmChoice::Remote));
        assert_eq!(
            "scripted:fixtures/a.json".parse::<LlmChoice>(),
            Ok(LlmChoice::Scripted("fixtures/a.json".into()))
        );
        assert!("scripted:".parse::<LlmChoice>().is_err());
        assert!("local".parse::<LlmChoice>().is_err());
    }

    #[test]
    fn bundled_questionnaire_parses() {
        let q: Questionnaire = serde_json::from_str(BUNDLED_QUESTIONNAIRE).unwrap();
        assert_eq!(q.items.len(), 8);
        assert!(q.preference.choices.len() >= 2);
    }
}

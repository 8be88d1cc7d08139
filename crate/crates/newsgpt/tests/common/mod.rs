#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use newsgpt::config::{AsrSection, Config};
use newsgpt::server::{serve, AppState, LlmChoice};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap()
}

/// Stand-in for the news and search APIs, recording every query string.
pub struct FixtureHttp {
    pub addr: SocketAddr,
    pub queries: Arc<Mutex<Vec<String>>>,
}

impl FixtureHttp {
    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }

    pub fn queries(&self) -> Vec<String> {
        self.queries.lock().unwrap().clone()
    }
}

type Recorded = Arc<Mutex<Vec<String>>>;

fn record(log: &Recorded, q: &std::collections::HashMap<String, String>) {
    let mut pairs: Vec<_> = q.iter().map(|(k, v)| format!("{k}={v}")).collect();
    pairs.sort();
    log.lock().unwrap().push(pairs.join("&"));
}

async fn gnews(State(log): State<Recorded>, Query(q): Query<std::collections::HashMap<String, String>>) -> impl IntoResponse {
    record(&log, &q);
    ([("content-type", "application/json")], read_fixture("http/gnews_usa.json"))
}

async fn serp(State(log): State<Recorded>, Query(q): Query<std::collections::HashMap<String, String>>) -> impl IntoResponse {
    record(&log, &q);
    let body = if q.get("q").is_some_and(|s| s.to_lowercase().contains("france")) {
        read_fixture("http/serp_capital.json")
    } else {
        r#"{"organic_results": []}"#.to_string()
    };
    ([("content-type", "application/json")], body)
}

pub fn fixture_http() -> FixtureHttp {
    let queries: Recorded = Arc::default();
    let log = queries.clone();
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let app = Router::new()
                .route("/gnews", get(gnews))
                .route("/serp", get(serp))
                .route("/status500", get(|| async { (StatusCode::INTERNAL_SERVER_ERROR, "boom") }))
                .route("/garbage", get(|| async { "not json" }))
                .route(
                    "/slow",
                    get(|| async {
                        tokio::time::sleep(Duration::from_secs(5)).await;
                        "{}"
                    }),
                )
                .with_state(log);
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    FixtureHttp {
        addr: rx.recv().unwrap(),
        queries,
    }
}

/// A running gateway with its own fixture backends and scratch directory.
pub struct Gateway {
    pub addr: SocketAddr,
    pub state: Arc<AppState>,
    pub dir: tempfile::TempDir,
    pub http: FixtureHttp,
}

impl Gateway {
    pub fn ws_url(&self) -> String {
        format!("ws://{}/ws", self.addr)
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }

    pub fn log_dir(&self) -> PathBuf {
        self.dir.path().join("sessions")
    }
}

pub fn test_config(http: &FixtureHttp, dir: &Path) -> Config {
    let mut c = Config::default();
    c.server.log_dir = dir.join("sessions");
    c.server.responses_csv = dir.join("sessions/sd_responses.csv");
    c.server.submissions_log = dir.join("sessions/questionnaire.jsonl");
    c.news.endpoint = http.url("/gnews");
    c.search.endpoint = http.url("/serp");
    c.news.api_key_env = "NEWSGPT_TEST_UNSET_NEWS_KEY".into();
    c.search.api_key_env = "NEWSGPT_TEST_UNSET_SERP_KEY".into();
    c.asr = AsrSection::Mock {
        fixtures: Some(fixture("asr.json")),
    };
    c
}

/// Starts a gateway on an ephemeral port. `tweak` adjusts the config.
pub fn start_gateway(script: &str, tweak: impl FnOnce(&mut Config)) -> Gateway {
    let http = fixture_http();
    let dir = tempfile::tempdir().unwrap();
    let mut config = test_config(&http, dir.path());
    tweak(&mut config);
    let state = Arc::new(AppState::from_config(&config, &LlmChoice::Scripted(fixture(script))).unwrap());
    let served = state.clone();
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            serve(listener, served).await.unwrap();
        });
    });
    Gateway {
        addr: rx.recv().unwrap(),
        state,
        dir,
        http,
    }
}

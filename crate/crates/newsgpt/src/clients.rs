//! Blocking HTTP clients behind the news and search tools.

use std::time::Duration;

use newsgpt_core::tools::{HeadlineSource, NewsHeadline, SearchBackend, SearchResult, ToolError};
use serde::Deserialize;

fn http_client(timeout: Duration) -> reqwest::blocking::Client {
    reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .expect("TLS backend initialises")
}

fn transport(e: reqwest::Error) -> ToolError {
    if e.is_timeout() {
        ToolError::Transport("request timed out".into())
    } else if let Some(status) = e.status() {
        ToolError::Status(status.as_u16())
    } else {
        ToolError::Transport(e.without_url().to_string())
    }
}

fn get_json<T: for<'de> Deserialize<'de>>(
    client: &reqwest::blocking::Client,
    url: &str,
    query: &[(&str, String)],
) -> Result<T, ToolError> {
    let resp = client.get(url).query(query).send().map_err(transport)?;
    let status = resp.status();
    if !status.is_success() {
        return Err(ToolError::Status(status.as_u16()));
    }
    let body = resp.text().map_err(transport)?;
    serde_json::from_str(&body).map_err(|e| ToolError::InvalidResponse(e.to_string()))
}

/// GNews-compatible headline search: `GET endpoint?q=&lang=&max=&apikey=`.
pub struct GNewsClient {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
    lang: String,
}

#[derive(Deserialize)]
struct GNewsResponse {
    #[serde(default)]
    articles: Vec<GNewsArticle>,
}

#[derive(Deserialize)]
struct GNewsArticle {
    #[serde(default)]
    title: String,
    #[serde(default)]
    url: String,
    #[serde(default, rename = "publishedAt")]
    published_at: String,
    #[serde(default)]
    source: GNewsSource,
}

#[derive(Deserialize, Default)]
struct GNewsSource {
    #[serde(default)]
    name: String,
}

impl GNewsClient {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, lang: impl Into<String>, timeout: Duration) -> Self {
        Self {
            client: http_client(timeout),
            endpoint: endpoint.into(),
            api_key,
            lang: lang.into(),
        }
    }
}

impl HeadlineSource for GNewsClient {
    fn headlines(&self, terms: &str, max_results: usize) -> Result<Vec<NewsHeadline>, ToolError> {
        let mut query = vec![
            ("q", terms.to_string()),
            ("lang", self.lang.clone()),
            ("max", max_results.to_string()),
        ];
        if let Some(key) = &self.api_key {
            query.push(("apikey", key.clone()));
        }
        let resp: GNewsResponse = get_json(&self.client, &self.endpoint, &query)?;
        Ok(resp
            .articles
            .into_iter()
            .map(|a| NewsHeadline {
                title: a.title,
                source: a.source.name,
                published_at: a.published_at,
                url: a.url,
            })
            .collect())
    }
}

/// SerpAPI-compatible web search: `GET endpoint?engine=&q=&num=&api_key=`.
///
/// A direct answer box, when present, is returned ahead of the organic results.
pub struct SerpClient {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
    engine: String,
}

#[derive(Deserialize)]
struct SerpResponse {
    #[serde(default)]
    answer_box: Option<SerpAnswerBox>,
    #[serde(default)]
    organic_results: Vec<SerpOrganic>,
    #[serde(default)]
    error: Option<String>,
}

#[derive(Deserialize)]
struct SerpAnswerBox {
    #[serde(default)]
    title: String,
    #[serde(default)]
    answer: Option<String>,
    #[serde(default)]
    snippet: Option<String>,
    #[serde(default)]
    link: String,
}

#[derive(Deserialize)]
struct SerpOrganic {
    #[serde(default)]
    title: String,
    #[serde(default)]
    snippet: String,
    #[serde(default)]
    link: String,
}

impl SerpClient {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, engine: impl Into<String>, timeout: Duration) -> Self {
        Self {
            client: http_client(timeout),
            endpoint: endpoint.into(),
            api_key,
            engine: engine.into(),
        }
    }
}

impl SearchBackend for SerpClient {
    fn search(&self, query: &str, max_results: usize) -> Result<Vec<SearchResult>, ToolError> {
        let mut params = vec![
            ("engine", self.engine.clone()),
            ("q", query.to_string()),
            ("num", max_results.to_string()),
        ];
        if let Some(key) = &self.api_key {
            params.push(("api_key", key.clone()));
        }
        let resp: SerpResponse = get_json(&self.client, &self.endpoint, &params)?;
        if let Some(e) = resp.error {
            if resp.organic_results.is_empty() && resp.answer_box.is_none() {
                return Err(ToolError::InvalidResponse(e));
            }
        }
        let mut out = Vec::new();
        if let Some(b) = resp.answer_box {
            if let Some(text) = b.answer.or(b.snippet) {
                out.push(SearchResult {
                    title: b.title,
                    snippet: text,
                    url: b.link,
                });
            }
        }
        out.extend(resp.organic_results.into_iter().map(|r| SearchResult {
            title: r.title,
            snippet: r.snippet,
            url: r.link,
        }));
        Ok(out)
    }
}

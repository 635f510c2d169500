//! Bill text ingestion from the congressional API.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;

use super::BillId;
use crate::error::FetchError;

pub const DEFAULT_API_BASE: &str = "https://api.congress.gov";

#[derive(Debug, Clone)]
pub struct BillClientConfig {
    pub base_url: String,
    pub api_key: String,
    pub timeout: Duration,
    pub max_parallel: usize,
}

impl BillClientConfig {
    pub fn new(api_key: impl Into<String>) -> Self {
        BillClientConfig {
            base_url: DEFAULT_API_BASE.to_string(),
            api_key: api_key.into(),
            timeout: Duration::from_secs(30),
            max_parallel: 4,
        }
    }

    /// Reads the key from `CONGRESS_API_KEY`.
    pub fn from_env() -> Result<Self, FetchError> {
        match std::env::var("CONGRESS_API_KEY") {
            Ok(k) if !k.trim().is_empty() => Ok(Self::new(k)),
            _ => Err(FetchError::MissingApiKey),
        }
    }
}

#[derive(Debug, Deserialize)]
struct TextResponse {
    #[serde(rename = "textVersions", default)]
    text_versions: Vec<TextVersion>,
}

#[derive(Debug, Deserialize)]
struct TextVersion {
    #[serde(rename = "type", default)]
    kind: Option<String>,
    #[serde(default)]
    formats: Vec<TextFormat>,
}

#[derive(Debug, Deserialize)]
struct TextFormat {
    #[serde(rename = "type")]
    kind: String,
    url: String,
}

pub struct BillClient {
    config: BillClientConfig,
    http: reqwest::blocking::Client,
}

impl BillClient {
    pub fn new(config: BillClientConfig) -> Result<Self, FetchError> {
        if config.api_key.trim().is_empty() {
            return Err(FetchError::MissingApiKey);
        }
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| FetchError::Transport(e.to_string()))?;
        Ok(BillClient { config, http })
    }

    fn text_endpoint(&self, id: &BillId) -> String {
        format!(
            "{}/v3/bill/{}/{}/{}/text",
            self.config.base_url.trim_end_matches('/'),
            id.congress(),
            id.chamber().api_code(),
            id.number()
        )
    }

    fn get(&self, url: &str, query: &[(&str, &str)]) -> Result<String, FetchError> {
        let resp = self.http.get(url).query(query).send()?;
        let status = resp.status();
        if !status.is_success() {
            return Err(FetchError::HttpError(status.as_u16()));
        }
        Ok(resp.text()?)
    }

    /// Plain-text body of the introduced version of a bill.
    pub fn fetch_bill(&self, id: &BillId) -> Result<String, FetchError> {
        let body = self.get(
            &self.text_endpoint(id),
            &[("api_key", self.config.api_key.as_str()), ("format", "json")],
        )?;
        let listing: TextResponse =
            serde_json::from_str(&body).map_err(|e| FetchError::Decode(e.to_string()))?;
        let url = select_introduced_text(&listing).ok_or_else(|| FetchError::MissingTextVersion(id.to_string()))?;
        let page = self.get(url, &[])?;
        Ok(html_to_text(&page))
    }

    /// Fetches several bills with at most `max_parallel` requests in flight.
    /// Results are returned in input order.
    pub fn fetch_many(&self, ids: &[BillId]) -> Vec<Result<String, FetchError>> {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<String, FetchError>>>> =
            Mutex::new((0..ids.len()).map(|_| None).collect());
        let workers = self.config.max_parallel.max(1).min(ids.len().max(1));
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(id) = ids.get(i) else { break };
                    let r = self.fetch_bill(id);
                    slots.lock().expect("slot lock")[i] = Some(r);
                });
            }
        });
        slots
            .into_inner()
            .expect("slot lock")
            .into_iter()
            .map(|r| r.expect("every slot filled"))
            .collect()
    }
}

fn select_introduced_text(listing: &TextResponse) -> Option<&str> {
    let version = listing.text_versions.iter().find(|v| {
        v.kind
            .as_deref()
            .is_some_and(|k| k.trim().to_ascii_lowercase().starts_with("introduced"))
    })?;
    version
        .formats
        .iter()
        .find(|f| f.kind.eq_ignore_ascii_case("Formatted Text"))
        .map(|f| f.url.as_str())
}

/// Strips markup from a formatted-text page and decodes the common entities.
fn html_to_text(page: &str) -> String {
    let body = match (page.find("<pre"), page.rfind("</pre>")) {
        (Some(start), Some(end)) if start < end => {
            let open_end = page[start..].find('>').map(|i| start + i + 1).unwrap_or(start);
            &page[open_end..end]
        }
        _ => page,
    };
    let mut text = String::with_capacity(body.len());
    let mut in_tag = false;
    for c in body.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => in_tag = false,
            _ if !in_tag => text.push(c),
            _ => {}
        }
    }
    text.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&nbsp;", " ")
        .replace("&amp;", "&")
}

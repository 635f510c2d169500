use std::env;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::prompt::ChatMessages;
use super::{ChatBackend, SublabelRequest};
use crate::error::RouterError;

pub const DEFAULT_MODEL: &str = "Qwen/Qwen3-32B";
pub const DEFAULT_MAX_TOKENS: u32 = 1024;

/// Connection and sampling settings for a chat completion endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    #[serde(skip_serializing)]
    pub api_key: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    pub max_parallel: usize,
    /// Extra attempts after a 429, a 5xx or a transport failure.
    pub max_retries: u32,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: String::new(),
            model: DEFAULT_MODEL.to_string(),
            api_key: String::new(),
            temperature: 0.0,
            max_tokens: DEFAULT_MAX_TOKENS,
            timeout_secs: 120,
            max_parallel: 4,
            max_retries: 2,
        }
    }
}

impl EndpointConfig {
    /// Defaults with `LLM_BASE_URL`, `LLM_API_KEY` and `LLM_MODEL` applied when set.
    pub fn from_env() -> Self {
        let mut cfg = EndpointConfig::default();
        if let Ok(v) = env::var("LLM_BASE_URL") {
            cfg.base_url = v;
        }
        if let Ok(v) = env::var("LLM_API_KEY") {
            cfg.api_key = v;
        }
        if let Ok(v) = env::var("LLM_MODEL") {
            cfg.model = v;
        }
        cfg
    }

    /// Checks the settings that do not depend on network access.
    pub fn validate_sampling(&self) -> Result<(), RouterError> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(RouterError::Config(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if self.max_parallel == 0 {
            return Err(RouterError::Config("max_parallel must be at least 1".into()));
        }
        if self.max_tokens == 0 {
            return Err(RouterError::Config("max_tokens must be at least 1".into()));
        }
        if self.model.trim().is_empty() {
            return Err(RouterError::Config("model name is empty".into()));
        }
        Ok(())
    }

    /// Full check for online use: sampling settings, an http(s) base URL and an API key.
    pub fn validate(&self) -> Result<(), RouterError> {
        self.validate_sampling()?;
        let url = reqwest::Url::parse(&self.base_url)
            .map_err(|e| RouterError::Config(format!("invalid base URL {:?}: {e}", self.base_url)))?;
        if !matches!(url.scheme(), "http" | "https") {
            return Err(RouterError::Config(format!("base URL must be http or https: {}", self.base_url)));
        }
        if self.api_key.is_empty() {
            return Err(RouterError::Config("missing API key (set LLM_API_KEY)".into()));
        }
        Ok(())
    }

    pub fn completions_url(&self) -> String {
        format!("{}/v1/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// Body of a chat completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub messages: Vec<ChatMessage>,
}

impl ChatRequest {
    pub fn new(cfg: &EndpointConfig, msgs: &ChatMessages) -> Self {
        ChatRequest {
            model: cfg.model.clone(),
            temperature: cfg.temperature,
            max_tokens: cfg.max_tokens,
            messages: vec![
                ChatMessage {
                    role: "system".into(),
                    content: msgs.system.clone(),
                },
                ChatMessage {
                    role: "user".into(),
                    content: msgs.user.clone(),
                },
            ],
        }
    }

    /// JSON with object keys in sorted order.
    pub fn canonical_json(&self) -> String {
        let v: Value = serde_json::to_value(self).expect("request serializes");
        serde_json::to_string(&v).expect("value serializes")
    }
}

/// Blocking client for `POST {base_url}/v1/chat/completions`.
pub struct HttpChatClient {
    cfg: EndpointConfig,
    http: reqwest::blocking::Client,
}

impl HttpChatClient {
    pub fn new(cfg: EndpointConfig) -> Result<Self, RouterError> {
        cfg.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| RouterError::Config(e.to_string()))?;
        Ok(HttpChatClient { cfg, http })
    }

    fn attempt(&self, body: &ChatRequest) -> Result<String, (bool, String)> {
        let resp = self
            .http
            .post(self.cfg.completions_url())
            .bearer_auth(&self.cfg.api_key)
            .json(body)
            .send()
            .map_err(|e| (true, e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let retry = status.as_u16() == 429 || status.is_server_error();
            return Err((retry, format!("HTTP {}", status.as_u16())));
        }
        let v: Value = resp.json().map_err(|e| (false, format!("invalid JSON: {e}")))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| (false, "response has no choices[0].message.content".to_string()))
    }
}

impl ChatBackend for HttpChatClient {
    fn complete(&self, _req: &SublabelRequest, body: &ChatRequest) -> Result<String, String> {
        let mut delay = Duration::from_millis(250);
        let mut tries = 0;
        loop {
            match self.attempt(body) {
                Ok(content) => return Ok(content),
                Err((retry, detail)) if retry && tries < self.cfg.max_retries => {
                    log::warn!("chat request failed ({detail}), retrying");
                    tries += 1;
                    thread::sleep(delay);
                    delay *= 2;
                }
                Err((_, detail)) => return Err(detail),
            }
        }
    }
}

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transport error: {0}")]
pub struct TransportError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmEndpointConfig {
    pub base_url: String,
    pub model_name: String,
    pub api_key_env_var: String,
    pub temperature: f64,
    pub request_timeout_ms: u64,
}

impl Default for LlmEndpointConfig {
    fn default() -> Self {
        LlmEndpointConfig {
            base_url: "http://localhost:8000".into(),
            model_name: String::new(),
            api_key_env_var: "CHAINPROVER_API_KEY".into(),
            temperature: 0.0,
            request_timeout_ms: 60_000,
        }
    }
}

/// One chat-completion request for a given instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub instance_id: String,
    pub body: Value,
}

/// JSON body of a single-turn chat-completion request.
pub fn chat_request_body(model: &str, temperature: f64, prompt: &str) -> Value {
    json!({
        "model": model,
        "temperature": temperature,
        "messages": [{"role": "user", "content": prompt}],
    })
}

pub trait ChatClient: Send + Sync {
    fn model_name(&self) -> &str;
    fn temperature(&self) -> f64 {
        0.0
    }
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError>;
}

/// Chat-completion client over HTTP; the bearer key is read from the
/// environment variable named in the config.
pub struct HttpChatClient {
    config: LlmEndpointConfig,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(config: LlmEndpointConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.request_timeout_ms)))
            .build()
            .into();
        HttpChatClient { config, agent }
    }

    fn url(&self) -> String {
        format!(
            "{}/v1/chat/completions",
            self.config.base_url.trim_end_matches('/')
        )
    }
}

impl ChatClient for HttpChatClient {
    fn model_name(&self) -> &str {
        &self.config.model_name
    }

    fn temperature(&self) -> f64 {
        self.config.temperature
    }

    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let mut req = self.agent.post(&self.url());
        if let Ok(key) = std::env::var(&self.config.api_key_env_var) {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req
            .send_json(&request.body)
            .map_err(|e| TransportError(e.to_string()))?;
        let v: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| TransportError(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| TransportError("response has no choices[0].message.content".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum ScriptEntry {
    Reply(String),
    Failure { transport_error: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum ScriptFile {
    Shared(Vec<ScriptEntry>),
    PerInstance(BTreeMap<String, Vec<ScriptEntry>>),
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("cannot read script: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid script: {0}")]
    Json(#[from] serde_json::Error),
}

/// Deterministic file-backed stand-in for an LLM endpoint.
///
/// The script is JSON: either an array of replies served in order to every
/// request, or an object mapping instance ids to their own reply arrays. A
/// reply is a string, or `{"transport_error": "..."}` to simulate a failed
/// request. Every request body is recorded.
pub struct ScriptedChatClient {
    model: String,
    shared: Mutex<VecDeque<ScriptEntry>>,
    per_instance: Mutex<BTreeMap<String, VecDeque<ScriptEntry>>>,
    captured: Mutex<Vec<ChatRequest>>,
}

impl ScriptedChatClient {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::build(
            replies
                .into_iter()
                .map(|s| ScriptEntry::Reply(s.into()))
                .collect(),
            BTreeMap::new(),
        )
    }

    /// Replies where `Err(msg)` simulates a transport failure.
    pub fn with_failures<I>(replies: I) -> Self
    where
        I: IntoIterator<Item = Result<String, String>>,
    {
        Self::build(
            replies
                .into_iter()
                .map(|r| match r {
                    Ok(s) => ScriptEntry::Reply(s),
                    Err(e) => ScriptEntry::Failure { transport_error: e },
                })
                .collect(),
            BTreeMap::new(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, ScriptError> {
        Ok(match serde_json::from_str(text)? {
            ScriptFile::Shared(v) => Self::build(v.into(), BTreeMap::new()),
            ScriptFile::PerInstance(m) => Self::build(
                VecDeque::new(),
                m.into_iter().map(|(k, v)| (k, v.into())).collect(),
            ),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ScriptError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn build(
        shared: VecDeque<ScriptEntry>,
        per_instance: BTreeMap<String, VecDeque<ScriptEntry>>,
    ) -> Self {
        ScriptedChatClient {
            model: "scripted".into(),
            shared: Mutex::new(shared),
            per_instance: Mutex::new(per_instance),
            captured: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.captured.lock().expect("lock").clone()
    }
}

impl ChatClient for ScriptedChatClient {
    fn model_name(&self) -> &str {
        &self.model
    }

    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        self.captured.lock().expect("lock").push(request.clone());
        let entry = {
            let mut per = self.per_instance.lock().expect("lock");
            match per.get_mut(&request.instance_id) {
                Some(q) => q.pop_front(),
                None => self.shared.lock().expect("lock").pop_front(),
            }
        };
        match entry {
            Some(ScriptEntry::Reply(s)) => Ok(s),
            Some(ScriptEntry::Failure { transport_error }) => Err(TransportError(transport_error)),
            None => Err(TransportError(format!(
                "script has no reply left for `{}`",
                request.instance_id
            ))),
        }
    }
}

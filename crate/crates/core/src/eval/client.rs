//! Chat-completions backends.

use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::ModelEndpointConfig;

/// One multimodal request: the demonstrations image plus the text prompt.
#[derive(Debug, Clone)]
pub struct ChatRequest {
    pub task_id: String,
    pub sample: u32,
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: Option<u32>,
    pub image_detail: Option<String>,
    pub image_png: Vec<u8>,
    pub prompt: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatResponse {
    pub text: String,
    pub usage: Option<TokenUsage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndpointError {
    #[error("environment variable {0} holding the API key is not set")]
    MissingApiKey(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response body: {0}")]
    BadResponse(String),
    #[error("{0}")]
    Unavailable(String),
}

impl EndpointError {
    /// Transport failures, throttling and server errors are worth retrying.
    pub fn retryable(&self) -> bool {
        match self {
            EndpointError::Transport(_) => true,
            EndpointError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, EndpointError>;
}

/// OpenAI-compatible `/chat/completions` client.
pub struct OpenAiChatClient {
    agent: ureq::Agent,
    url: String,
    api_key: Option<String>,
}

impl OpenAiChatClient {
    pub fn new(cfg: &ModelEndpointConfig) -> Result<OpenAiChatClient, EndpointError> {
        let api_key = match &cfg.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| EndpointError::MissingApiKey(var.clone()))?),
            None => None,
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(cfg.request_timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(OpenAiChatClient {
            agent,
            url: format!("{}/chat/completions", cfg.base_url.trim_end_matches('/')),
            api_key,
        })
    }
}

pub fn request_body(request: &ChatRequest) -> Value {
    let mut image_url = json!({
        "url": format!("data:image/png;base64,{}", STANDARD.encode(&request.image_png)),
    });
    if let Some(detail) = &request.image_detail {
        image_url["detail"] = json!(detail);
    }
    let mut body = json!({
        "model": request.model,
        "temperature": request.temperature,
        "n": 1,
        "messages": [{
            "role": "user",
            "content": [
                {"type": "image_url", "image_url": image_url},
                {"type": "text", "text": request.prompt},
            ],
        }],
    });
    if let Some(max) = request.max_output_tokens {
        body["max_tokens"] = json!(max);
    }
    body
}

pub fn parse_response(body: &Value) -> Result<ChatResponse, EndpointError> {
    if body["choices"].as_array().is_none_or(|c| c.is_empty()) {
        return Err(EndpointError::BadResponse("no choices in response".into()));
    }
    let content = &body["choices"][0]["message"]["content"];
    let text = match content {
        Value::String(s) => s.clone(),
        // Some servers return content as a list of typed parts.
        Value::Array(parts) => parts
            .iter()
            .filter_map(|p| p["text"].as_str())
            .collect::<Vec<_>>()
            .join(""),
        Value::Null => String::new(),
        other => return Err(EndpointError::BadResponse(format!("content is {other}"))),
    };
    let usage = body.get("usage").and_then(|u| {
        Some(TokenUsage {
            prompt_tokens: u.get("prompt_tokens")?.as_u64()?,
            completion_tokens: u.get("completion_tokens")?.as_u64()?,
        })
    });
    Ok(ChatResponse { text, usage })
}

impl ChatBackend for OpenAiChatClient {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        let mut call = self.agent.post(&self.url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut response = call
            .send_json(request_body(request))
            .map_err(|e| EndpointError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| EndpointError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            let body: String = text.chars().take(500).collect();
            return Err(EndpointError::Status { status, body });
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| EndpointError::BadResponse(e.to_string()))?;
        parse_response(&value)
    }
}

/// Refuses every request; used to re-score purely from the cache.
pub struct OfflineBackend;

impl ChatBackend for OfflineBackend {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        Err(EndpointError::Unavailable(format!(
            "no cached response for {} sample {}",
            request.task_id, request.sample
        )))
    }
}

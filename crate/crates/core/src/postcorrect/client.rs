//! Chat-model clients.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{find_code_blocks, ChatTurn, Role};
use crate::http;
use crate::sync::Limiter;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClientError {
    #[error("chat backend unavailable after {attempts} attempt(s): {reason}")]
    Unavailable { attempts: u32, reason: String },
    #[error("unexpected chat backend response: {0}")]
    Protocol(String),
    #[error("scripted failure: {0}")]
    Scripted(String),
    #[error("invalid client configuration: {0}")]
    Config(String),
}

pub trait ChatClient: Send + Sync {
    fn model_id(&self) -> &str;

    fn supports_images(&self) -> bool;

    /// Sends the whole conversation and returns the assistant's reply text.
    fn complete(&self, turns: &[ChatTurn], temperature: f64) -> Result<String, ClientError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptedReply {
    Text(String),
    Fail { error: String },
}

/// Script file for [`MockChatClient`].
///
/// `replies` maps the exchange index within one conversation (the number of
/// assistant turns already present) to a reply. Unscripted exchanges echo.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default = "default_mock_model")]
    pub model_id: String,
    #[serde(default = "default_true")]
    pub image_capable: bool,
    #[serde(default)]
    pub replies: BTreeMap<usize, ScriptedReply>,
}

fn default_mock_model() -> String {
    "mock-echo".into()
}

fn default_true() -> bool {
    true
}

/// Deterministic stand-in for a chat model.
///
/// Echo behaviour: on the first exchange it returns the first fenced block of
/// the first user turn (or, for an image turn, the image bytes read as UTF-8)
/// re-fenced as python; on later exchanges it repeats the previous assistant
/// reply. Each conversation is scripted independently, so the mock can be
/// shared across threads.
#[derive(Debug, Default)]
pub struct MockChatClient {
    script: MockScript,
    calls: AtomicUsize,
}

impl MockChatClient {
    pub fn echo() -> Self {
        MockChatClient {
            script: MockScript { model_id: default_mock_model(), image_capable: true, ..Default::default() },
            calls: AtomicUsize::new(0),
        }
    }

    pub fn scripted(script: MockScript) -> Self {
        MockChatClient { script, calls: AtomicUsize::new(0) }
    }

    pub fn from_file(path: &Path) -> Result<Self, ClientError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ClientError::Config(format!("{}: {e}", path.display())))?;
        let script =
            serde_json::from_str(&text).map_err(|e| ClientError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self::scripted(script))
    }

    /// Number of `complete` calls served so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    fn echo_reply(turns: &[ChatTurn]) -> String {
        if let Some(last) = turns.iter().rev().find(|t| t.role == Role::Assistant) {
            return last.content.clone();
        }
        let Some(first_user) = turns.iter().find(|t| t.role == Role::User) else {
            return String::new();
        };
        let code = match &first_user.image {
            Some(image) => String::from_utf8_lossy(&image.bytes).into_owned(),
            None => {
                find_code_blocks(&first_user.content).into_iter().next().unwrap_or_else(|| first_user.content.clone())
            }
        };
        format!("```python\n{code}\n```")
    }
}

impl ChatClient for MockChatClient {
    fn model_id(&self) -> &str {
        &self.script.model_id
    }

    fn supports_images(&self) -> bool {
        self.script.image_capable
    }

    fn complete(&self, turns: &[ChatTurn], _temperature: f64) -> Result<String, ClientError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let exchange = turns.iter().filter(|t| t.role == Role::Assistant).count();
        match self.script.replies.get(&exchange) {
            Some(ScriptedReply::Text(t)) => Ok(t.clone()),
            Some(ScriptedReply::Fail { error }) => Err(ClientError::Scripted(error.clone())),
            None => Ok(Self::echo_reply(turns)),
        }
    }
}

fn default_chat_timeout() -> f64 {
    120.0
}
fn default_chat_retries() -> u32 {
    2
}
fn default_in_flight() -> usize {
    2
}

/// Endpoint settings for an OpenAI-compatible `chat/completions` backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenAiConfig {
    /// Full URL of the chat completions endpoint.
    pub endpoint: String,
    pub model_id: String,
    /// Environment variable holding the API key.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub image_capable: bool,
    #[serde(default = "default_chat_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_chat_retries")]
    pub retry_limit: u32,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
}

#[derive(Debug)]
pub struct OpenAiChatClient {
    config: OpenAiConfig,
    agent: ureq::Agent,
    limiter: Limiter,
}

impl OpenAiChatClient {
    pub fn new(config: OpenAiConfig) -> Result<Self, ClientError> {
        if !(config.timeout_secs > 0.0) {
            return Err(ClientError::Config("timeout must be positive".into()));
        }
        let agent = http::agent(Duration::from_secs_f64(config.timeout_secs));
        let limiter = Limiter::new(config.max_in_flight);
        Ok(OpenAiChatClient { config, agent, limiter })
    }

    /// Request body in the chat-completions wire format.
    pub fn request_body(&self, turns: &[ChatTurn], temperature: f64) -> Value {
        let messages: Vec<Value> = turns
            .iter()
            .map(|t| match &t.image {
                Some(image) => {
                    let data = base64::engine::general_purpose::STANDARD.encode(&image.bytes);
                    json!({
                        "role": t.role,
                        "content": [
                            {"type": "text", "text": t.content},
                            {"type": "image_url", "image_url": {"url": format!("data:{};base64,{data}", image.media_type)}}
                        ]
                    })
                }
                None => json!({"role": t.role, "content": t.content}),
            })
            .collect();
        json!({"model": self.config.model_id, "temperature": temperature, "messages": messages})
    }
}

impl ChatClient for OpenAiChatClient {
    fn model_id(&self) -> &str {
        &self.config.model_id
    }

    fn supports_images(&self) -> bool {
        self.config.image_capable
    }

    fn complete(&self, turns: &[ChatTurn], temperature: f64) -> Result<String, ClientError> {
        let key = match &self.config.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| ClientError::Unavailable {
                attempts: 0,
                reason: format!("credential variable {var} is not set"),
            })?),
            None => None,
        };
        let body = self.request_body(turns, temperature).to_string();
        let _permit = self.limiter.acquire();
        let reply = http::with_retries(self.config.retry_limit, Duration::from_secs(1), || {
            let mut request = self.agent.post(&self.config.endpoint).header("Content-Type", "application/json");
            if let Some(key) = &key {
                request = request.header("Authorization", format!("Bearer {key}"));
            }
            http::classify(request.send(body.as_str()))
        })
        .map_err(|(attempts, reason)| ClientError::Unavailable { attempts, reason })?;

        let v: Value = serde_json::from_str(&reply.body).map_err(|e| ClientError::Protocol(e.to_string()))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ClientError::Protocol("missing choices[0].message.content".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::postcorrect::ImageAttachment;

    #[test]
    fn echo_first_exchange_returns_fenced_payload() {
        let mock = MockChatClient::echo();
        let turns = vec![ChatTurn::system("sys"), ChatTurn::user("here:\n```\nx = 1\n  y\n```\nformat")];
        assert_eq!(mock.complete(&turns, 0.0).unwrap(), "```python\nx = 1\n  y\n```");
        assert_eq!(mock.calls(), 1);
    }

    #[test]
    fn echo_later_exchange_repeats_previous() {
        let mock = MockChatClient::echo();
        let turns = vec![ChatTurn::user("a"), ChatTurn::assistant("prev reply"), ChatTurn::user("again")];
        assert_eq!(mock.complete(&turns, 0.0).unwrap(), "prev reply");
    }

    #[test]
    fn script_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("script.json");
        std::fs::write(
            &path,
            r#"{"model_id": "m", "image_capable": false, "replies": {"0": "one", "2": {"error": "boom"}}}"#,
        )
        .unwrap();
        let mock = MockChatClient::from_file(&path).unwrap();
        assert!(!mock.supports_images());
        assert_eq!(mock.complete(&[ChatTurn::user("q")], 0.0).unwrap(), "one");
        let three = [ChatTurn::user("q"), ChatTurn::assistant("a"), ChatTurn::user("q"), ChatTurn::assistant("b")];
        assert_eq!(mock.complete(&three, 0.0), Err(ClientError::Scripted("boom".into())));
    }

    #[test]
    fn openai_body_carries_image_as_data_url() {
        let client = OpenAiChatClient::new(OpenAiConfig {
            endpoint: "http://127.0.0.1:1/v1/chat/completions".into(),
            model_id: "vision".into(),
            api_key_env: None,
            image_capable: true,
            timeout_secs: 1.0,
            retry_limit: 0,
            max_in_flight: 2,
        })
        .unwrap();
        let turn =
            ChatTurn::user_with_image("read", ImageAttachment { media_type: "image/png".into(), bytes: vec![1, 2, 3] });
        let body = client.request_body(&[turn], 0.0);
        assert_eq!(body["messages"][0]["role"], "user");
        assert_eq!(body["messages"][0]["content"][1]["image_url"]["url"], "data:image/png;base64,AQID");
        assert_eq!(body["temperature"], 0.0);
    }
}

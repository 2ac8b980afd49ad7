//! Language-model post-correction of OCR'd code.
//!
//! Three strategies are available: a single strict prompt
//! ([`CorrectionKind::Simple`]), a three-exchange chain of thought that first
//! fixes spelling and then asks the model to revert logic and indentation
//! changes ([`CorrectionKind::ChainOfThought`]), and end-to-end transcription
//! straight from the photo ([`CorrectionKind::MultimodalEndToEnd`]).

mod client;
mod prompts;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{ChatClient, ClientError, MockChatClient, MockScript, OpenAiChatClient, OpenAiConfig, ScriptedReply};
pub use prompts::{build_cot_opening, build_simple_prompt, PromptTemplates, CODE_PLACEHOLDER, TEMPLATE_VERSION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrectionError {
    #[error("code to correct is empty")]
    EmptyCode,
    #[error("image is empty")]
    EmptyImage,
    #[error("model {0} cannot take image input")]
    NotImageCapable(String),
    #[error("chat client failed at step {step}: {source}")]
    CorrectionFailed {
        step: usize,
        #[source]
        source: ClientError,
    },
    #[error("reply contains no fenced code block")]
    NoCodeBlock,
    #[error("template error: {0}")]
    Template(String),
    #[error("no chat client configured")]
    NoClient,
}

impl CorrectionError {
    /// Machine-readable variant name.
    pub fn code(&self) -> &'static str {
        match self {
            CorrectionError::EmptyCode => "EmptyCode",
            CorrectionError::EmptyImage => "EmptyImage",
            CorrectionError::NotImageCapable(_) => "NotImageCapable",
            CorrectionError::CorrectionFailed { .. } => "CorrectionFailed",
            CorrectionError::NoCodeBlock => "NoCodeBlock",
            CorrectionError::Template(_) => "Template",
            CorrectionError::NoClient => "NoClient",
        }
    }

    /// True when the failure happened after the chat client was called.
    pub fn reached_client(&self) -> bool {
        matches!(self, CorrectionError::CorrectionFailed { .. } | CorrectionError::NoCodeBlock)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageAttachment {
    pub media_type: String,
    #[serde(with = "base64_bytes")]
    pub bytes: Vec<u8>,
}

mod base64_bytes {
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&base64::engine::general_purpose::STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        base64::engine::general_purpose::STANDARD.decode(s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatTurn {
    pub role: Role,
    pub content: String,
    /// Only ever set on user turns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<ImageAttachment>,
}

impl ChatTurn {
    pub fn system(content: impl Into<String>) -> Self {
        ChatTurn { role: Role::System, content: content.into(), image: None }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatTurn { role: Role::User, content: content.into(), image: None }
    }

    pub fn user_with_image(content: impl Into<String>, image: ImageAttachment) -> Self {
        ChatTurn { role: Role::User, content: content.into(), image: Some(image) }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatTurn { role: Role::Assistant, content: content.into(), image: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionKind {
    None,
    Simple,
    ChainOfThought,
    MultimodalEndToEnd,
}

impl CorrectionKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "none" => Some(CorrectionKind::None),
            "simple" => Some(CorrectionKind::Simple),
            "chain_of_thought" | "cot" => Some(CorrectionKind::ChainOfThought),
            "multimodal_end_to_end" | "multimodal" => Some(CorrectionKind::MultimodalEndToEnd),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CorrectionKind::None => "none",
            CorrectionKind::Simple => "simple",
            CorrectionKind::ChainOfThought => "chain_of_thought",
            CorrectionKind::MultimodalEndToEnd => "multimodal_end_to_end",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionStrategy {
    pub kind: CorrectionKind,
    #[serde(default)]
    pub model_id: String,
    #[serde(default)]
    pub temperature: f64,
}

impl CorrectionStrategy {
    pub fn none() -> Self {
        CorrectionStrategy { kind: CorrectionKind::None, model_id: String::new(), temperature: 0.0 }
    }

    pub fn new(kind: CorrectionKind, model_id: impl Into<String>) -> Self {
        CorrectionStrategy { kind, model_id: model_id.into(), temperature: 0.0 }
    }
}

/// Output of a correction run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corrected {
    pub code: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn is_opening_fence(line: &str) -> bool {
    let t = line.trim();
    t.strip_prefix("```")
        .is_some_and(|rest| rest.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '_' | '.')))
}

/// Contents of every fenced block, in order. A block left open at the end of
/// the reply runs to the last line.
pub fn find_code_blocks(reply: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in reply.lines() {
        match current.as_mut() {
            None if is_opening_fence(line) => current = Some(Vec::new()),
            None => {}
            Some(_) if line.trim() == "```" => blocks.push(current.take().unwrap_or_default().join("\n")),
            Some(body) => body.push(line),
        }
    }
    if let Some(body) = current {
        blocks.push(body.join("\n"));
    }
    blocks
}

/// First fenced block of `reply`, fence lines excluded.
pub fn extract_code_block(reply: &str) -> Result<String, CorrectionError> {
    find_code_blocks(reply).into_iter().next().ok_or(CorrectionError::NoCodeBlock)
}

fn extract_with_warnings(reply: &str) -> Result<Corrected, CorrectionError> {
    let mut blocks = find_code_blocks(reply);
    if blocks.is_empty() {
        return Err(CorrectionError::NoCodeBlock);
    }
    let mut warnings = Vec::new();
    if blocks.len() > 1 {
        let msg = format!("reply contained {} code blocks; using the first", blocks.len());
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(Corrected { code: blocks.swap_remove(0), warnings })
}

fn ask(client: &dyn ChatClient, turns: &[ChatTurn], temperature: f64, step: usize) -> Result<String, CorrectionError> {
    client.complete(turns, temperature).map_err(|source| CorrectionError::CorrectionFailed { step, source })
}

pub fn run_simple_correction(
    code: &str,
    client: &dyn ChatClient,
    templates: &PromptTemplates,
    temperature: f64,
) -> Result<Corrected, CorrectionError> {
    let turns = build_simple_prompt(code, templates)?;
    extract_with_warnings(&ask(client, &turns, temperature, 1)?)
}

/// Three sequential exchanges in one conversation: fix spelling, undo any
/// logic fixes, restore indentation and keep only OCR fixes. The code block
/// of the third reply is the result.
pub fn run_cot_correction(
    code: &str,
    client: &dyn ChatClient,
    templates: &PromptTemplates,
    temperature: f64,
) -> Result<Corrected, CorrectionError> {
    let mut turns = build_cot_opening(code, templates)?;
    let follow_ups = [&templates.cot_step2, &templates.cot_step3];
    let mut reply = ask(client, &turns, temperature, 1)?;
    for (i, follow_up) in follow_ups.into_iter().enumerate() {
        turns.push(ChatTurn::assistant(reply));
        turns.push(ChatTurn::user(follow_up.as_str()));
        reply = ask(client, &turns, temperature, i + 2)?;
    }
    extract_with_warnings(&reply)
}

/// End-to-end transcription: one user turn with the photo and the strict prompt.
pub fn run_multimodal(
    image: &ImageAttachment,
    client: &dyn ChatClient,
    templates: &PromptTemplates,
    temperature: f64,
) -> Result<Corrected, CorrectionError> {
    if image.bytes.is_empty() {
        return Err(CorrectionError::EmptyImage);
    }
    if !client.supports_images() {
        return Err(CorrectionError::NotImageCapable(client.model_id().to_string()));
    }
    let turns = [ChatTurn::user_with_image(templates.multimodal.as_str(), image.clone())];
    extract_with_warnings(&ask(client, &turns, temperature, 1)?)
}

/// Applies a text-based strategy to `code`. `None` returns the input as-is.
pub fn correct_code(
    code: &str,
    kind: CorrectionKind,
    client: &dyn ChatClient,
    templates: &PromptTemplates,
    temperature: f64,
) -> Result<Corrected, CorrectionError> {
    match kind {
        CorrectionKind::None => Ok(Corrected { code: code.to_string(), warnings: vec![] }),
        CorrectionKind::Simple => run_simple_correction(code, client, templates, temperature),
        CorrectionKind::ChainOfThought => run_cot_correction(code, client, templates, temperature),
        CorrectionKind::MultimodalEndToEnd => {
            Err(CorrectionError::Template("multimodal correction needs the image, not OCR text".into()))
        }
    }
}

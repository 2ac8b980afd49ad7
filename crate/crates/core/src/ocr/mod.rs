//! OCR backends behind one interface.
//!
//! [`ReplayProvider`] serves recorded fixtures (deterministic, no network);
//! [`RemoteProvider`] posts the image to an HTTP endpoint and translates the
//! provider's line/box schema into an [`OcrDocument`].

mod remote;
mod replay;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codemodel::OcrDocument;

pub use remote::{RemoteProvider, ResponseSchema};
pub use replay::{load_fixture, record_fixture, ReplayProvider};

#[derive(Debug, Error)]
pub enum OcrError {
    #[error("provider {provider} unavailable after {attempts} attempt(s): {reason}")]
    ProviderUnavailable { provider: String, attempts: u32, reason: String },
    #[error("provider {provider} returned an unparseable response: {detail}")]
    ProviderProtocolError { provider: String, detail: String },
    #[error("invalid fixture {path}: {reason}")]
    InvalidFixture { path: PathBuf, reason: String },
    #[error("empty image")]
    EmptyImage,
    #[error("invalid provider config: {0}")]
    InvalidConfig(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Raw image bytes handed to a provider.
#[derive(Debug, Clone)]
pub struct ImageInput {
    pub bytes: Vec<u8>,
    pub media_type: String,
    /// File name (or stem) the image came from, when known.
    pub name: Option<String>,
}

impl ImageInput {
    pub fn new(bytes: Vec<u8>, media_type: impl Into<String>) -> Self {
        ImageInput { bytes, media_type: media_type.into(), name: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Reads a file, guessing the media type from its extension.
    pub fn from_path(path: &std::path::Path) -> Result<Self, OcrError> {
        let bytes = std::fs::read(path).map_err(|source| OcrError::Io { path: path.to_path_buf(), source })?;
        let media_type = media_type_for(path).to_string();
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        Ok(ImageInput { bytes, media_type, name })
    }

    pub fn sha256_hex(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

pub fn media_type_for(path: &std::path::Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref() {
        Some("png") => "image/png",
        Some("jpg") | Some("jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("webp") => "image/webp",
        _ => "application/octet-stream",
    }
}

pub trait OcrProvider: Send + Sync {
    fn provider_id(&self) -> &str;

    /// Recognizes one image. Line texts are returned exactly as the backend
    /// produced them; zero detected lines is an empty document, not an error.
    fn recognize(&self, image: &ImageInput) -> Result<OcrDocument, OcrError>;
}

fn default_timeout() -> f64 {
    30.0
}
fn default_retry_limit() -> u32 {
    3
}
fn default_concurrency() -> usize {
    4
}
fn default_backoff_ms() -> u64 {
    1000
}

/// Connection settings for a remote OCR backend.
///
/// Secrets never live here: `credentials_env` names the environment variable
/// holding the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider_id: String,
    pub endpoint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credentials_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_retry_limit")]
    pub retry_limit: u32,
    #[serde(default)]
    pub schema: ResponseSchema,
    #[serde(default = "default_concurrency")]
    pub max_concurrency: usize,
    /// First retry delay; doubles on each subsequent retry.
    #[serde(default = "default_backoff_ms")]
    pub backoff_base_ms: u64,
}

impl ProviderConfig {
    pub fn new(provider_id: impl Into<String>, endpoint: impl Into<String>) -> Self {
        ProviderConfig {
            provider_id: provider_id.into(),
            endpoint: endpoint.into(),
            credentials_env: None,
            timeout_secs: default_timeout(),
            retry_limit: default_retry_limit(),
            schema: ResponseSchema::default(),
            max_concurrency: default_concurrency(),
            backoff_base_ms: default_backoff_ms(),
        }
    }

    pub fn validate(&self) -> Result<(), OcrError> {
        if !(self.timeout_secs > 0.0) || !self.timeout_secs.is_finite() {
            return Err(OcrError::InvalidConfig(format!("timeout must be positive, got {}", self.timeout_secs)));
        }
        if self.provider_id.is_empty() {
            return Err(OcrError::InvalidConfig("provider_id is empty".into()));
        }
        if !(self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://")) {
            return Err(OcrError::InvalidConfig(format!("endpoint is not an http(s) URL: {}", self.endpoint)));
        }
        Ok(())
    }
}

/// Stable sort into top-to-bottom, left-to-right order. Text is left untouched.
pub(crate) fn sort_reading_order(doc: &mut OcrDocument) {
    doc.lines.sort_by(|a, b| a.bbox.y_min.total_cmp(&b.bbox.y_min).then(a.bbox.x_min.total_cmp(&b.bbox.x_min)));
}

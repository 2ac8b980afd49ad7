use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{sort_reading_order, ImageInput, OcrError, OcrProvider, ProviderConfig};
use crate::codemodel::{BoundingBox, LineBox, OcrDocument};
use crate::http;
use crate::sync::Limiter;

/// Provider response layouts understood by [`RemoteProvider`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseSchema {
    /// `{image_width, image_height, lines: [{text, box | polygon}]}`; auth via
    /// `Authorization: Bearer`.
    #[default]
    Generic,
    /// Azure Read result: `analyzeResult.readResults[0]` with `width`,
    /// `height` and `lines[{text, boundingBox: [x1, y1, .., x4, y4]}]`; auth
    /// via `Ocp-Apim-Subscription-Key`.
    AzureRead,
}

impl ResponseSchema {
    fn auth_header(self, secret: &str) -> (&'static str, String) {
        match self {
            ResponseSchema::Generic => ("Authorization", format!("Bearer {secret}")),
            ResponseSchema::AzureRead => ("Ocp-Apim-Subscription-Key", secret.to_string()),
        }
    }

    fn parse(self, body: &str, provider_id: &str) -> Result<OcrDocument, String> {
        let v: Value = serde_json::from_str(body).map_err(|e| e.to_string())?;
        let (width, height, lines) = match self {
            ResponseSchema::Generic => (
                number(&v, "image_width")?,
                number(&v, "image_height")?,
                v.get("lines").and_then(Value::as_array).ok_or("missing lines array")?,
            ),
            ResponseSchema::AzureRead => {
                let page = v.pointer("/analyzeResult/readResults/0").ok_or("missing analyzeResult.readResults[0]")?;
                (
                    number(page, "width")?,
                    number(page, "height")?,
                    page.get("lines").and_then(Value::as_array).ok_or("missing lines array")?,
                )
            }
        };
        let lines = lines
            .iter()
            .enumerate()
            .map(|(i, line)| parse_line(self, line).map_err(|e| format!("line {i}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let doc = OcrDocument::new(width, height, provider_id, lines);
        doc.validate().map_err(|e| e.to_string())?;
        Ok(doc)
    }
}

fn number(v: &Value, key: &str) -> Result<f64, String> {
    v.get(key).and_then(Value::as_f64).ok_or_else(|| format!("missing numeric field {key}"))
}

fn corners_from_flat(values: &[Value]) -> Result<Vec<(f64, f64)>, String> {
    let nums = values.iter().map(Value::as_f64).collect::<Option<Vec<_>>>().ok_or("non-numeric coordinate")?;
    if nums.len() < 4 || nums.len() % 2 != 0 {
        return Err(format!("expected an even number of coordinates, got {}", nums.len()));
    }
    Ok(nums.chunks(2).map(|c| (c[0], c[1])).collect())
}

fn parse_line(schema: ResponseSchema, line: &Value) -> Result<LineBox, String> {
    let text = line.get("text").and_then(Value::as_str).ok_or("missing text")?.to_string();
    let bbox = match schema {
        ResponseSchema::Generic => {
            if let Some(b) = line.get("box") {
                serde_json::from_value::<BoundingBox>(b.clone()).map_err(|e| e.to_string())?
            } else if let Some(poly) = line.get("polygon").and_then(Value::as_array) {
                let corners = poly
                    .iter()
                    .map(|p| match p.as_array().map(|a| a.as_slice()) {
                        Some([x, y]) => x.as_f64().zip(y.as_f64()),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or("polygon points must be [x, y] pairs")?;
                BoundingBox::from_corners(&corners).ok_or("degenerate polygon")?
            } else {
                return Err("line has neither box nor polygon".into());
            }
        }
        ResponseSchema::AzureRead => {
            let flat = line.get("boundingBox").and_then(Value::as_array).ok_or("missing boundingBox")?;
            BoundingBox::from_corners(&corners_from_flat(flat)?).ok_or("degenerate boundingBox")?
        }
    };
    bbox.validate().map_err(|e| e.to_string())?;
    Ok(LineBox { text, bbox })
}

/// Posts the raw image to `config.endpoint` and maps the reply to an
/// [`OcrDocument`], retrying transient failures with exponential backoff.
#[derive(Debug)]
pub struct RemoteProvider {
    config: ProviderConfig,
    agent: ureq::Agent,
    limiter: Limiter,
}

impl RemoteProvider {
    pub fn new(config: ProviderConfig) -> Result<Self, OcrError> {
        config.validate()?;
        let agent = http::agent(Duration::from_secs_f64(config.timeout_secs));
        let limiter = Limiter::new(config.max_concurrency);
        Ok(RemoteProvider { config, agent, limiter })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn unavailable(&self, attempts: u32, reason: impl Into<String>) -> OcrError {
        OcrError::ProviderUnavailable { provider: self.config.provider_id.clone(), attempts, reason: reason.into() }
    }
}

impl OcrProvider for RemoteProvider {
    fn provider_id(&self) -> &str {
        &self.config.provider_id
    }

    fn recognize(&self, image: &ImageInput) -> Result<OcrDocument, OcrError> {
        if image.bytes.is_empty() {
            return Err(OcrError::EmptyImage);
        }
        let secret = match &self.config.credentials_env {
            Some(var) => Some(
                std::env::var(var).map_err(|_| self.unavailable(0, format!("credential variable {var} is not set")))?,
            ),
            None => None,
        };

        let _permit = self.limiter.acquire();
        let base = Duration::from_millis(self.config.backoff_base_ms);
        let reply = http::with_retries(self.config.retry_limit, base, || {
            let mut request = self.agent.post(&self.config.endpoint).header("Content-Type", &image.media_type);
            if let Some(secret) = &secret {
                let (name, value) = self.config.schema.auth_header(secret);
                request = request.header(name, value);
            }
            http::classify(request.send(&image.bytes[..]))
        })
        .map_err(|(attempts, reason)| self.unavailable(attempts, reason))?;

        let mut doc =
            self.config.schema.parse(&reply.body, &self.config.provider_id).map_err(|detail| {
                OcrError::ProviderProtocolError { provider: self.config.provider_id.clone(), detail }
            })?;
        sort_reading_order(&mut doc);
        Ok(doc)
    }
}

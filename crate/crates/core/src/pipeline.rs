//! Pipeline configuration and composition: OCR, reading-order normalization,
//! indentation, rendering, post-correction.
//!
//! A config file is one JSON object; relative paths resolve against the
//! file's directory.
//!
//! ```json
//! {
//!   "config_id": "fixtures-relative-simple",
//!   "description": "Fixture OCR + Relative + Simple",
//!   "ocr": {"fixtures": "../testdata/synthetic/ocr"},
//!   "indent": "relative",
//!   "correction": {"kind": "simple", "model_id": "gpt-4-0613", "temperature": 0},
//!   "llm": {"type": "mock", "script": "mock_script.json"},
//!   "templates": {"dir": "prompts", "version": "v1"}
//! }
//! ```
//!
//! `ocr` is `{"fixtures": dir}`, `{"provider": {..}}` or `"none"` (only for
//! multimodal end-to-end). `indent` is `"none"`, `"absolute"`, `"relative"`
//! or `{"relative": {mu_no_indent, sigma_no_indent, mu_indent, sigma_indent, tau}}`.
//! `llm` is `{"type": "mock", "script": path?}` or `{"type": "openai", ..}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::codemodel::{normalize_reading_order, PipelineResult, Stage};
use crate::indent::{GmmParams, IndentError, IndentMethod};
use crate::ocr::{ImageInput, OcrError, OcrProvider, ProviderConfig, RemoteProvider, ReplayProvider};
use crate::postcorrect::{
    correct_code, run_multimodal, ChatClient, Corrected, CorrectionError, CorrectionKind, CorrectionStrategy,
    ImageAttachment, MockChatClient, OpenAiChatClient, OpenAiConfig, PromptTemplates, TEMPLATE_VERSION,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {reason}")]
    Invalid { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OcrSpec {
    /// Directory of recorded OCR documents.
    Fixtures(PathBuf),
    Provider(ProviderConfig),
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LlmSpec {
    /// Echo mock, optionally driven by a script file.
    Mock {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        script: Option<PathBuf>,
    },
    #[serde(rename = "openai")]
    OpenAi(OpenAiConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub dir: PathBuf,
    #[serde(default = "default_template_version")]
    pub version: String,
}

fn default_template_version() -> String {
    TEMPLATE_VERSION.into()
}

/// Section of the results table a configuration belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    OcrAlgorithm,
    IndentationRecognition,
    PostCorrection,
}

impl Section {
    pub fn title(self) -> &'static str {
        match self {
            Section::OcrAlgorithm => "OCR Algorithm",
            Section::IndentationRecognition => "Indentation Recognition",
            Section::PostCorrection => "Post Correction",
        }
    }
}

fn deserialize_indent<'de, D: Deserializer<'de>>(d: D) -> Result<IndentMethod, D::Error> {
    let v = serde_json::Value::deserialize(d)?;
    if v.as_str() == Some("relative") {
        return Ok(IndentMethod::Relative(GmmParams::default()));
    }
    serde_json::from_value(v).map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub config_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub ocr: OcrSpec,
    #[serde(deserialize_with = "deserialize_indent")]
    pub indent: IndentMethod,
    pub correction: CorrectionStrategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub llm: Option<LlmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<TemplateSpec>,
}

impl PipelineConfig {
    /// Reads, resolves relative paths and validates a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let invalid = |reason: String| ConfigError::Invalid { path: path.to_path_buf(), reason };
        let mut config: PipelineConfig = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
        config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        config.validate().map_err(invalid)?;
        Ok(config)
    }

    /// Loads every `*.json` in `dir`, sorted by config id. Ids must be unique.
    pub fn load_dir(dir: &Path) -> Result<Vec<Self>, ConfigError> {
        let read = std::fs::read_dir(dir).map_err(|source| ConfigError::Io { path: dir.to_path_buf(), source })?;
        let mut paths: Vec<PathBuf> = read
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        let mut by_id = BTreeMap::new();
        for p in paths {
            let c = Self::load(&p)?;
            if by_id.contains_key(&c.config_id) {
                return Err(ConfigError::Invalid { path: p, reason: format!("duplicate config_id {}", c.config_id) });
            }
            by_id.insert(c.config_id.clone(), c);
        }
        Ok(by_id.into_values().collect())
    }

    fn resolve_paths(&mut self, base: &Path) {
        if let OcrSpec::Fixtures(dir) = &mut self.ocr {
            *dir = base.join(&*dir);
        }
        if let Some(LlmSpec::Mock { script: Some(script) }) = &mut self.llm {
            *script = base.join(&*script);
        }
        if let Some(t) = &mut self.templates {
            t.dir = base.join(&t.dir);
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.config_id.trim().is_empty() {
            return Err("config_id is empty".into());
        }
        let multimodal = self.correction.kind == CorrectionKind::MultimodalEndToEnd;
        match (&self.ocr, multimodal) {
            (OcrSpec::None, false) => {
                return Err("ocr may be \"none\" only for multimodal_end_to_end correction".into())
            }
            (OcrSpec::Fixtures(_) | OcrSpec::Provider(_), true) => {
                return Err("multimodal_end_to_end reads the image directly; set ocr to \"none\"".into())
            }
            (OcrSpec::Provider(p), _) => p.validate().map_err(|e| e.to_string())?,
            _ => {}
        }
        if multimodal && self.indent != IndentMethod::None {
            return Err("multimodal_end_to_end skips indentation; set indent to \"none\"".into());
        }
        if let IndentMethod::Relative(params) = &self.indent {
            params.validate().map_err(|e| e.to_string())?;
        }
        if self.correction.kind != CorrectionKind::None && self.llm.is_none() {
            return Err(format!("correction {} needs an llm client", self.correction.kind.label()));
        }
        if !self.correction.temperature.is_finite() || self.correction.temperature < 0.0 {
            return Err("temperature must be a non-negative number".into());
        }
        Ok(())
    }

    pub fn section(&self) -> Section {
        match (&self.indent, self.correction.kind) {
            (_, CorrectionKind::Simple | CorrectionKind::ChainOfThought | CorrectionKind::MultimodalEndToEnd) => {
                Section::PostCorrection
            }
            (IndentMethod::None, CorrectionKind::None) => Section::OcrAlgorithm,
            _ => Section::IndentationRecognition,
        }
    }

    /// Display name such as `replay + relative + simple`.
    pub fn label(&self) -> String {
        if let Some(d) = &self.description {
            return d.clone();
        }
        let ocr = match &self.ocr {
            OcrSpec::Fixtures(_) => "fixtures".to_string(),
            OcrSpec::Provider(p) => p.provider_id.clone(),
            OcrSpec::None => String::new(),
        };
        if self.correction.kind == CorrectionKind::MultimodalEndToEnd {
            return format!("{} (end to end)", self.correction.model_id);
        }
        let mut parts = vec![ocr];
        if self.indent != IndentMethod::None {
            parts.push(self.indent.label().to_string());
        }
        if self.correction.kind != CorrectionKind::None {
            parts.push(self.correction.kind.label().to_string());
        }
        parts.join(" + ")
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ocr(#[from] OcrError),
    #[error(transparent)]
    Indent(#[from] IndentError),
    #[error(transparent)]
    Correction(#[from] CorrectionError),
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Ocr(_) => Stage::Ocr,
            PipelineError::Indent(_) => Stage::Indent,
            PipelineError::Correction(_) => Stage::Correct,
        }
    }

    /// Machine-readable name of the underlying error.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Ocr(e) => match e {
                OcrError::ProviderUnavailable { .. } => "ProviderUnavailable",
                OcrError::ProviderProtocolError { .. } => "ProviderProtocolError",
                OcrError::InvalidFixture { .. } => "InvalidFixture",
                OcrError::EmptyImage => "EmptyImage",
                OcrError::InvalidConfig(_) => "InvalidConfig",
                OcrError::Io { .. } => "Io",
            },
            PipelineError::Indent(e) => match e {
                IndentError::EmptyDocument => "EmptyDocument",
                IndentError::DegenerateBandwidth => "DegenerateBandwidth",
                IndentError::InvalidBandwidth(_) => "InvalidBandwidth",
                IndentError::InvalidWidth(_) => "InvalidWidth",
                IndentError::InsufficientLabels { .. } => "InsufficientLabels",
                IndentError::InvertedClasses { .. } => "InvertedClasses",
                IndentError::InvalidParams(_) => "InvalidParams",
            },
            PipelineError::Correction(e) => e.code(),
        }
    }
}

/// A ready-to-run pipeline built from a [`PipelineConfig`].
pub struct Pipeline {
    config: PipelineConfig,
    ocr: Option<Box<dyn OcrProvider>>,
    client: Option<Arc<dyn ChatClient>>,
    templates: PromptTemplates,
}

impl std::fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pipeline").field("config", &self.config).finish_non_exhaustive()
    }
}

impl Pipeline {
    pub fn from_config(config: PipelineConfig) -> Result<Self, ConfigError> {
        let invalid = |reason: String| ConfigError::Invalid { path: PathBuf::from(&config.config_id), reason };
        config.validate().map_err(invalid)?;
        let ocr: Option<Box<dyn OcrProvider>> = match &config.ocr {
            OcrSpec::Fixtures(dir) => Some(Box::new(ReplayProvider::new(dir.clone()))),
            OcrSpec::Provider(p) => Some(Box::new(RemoteProvider::new(p.clone()).map_err(|e| invalid(e.to_string()))?)),
            OcrSpec::None => None,
        };
        let client: Option<Arc<dyn ChatClient>> = match &config.llm {
            None => None,
            Some(LlmSpec::Mock { script: None }) => Some(Arc::new(MockChatClient::echo())),
            Some(LlmSpec::Mock { script: Some(path) }) => {
                Some(Arc::new(MockChatClient::from_file(path).map_err(|e| invalid(e.to_string()))?))
            }
            Some(LlmSpec::OpenAi(c)) => {
                Some(Arc::new(OpenAiChatClient::new(c.clone()).map_err(|e| invalid(e.to_string()))?))
            }
        };
        let templates = match &config.templates {
            Some(t) => PromptTemplates::load_dir(&t.dir, &t.version).map_err(|e| invalid(e.to_string()))?,
            None => PromptTemplates::default(),
        };
        Ok(Pipeline { config, ocr, client, templates })
    }

    /// Pipeline with explicit parts; mainly for tests and embedding.
    pub fn with_parts(
        config: PipelineConfig,
        ocr: Option<Box<dyn OcrProvider>>,
        client: Option<Arc<dyn ChatClient>>,
    ) -> Self {
        Pipeline { config, ocr, client, templates: PromptTemplates::default() }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Upper bound on useful parallelism imposed by the backends, if any.
    pub fn concurrency_limit(&self) -> Option<usize> {
        let ocr = match &self.config.ocr {
            OcrSpec::Provider(p) => Some(p.max_concurrency),
            _ => None,
        };
        let llm = match (&self.config.llm, self.config.correction.kind) {
            (Some(LlmSpec::OpenAi(c)), k) if k != CorrectionKind::None => Some(c.max_in_flight),
            _ => None,
        };
        ocr.into_iter().chain(llm).min()
    }

    /// Runs every stage. `on_stage` is called as each stage starts.
    pub fn run(&self, image: &ImageInput, on_stage: &mut dyn FnMut(Stage)) -> Result<PipelineResult, PipelineError> {
        let mut timings = BTreeMap::new();
        let config_id = self.config.config_id.clone();

        let Some(ocr) = &self.ocr else {
            on_stage(Stage::Correct);
            let started = Instant::now();
            let corrected = self.correct(&self.config.correction, "", image)?;
            timings.insert(Stage::Correct, started.elapsed());
            return Ok(PipelineResult {
                raw_ocr: None,
                indented: None,
                corrected_code: corrected.code,
                stage_timings: timings,
                config_id,
                warnings: corrected.warnings,
            });
        };

        on_stage(Stage::Ocr);
        let started = Instant::now();
        let raw = ocr.recognize(image)?;
        timings.insert(Stage::Ocr, started.elapsed());

        on_stage(Stage::Indent);
        let started = Instant::now();
        let indented = self.config.indent.apply(&normalize_reading_order(raw.clone()))?;
        let rendered = indented.render();
        timings.insert(Stage::Indent, started.elapsed());

        on_stage(Stage::Correct);
        let started = Instant::now();
        let mut warnings = Vec::new();
        let corrected_code = if self.config.correction.kind == CorrectionKind::None {
            rendered
        } else if rendered.trim().is_empty() {
            warnings.push("OCR found no text; correction skipped".to_string());
            rendered
        } else {
            let c = self.correct(&self.config.correction, &rendered, image)?;
            warnings.extend(c.warnings);
            c.code
        };
        timings.insert(Stage::Correct, started.elapsed());

        Ok(PipelineResult {
            raw_ocr: Some(raw),
            indented: Some(indented),
            corrected_code,
            stage_timings: timings,
            config_id,
            warnings,
        })
    }

    /// Applies `strategy` to already-indented code (or, for multimodal, to
    /// the image) using this pipeline's chat client and templates.
    pub fn correct(
        &self,
        strategy: &CorrectionStrategy,
        code: &str,
        image: &ImageInput,
    ) -> Result<Corrected, CorrectionError> {
        if strategy.kind == CorrectionKind::None {
            return Ok(Corrected { code: code.to_string(), warnings: vec![] });
        }
        let client = self.client.as_deref().ok_or(CorrectionError::NoClient)?;
        match strategy.kind {
            CorrectionKind::MultimodalEndToEnd => {
                let attachment = ImageAttachment { media_type: image.media_type.clone(), bytes: image.bytes.clone() };
                run_multimodal(&attachment, client, &self.templates, strategy.temperature)
            }
            kind => correct_code(code, kind, client, &self.templates, strategy.temperature),
        }
    }
}

//! Dataset manifests.
//!
//! A manifest is one JSON document listing entries. Gold code lives in sidecar
//! files; every path is resolved against the manifest's directory.
//!
//! ```json
//! {
//!   "entries": [
//!     {
//!       "program_id": "p001",
//!       "image_path": "images/p001.png",
//!       "gold_path": "gold/p001.py",
//!       "split": "logical_error",
//!       "heldout": true,
//!       "annotation": {
//!         "description": "division instead of modulo",
//!         "buggy_snippet": "number / 2",
//!         "fixed_snippet": "number % 2",
//!         "category": "arithmetic"
//!       }
//!     }
//!   ]
//! }
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::metrics::canonicalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Correct,
    LogicalError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    FencePost,
    Arithmetic,
    ControlFlow,
    Scope,
    Other,
}

/// The intentional bug planted in a `logical_error` program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorAnnotation {
    pub description: String,
    pub buggy_snippet: String,
    pub fixed_snippet: String,
    pub category: ErrorCategory,
}

impl ErrorAnnotation {
    /// Checks the annotation against the (canonical) gold code it belongs to.
    /// Returns the offending field name and a reason.
    pub fn check(&self, gold_code: &str) -> Result<(), (&'static str, String)> {
        if self.buggy_snippet.trim().is_empty() {
            return Err(("annotation.buggy_snippet", "empty".into()));
        }
        if self.fixed_snippet.trim().is_empty() {
            return Err(("annotation.fixed_snippet", "empty".into()));
        }
        if self.buggy_snippet == self.fixed_snippet {
            return Err(("annotation.fixed_snippet", "identical to buggy_snippet".into()));
        }
        if !gold_code.contains(&self.buggy_snippet) {
            return Err(("annotation.buggy_snippet", "does not occur in the gold code".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub program_id: String,
    pub image_path: PathBuf,
    /// Canonical form (see [`canonicalize`]).
    pub gold_code: String,
    pub split: Split,
    pub heldout: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<ErrorAnnotation>,
}

const ENTRY_FIELDS: [&str; 6] = ["program_id", "image_path", "gold_path", "split", "heldout", "annotation"];

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawManifest {
    Wrapped {
        #[serde(default)]
        entries: Vec<serde_json::Value>,
    },
    Bare(Vec<serde_json::Value>),
}

fn invalid(entry: impl Into<String>, field: impl Into<String>, reason: impl Into<String>) -> EvalError {
    EvalError::InvalidManifest { entry: entry.into(), field: field.into(), reason: reason.into() }
}

/// Loads and validates a manifest. Gold code is read from the sidecar files
/// and canonicalized.
pub fn load_manifest(path: &Path) -> Result<Vec<DatasetEntry>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let raw = match serde_json::from_str::<RawManifest>(&text) {
        Ok(RawManifest::Wrapped { entries }) | Ok(RawManifest::Bare(entries)) => entries,
        Err(e) => return Err(invalid("<manifest>", "<root>", e.to_string())),
    };

    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(raw.len());
    for (i, value) in raw.into_iter().enumerate() {
        let name =
            value.get("program_id").and_then(|v| v.as_str()).map(str::to_string).unwrap_or_else(|| format!("#{i}"));
        let serde_json::Value::Object(obj) = value else {
            return Err(invalid(&name, "<entry>", "entry is not an object"));
        };
        if let Some(unknown) = obj.keys().find(|k| !ENTRY_FIELDS.contains(&k.as_str())) {
            return Err(invalid(&name, unknown.as_str(), "unknown field"));
        }
        let field = |key: &str| obj.get(key).filter(|v| !v.is_null()).cloned();
        let parse =
            |key: &'static str| -> Result<_, EvalError> { field(key).ok_or_else(|| invalid(&name, key, "missing")) };

        let program_id = parse("program_id")?
            .as_str()
            .map(str::to_string)
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| invalid(&name, "program_id", "must be a non-empty string"))?;
        if !seen.insert(program_id.clone()) {
            return Err(invalid(&name, "program_id", "duplicate"));
        }
        let image_path: PathBuf =
            serde_json::from_value(parse("image_path")?).map_err(|e| invalid(&name, "image_path", e.to_string()))?;
        let gold_path: PathBuf =
            serde_json::from_value(parse("gold_path")?).map_err(|e| invalid(&name, "gold_path", e.to_string()))?;
        let split: Split =
            serde_json::from_value(parse("split")?).map_err(|e| invalid(&name, "split", e.to_string()))?;
        let heldout = match field("heldout") {
            None => true,
            Some(v) => v.as_bool().ok_or_else(|| invalid(&name, "heldout", "must be a boolean"))?,
        };
        let annotation: Option<ErrorAnnotation> = field("annotation")
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| invalid(&name, "annotation", e.to_string()))?;

        let gold_file = base.join(&gold_path);
        let gold = std::fs::read_to_string(&gold_file)
            .map_err(|e| invalid(&name, "gold_path", format!("{}: {e}", gold_file.display())))?;
        let gold_code = canonicalize(&gold);
        if gold_code.trim().is_empty() {
            return Err(invalid(&name, "gold_path", "gold code is empty"));
        }
        match (&annotation, split) {
            (None, Split::LogicalError) => {
                return Err(invalid(&name, "annotation", "required for logical_error entries"))
            }
            (Some(a), _) => a.check(&gold_code).map_err(|(field, reason)| invalid(&name, field, reason))?,
            (None, Split::Correct) => {}
        }
        entries.push(DatasetEntry {
            program_id,
            image_path: base.join(image_path),
            gold_code,
            split,
            heldout,
            annotation,
        });
    }
    Ok(entries)
}

/// Splits entries into (heldout, training), preserving order.
pub fn partition_heldout(entries: &[DatasetEntry]) -> (Vec<DatasetEntry>, Vec<DatasetEntry>) {
    entries.iter().cloned().partition(|e| e.heldout)
}

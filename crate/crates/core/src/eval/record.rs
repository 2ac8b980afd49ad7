//! Recording provider output as replay fixtures.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset::DatasetEntry;
use super::run::EntryFailure;
use super::EvalError;
use crate::codemodel::Stage;
use crate::ocr::{record_fixture, ImageInput, OcrProvider};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub written: Vec<PathBuf>,
    pub failures: Vec<EntryFailure>,
}

/// Runs `provider` on each entry's image and writes `<out_dir>/<image stem>.json`.
/// Failures are collected; the remaining entries are still recorded.
pub fn record_fixtures(
    provider: &dyn OcrProvider,
    entries: &[DatasetEntry],
    out_dir: &Path,
) -> Result<RecordSummary, EvalError> {
    std::fs::create_dir_all(out_dir).map_err(|source| EvalError::Io { path: out_dir.to_path_buf(), source })?;
    let mut summary = RecordSummary::default();
    for entry in entries {
        let fail = |stage, error: String| EntryFailure { program_id: entry.program_id.clone(), stage, error };
        let outcome =
            ImageInput::from_path(&entry.image_path).map_err(|e| fail(None, e.to_string())).and_then(|image| {
                let doc = provider.recognize(&image).map_err(|e| fail(Some(Stage::Ocr), e.to_string()))?;
                let stem = image.name.clone().unwrap_or_else(|| image.sha256_hex());
                let path = out_dir.join(format!("{stem}.json"));
                record_fixture(&doc, &path).map_err(|e| fail(None, e.to_string()))?;
                Ok(path)
            });
        match outcome {
            Ok(path) => summary.written.push(path),
            Err(f) => summary.failures.push(f),
        }
    }
    Ok(summary)
}

//! Runs a pipeline over a dataset and scores it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{DatasetEntry, Split};
use super::labels::TaxonomyTable;
use super::logical::detect_logical_fix;
use super::EvalError;
use crate::codemodel::Stage;
use crate::metrics::{aggregate_ocr_error, normalized_levenshtein, OcrErrorScore, ProgramScore};
use crate::ocr::ImageInput;
use crate::pipeline::{Pipeline, Section};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Worker threads. Defaults to the CPU count, capped by backend limits.
    pub workers: Option<usize>,
    /// Evaluate only entries with `heldout = true`.
    pub heldout_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryFailure {
    pub program_id: String,
    /// Stage that failed; absent when the image could not be read.
    pub stage: Option<Stage>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryOutcome {
    pub program_id: String,
    pub split: Split,
    pub l_norm: f64,
    pub predicted: String,
    /// Screen result for `logical_error` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical_fix: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixSource {
    Screen,
    Labels,
    Mixed,
}

/// Share of scored `logical_error` programs whose bug was "fixed".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalFixRate {
    pub flagged: usize,
    pub total: usize,
    pub percent: f64,
    pub source: FixSource,
}

/// One configuration's results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub config_id: String,
    pub label: String,
    pub section: Section,
    /// Entries attempted after filtering.
    pub attempted: usize,
    /// Absent when every entry failed.
    pub ocr_error: Option<OcrErrorScore>,
    pub logical_fix: Option<LogicalFixRate>,
    pub outcomes: Vec<EntryOutcome>,
    pub failures: Vec<EntryFailure>,
}

fn fix_rate(outcomes: &[EntryOutcome], overrides: &BTreeMap<String, bool>) -> Option<LogicalFixRate> {
    let mut total = 0;
    let mut flagged = 0;
    let (mut from_labels, mut from_screen) = (0, 0);
    for o in outcomes.iter().filter(|o| o.split == Split::LogicalError) {
        total += 1;
        let hit = match overrides.get(&o.program_id) {
            Some(&v) => {
                from_labels += 1;
                v
            }
            None => {
                from_screen += 1;
                o.logical_fix.unwrap_or(false)
            }
        };
        flagged += usize::from(hit);
    }
    if total == 0 {
        return None;
    }
    let source = match (from_labels, from_screen) {
        (0, _) => FixSource::Screen,
        (_, 0) => FixSource::Labels,
        _ => FixSource::Mixed,
    };
    Some(LogicalFixRate { flagged, total, percent: flagged as f64 / total as f64 * 100.0, source })
}

impl EvalRow {
    /// Replaces screen results with imported human labels for this row's
    /// config id, where labels exist.
    pub fn apply_labels(&mut self, table: &TaxonomyTable) {
        self.logical_fix = fix_rate(&self.outcomes, &table.logical_fix_overrides(&self.config_id));
    }
}

fn evaluate_one(pipeline: &Pipeline, entry: &DatasetEntry) -> Result<EntryOutcome, EntryFailure> {
    let fail = |stage, error: String| EntryFailure { program_id: entry.program_id.clone(), stage, error };
    let image = ImageInput::from_path(&entry.image_path).map_err(|e| fail(None, e.to_string()))?;
    let result = pipeline.run(&image, &mut |_| {}).map_err(|e| fail(Some(e.stage()), e.to_string()))?;
    let predicted = result.corrected_code;
    let l_norm = normalized_levenshtein(&entry.gold_code, &predicted).map_err(|e| fail(None, e.to_string()))?;
    let logical_fix = entry
        .annotation
        .as_ref()
        .filter(|_| entry.split == Split::LogicalError)
        .map(|a| detect_logical_fix(&entry.gold_code, a, &predicted));
    Ok(EntryOutcome { program_id: entry.program_id.clone(), split: entry.split, l_norm, predicted, logical_fix })
}

/// Runs `pipeline` on every entry on a bounded worker pool and folds the
/// results in program-id order, so the row does not depend on scheduling.
pub fn run_evaluation(
    pipeline: &Pipeline,
    entries: &[DatasetEntry],
    options: &EvalOptions,
) -> Result<EvalRow, EvalError> {
    let selected: Vec<&DatasetEntry> = entries.iter().filter(|e| !options.heldout_only || e.heldout).collect();
    if selected.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = options
        .workers
        .unwrap_or(cpus)
        .min(pipeline.concurrency_limit().unwrap_or(usize::MAX))
        .clamp(1, selected.len());
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| EvalError::Worker(e.to_string()))?;
    let mut results: Vec<Result<EntryOutcome, EntryFailure>> =
        pool.install(|| selected.par_iter().map(|e| evaluate_one(pipeline, e)).collect());
    results.sort_by(|a, b| {
        let id = |r: &Result<EntryOutcome, EntryFailure>| match r {
            Ok(o) => o.program_id.clone(),
            Err(f) => f.program_id.clone(),
        };
        id(a).cmp(&id(b))
    });

    let (mut outcomes, mut failures) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err(f) => {
                log::warn!("{} failed: {}", f.program_id, f.error);
                failures.push(f);
            }
        }
    }
    let scores = outcomes.iter().map(|o| ProgramScore { program_id: o.program_id.clone(), l_norm: o.l_norm }).collect();
    let config = pipeline.config();
    Ok(EvalRow {
        config_id: config.config_id.clone(),
        label: config.label(),
        section: config.section(),
        attempted: selected.len(),
        ocr_error: aggregate_ocr_error(scores).ok(),
        logical_fix: fix_rate(&outcomes, &BTreeMap::new()),
        outcomes,
        failures,
    })
}

//! Evaluation harness: manifests, scoring runs, hallucination labels, cost
//! estimates and reports.

mod cost;
mod dataset;
mod labels;
mod logical;
mod record;
mod report;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use cost::{estimate_cost, CharCounts, CostEstimate, CostModel};
pub use dataset::{load_manifest, partition_heldout, DatasetEntry, ErrorAnnotation, ErrorCategory, Split};
pub use labels::{
    import_labels, load_labels, HallucinationCategory, HallucinationLabel, TaxonomyColumn, TaxonomyTable,
};
pub use logical::detect_logical_fix;
pub use record::{record_fixtures, RecordSummary};
pub use report::{emit_report, Report, ReportRecord, ABSENT};
pub use run::{run_evaluation, EntryFailure, EntryOutcome, EvalOptions, EvalRow, FixSource, LogicalFixRate};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid manifest entry {entry}, field {field}: {reason}")]
    InvalidManifest { entry: String, field: String, reason: String },
    #[error("nothing to evaluate")]
    EmptyDataset,
    #[error("label references unknown program {0}")]
    UnknownProgram(String),
    #[error("duplicate label for program {program_id} by {labeler_id} in run {run}")]
    DuplicateLabel { program_id: String, labeler_id: String, run: String },
    #[error("invalid labels: {0}")]
    InvalidLabels(String),
    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),
    #[error("invalid report: {0}")]
    InvalidReport(String),
    #[error("worker pool: {0}")]
    Worker(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

//! Indentation recognition from line bounding boxes.

pub mod absolute;
pub mod relative;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use absolute::{absolute_indent, estimate_bandwidth, mean_shift_1d, ClusterModel};
pub use relative::{
    compute_deltas, fit_gmm_mle, relative_indent, AncestorIndex, DeltaLabel, DeltaSequence, GmmParams, LabeledDelta,
};

use crate::codemodel::{IndentedProgram, OcrDocument};

#[derive(Debug, Error, PartialEq)]
pub enum IndentError {
    #[error("document has no lines")]
    EmptyDocument,
    #[error("all bounding boxes have zero height, bandwidth would be 0")]
    DegenerateBandwidth,
    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),
    #[error("image width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("need at least 2 samples per class, got {indent} indent and {no_indent} no-indent")]
    InsufficientLabels { indent: usize, no_indent: usize },
    #[error("fitted indent mean {mu_indent} is not above no-indent mean {mu_no_indent}")]
    InvertedClasses { mu_indent: f64, mu_no_indent: f64 },
    #[error("invalid mixture parameters: {0:?}")]
    InvalidParams(GmmParams),
}

/// Indentation stage of a pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndentMethod {
    /// Every line at level 0.
    None,
    Absolute,
    Relative(GmmParams),
}

impl IndentMethod {
    pub fn apply(&self, doc: &OcrDocument) -> Result<IndentedProgram, IndentError> {
        match self {
            IndentMethod::None => Ok(IndentedProgram::flat(doc)),
            // an empty page has nothing to cluster
            IndentMethod::Absolute if doc.is_empty() => Ok(IndentedProgram::default()),
            IndentMethod::Absolute => absolute_indent(doc),
            IndentMethod::Relative(params) => relative_indent(doc, params),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IndentMethod::None => "none",
            IndentMethod::Absolute => "absolute",
            IndentMethod::Relative(_) => "relative",
        }
    }
}

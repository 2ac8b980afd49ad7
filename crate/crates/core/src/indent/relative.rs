//! Relative indentation: classify the width-normalized shift between
//! consecutive lines as indent / no-indent with a two-Gaussian model, and
//! resolve leftward shifts against the enclosing lines above.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::IndentError;
use crate::codemodel::{IndentedProgram, OcrDocument};

/// Floor applied to fitted standard deviations.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Two-component Gaussian model over positive deltas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmParams {
    pub mu_no_indent: f64,
    pub sigma_no_indent: f64,
    pub mu_indent: f64,
    pub sigma_indent: f64,
    /// Prior probability of the indent component.
    pub tau: f64,
}

impl Default for GmmParams {
    /// Parameters fitted on the 16 annotated images of the original study.
    fn default() -> Self {
        GmmParams { mu_no_indent: 0.007, sigma_no_indent: 0.008, mu_indent: 0.078, sigma_indent: 0.025, tau: 0.5 }
    }
}

fn log_normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * PI).ln()
}

impl GmmParams {
    pub fn validate(&self) -> Result<(), IndentError> {
        let finite = [self.mu_no_indent, self.sigma_no_indent, self.mu_indent, self.sigma_indent, self.tau]
            .iter()
            .all(|v| v.is_finite());
        if !finite
            || self.sigma_no_indent <= 0.0
            || self.sigma_indent <= 0.0
            || self.tau <= 0.0
            || self.tau >= 1.0
            || self.mu_indent <= self.mu_no_indent
        {
            return Err(IndentError::InvalidParams(*self));
        }
        Ok(())
    }

    /// `ln P(indent | δ) − ln P(no-indent | δ)`.
    ///
    /// The posterior saturates to 1.0 in f64 well inside [0, 1]; the log-odds
    /// stay informative across the whole range.
    pub fn log_odds_indent(&self, delta: f64) -> f64 {
        log_normal_pdf(delta, self.mu_indent, self.sigma_indent)
            - log_normal_pdf(delta, self.mu_no_indent, self.sigma_no_indent)
            + (self.tau / (1.0 - self.tau)).ln()
    }

    /// Posterior probability that `delta` is an indentation.
    pub fn classify_delta(&self, delta: f64) -> f64 {
        1.0 / (1.0 + (-self.log_odds_indent(delta)).exp())
    }

    pub fn is_indent(&self, delta: f64) -> bool {
        self.log_odds_indent(delta) > 0.0
    }
}

/// Width-normalized difference of successive left edges, one per line after the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSequence {
    pub deltas: Vec<f64>,
}

pub fn compute_deltas(doc: &OcrDocument) -> DeltaSequence {
    let width = doc.image_width;
    DeltaSequence { deltas: doc.lines.windows(2).map(|w| (w[1].bbox.x_min - w[0].bbox.x_min) / width).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaLabel {
    Indent,
    NoIndent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledDelta {
    pub delta: f64,
    pub label: DeltaLabel,
}

fn mean_and_population_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Maximum-likelihood fit of both components; `tau` stays at 0.5.
pub fn fit_gmm_mle(labeled: &[LabeledDelta]) -> Result<GmmParams, IndentError> {
    let pick = |label| labeled.iter().filter(|l| l.label == label).map(|l| l.delta).collect::<Vec<_>>();
    let indent = pick(DeltaLabel::Indent);
    let no_indent = pick(DeltaLabel::NoIndent);
    if indent.len() < 2 || no_indent.len() < 2 {
        return Err(IndentError::InsufficientLabels { indent: indent.len(), no_indent: no_indent.len() });
    }
    let (mu_indent, sigma_indent) = mean_and_population_std(&indent);
    let (mu_no_indent, sigma_no_indent) = mean_and_population_std(&no_indent);
    if mu_indent <= mu_no_indent {
        return Err(IndentError::InvertedClasses { mu_indent, mu_no_indent });
    }
    Ok(GmmParams {
        mu_no_indent,
        sigma_no_indent: sigma_no_indent.max(SIGMA_FLOOR),
        mu_indent,
        sigma_indent: sigma_indent.max(SIGMA_FLOOR),
        tau: 0.5,
    })
}

/// Nearest-above line for each indentation level that is still an open scope.
///
/// Tracing upward from line `before - 1`, a level is recorded the first time
/// it is seen, and only levels not deeper than that starting line qualify.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AncestorIndex {
    pub by_level: BTreeMap<usize, f64>,
}

impl AncestorIndex {
    pub fn build(levels: &[usize], x_mins: &[f64], before: usize) -> Self {
        let mut by_level = BTreeMap::new();
        if before == 0 {
            return AncestorIndex { by_level };
        }
        let ceiling = levels[before - 1];
        for j in (0..before).rev() {
            if levels[j] <= ceiling {
                by_level.entry(levels[j]).or_insert(x_mins[j]);
            }
        }
        AncestorIndex { by_level }
    }

    /// Level whose recorded x is closest to `x`; ties go to the outer level.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        // BTreeMap iterates levels ascending, and min_by keeps the first minimum
        self.by_level.iter().min_by(|a, b| (x - a.1).abs().total_cmp(&(x - b.1).abs())).map(|(&level, _)| level)
    }
}

pub fn relative_indent(doc: &OcrDocument, params: &GmmParams) -> Result<IndentedProgram, IndentError> {
    params.validate()?;
    if !(doc.image_width > 0.0) {
        return Err(IndentError::InvalidWidth(doc.image_width));
    }
    let x_mins = doc.x_mins();
    let deltas = compute_deltas(doc).deltas;
    let mut levels = Vec::with_capacity(x_mins.len());
    if !x_mins.is_empty() {
        levels.push(0usize);
    }
    for (offset, &delta) in deltas.iter().enumerate() {
        let i = offset + 1;
        let previous = levels[i - 1];
        let level = if delta > 0.0 {
            if params.is_indent(delta) {
                previous + 1
            } else {
                previous
            }
        } else if delta < 0.0 {
            AncestorIndex::build(&levels, &x_mins, i).nearest(x_mins[i]).unwrap_or(previous)
        } else {
            previous
        };
        levels.push(level);
    }
    Ok(IndentedProgram::from_levels(doc, &levels))
}

//! Edit-distance OCR error metric.
//!
//! Both strings are canonicalized (see [`canonicalize`]) before the distance is
//! taken, and distances are counted over Unicode scalar values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("gold label is empty after canonicalization")]
    EmptyGoldLabel,
    #[error("cannot aggregate an empty dataset")]
    EmptyDataset,
}

/// Minimal number of single-character insertions, deletions and substitutions
/// turning `a` into `b`.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    // keep the row over the shorter string
    let (long, short) = if a.len() >= b.len() { (&a, &b) } else { (&b, &a) };
    if short.is_empty() {
        return long.len();
    }

    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, lc) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, sc) in short.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(lc != sc);
            row[j + 1] = (diag + cost).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[short.len()]
}

/// Normalizes incidental whitespace: CRLF/CR become `\n`, tabs expand to four
/// spaces, trailing whitespace is stripped from each line and trailing blank
/// lines are dropped.
pub fn canonicalize(code: &str) -> String {
    let unified = code.replace("\r\n", "\n").replace('\r', "\n");
    let mut lines: Vec<String> = unified.split('\n').map(|l| l.replace('\t', "    ").trim_end().to_string()).collect();
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    lines.join("\n")
}

/// `levenshtein(gold, predicted) / |gold| * 100` over canonicalized strings.
///
/// Not clipped: a prediction much longer than the gold label scores above 100.
pub fn normalized_levenshtein(gold: &str, predicted: &str) -> Result<f64, MetricsError> {
    let gold = canonicalize(gold);
    let predicted = canonicalize(predicted);
    let len = gold.chars().count();
    if len == 0 {
        return Err(MetricsError::EmptyGoldLabel);
    }
    Ok(levenshtein(&gold, &predicted) as f64 / len as f64 * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramScore {
    pub program_id: String,
    pub l_norm: f64,
}

/// Dataset-level OCR Error: mean L_norm and its standard error, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrErrorScore {
    pub per_program: Vec<ProgramScore>,
    pub mean: f64,
    /// `None` when fewer than two programs were scored.
    pub std_error: Option<f64>,
    pub n: usize,
}

pub fn aggregate_ocr_error(scores: Vec<ProgramScore>) -> Result<OcrErrorScore, MetricsError> {
    let n = scores.len();
    if n == 0 {
        return Err(MetricsError::EmptyDataset);
    }
    let mean = scores.iter().map(|s| s.l_norm).sum::<f64>() / n as f64;
    let std_error = (n >= 2).then(|| {
        let var = scores.iter().map(|s| (s.l_norm - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        var.sqrt() / (n as f64).sqrt()
    });
    Ok(OcrErrorScore { per_program: scores, mean, std_error, n })
}

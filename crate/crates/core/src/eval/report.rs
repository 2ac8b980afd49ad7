//! Report emission: a machine-readable JSON document and an aligned text table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::run::{EntryFailure, EvalRow, FixSource};
use super::EvalError;
use crate::metrics::ProgramScore;
use crate::pipeline::Section;

/// Rendered in the text table where a value does not exist.
pub const ABSENT: &str = "-";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub config_id: String,
    pub label: String,
    pub section: Section,
    pub attempted: usize,
    /// Programs scored.
    pub n: usize,
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub logical_fix_percent: Option<f64>,
    pub logical_fix_flagged: Option<usize>,
    pub logical_fix_total: Option<usize>,
    pub logical_fix_source: Option<FixSource>,
    pub failures: Vec<EntryFailure>,
    pub per_program: Vec<ProgramScore>,
}

impl From<&EvalRow> for ReportRecord {
    fn from(row: &EvalRow) -> Self {
        let score = row.ocr_error.as_ref();
        let fix = row.logical_fix.as_ref();
        ReportRecord {
            config_id: row.config_id.clone(),
            label: row.label.clone(),
            section: row.section,
            attempted: row.attempted,
            n: score.map_or(0, |s| s.n),
            mean: score.map(|s| s.mean),
            std_error: score.and_then(|s| s.std_error),
            logical_fix_percent: fix.map(|f| f.percent),
            logical_fix_flagged: fix.map(|f| f.flagged),
            logical_fix_total: fix.map(|f| f.total),
            logical_fix_source: fix.map(|f| f.source),
            failures: row.failures.clone(),
            per_program: score.map(|s| s.per_program.clone()).unwrap_or_default(),
        }
    }
}

/// One record per configuration. Contains no timings, so reruns over the
/// same fixtures serialize byte-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<ReportRecord>,
}

pub fn emit_report(rows: &[EvalRow]) -> Result<Report, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    Ok(Report { records: rows.iter().map(ReportRecord::from).collect() })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| ABSENT.to_string(), |v| format!("{v:.2}"))
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        serde_json::from_str(text).map_err(|e| EvalError::InvalidReport(e.to_string()))
    }

    pub fn has_failures(&self) -> bool {
        self.records.iter().any(|r| !r.failures.is_empty())
    }

    /// Aligned plain-text table grouped into sections.
    pub fn render_text(&self) -> String {
        let header = ["Configuration", "OCR Error (%)", "n", "Logical Fix (%)", "Failed"];
        let mut body: Vec<(Section, [String; 5])> = self
            .records
            .iter()
            .map(|r| {
                let error = match r.mean {
                    Some(_) => format!("{} ± {}", opt(r.mean), opt(r.std_error)),
                    None => ABSENT.to_string(),
                };
                (
                    r.section,
                    [
                        format!("  {}", r.label),
                        error,
                        r.n.to_string(),
                        opt(r.logical_fix_percent),
                        r.failures.len().to_string(),
                    ],
                )
            })
            .collect();
        body.sort_by_key(|(s, _)| *s);

        let mut widths = header.map(|h| h.chars().count());
        for (_, cells) in &body {
            for (w, c) in widths.iter_mut().zip(cells) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut out = String::new();
            for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
                let pad = w - c.chars().count();
                if i == 0 {
                    out.push_str(c);
                    out.push_str(&" ".repeat(pad));
                } else {
                    out.push_str("   ");
                    out.push_str(&" ".repeat(pad));
                    out.push_str(c);
                }
            }
            out.trim_end().to_string()
        };

        let mut out = String::new();
        let _ = writeln!(out, "{}", line(&header.map(String::from)));
        let mut current = None;
        for (section, cells) in &body {
            if current != Some(*section) {
                let _ = writeln!(out, "{}", section.title());
                current = Some(*section);
            }
            let _ = writeln!(out, "{}", line(cells));
        }
        out
    }
}

//! Human hallucination labels and the per-run taxonomy table.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HallucinationCategory {
    NoChange,
    CommentChange,
    MissedContent,
    PrintChange,
    AddedCode,
    NameChange,
    IndentationChange,
    SyntaxFix,
    LogicalFix,
}

impl HallucinationCategory {
    pub const ALL: [HallucinationCategory; 9] = [
        HallucinationCategory::NoChange,
        HallucinationCategory::CommentChange,
        HallucinationCategory::MissedContent,
        HallucinationCategory::PrintChange,
        HallucinationCategory::AddedCode,
        HallucinationCategory::NameChange,
        HallucinationCategory::IndentationChange,
        HallucinationCategory::SyntaxFix,
        HallucinationCategory::LogicalFix,
    ];

    pub fn title(self) -> &'static str {
        match self {
            HallucinationCategory::NoChange => "No Change",
            HallucinationCategory::CommentChange => "Comment Change",
            HallucinationCategory::MissedContent => "Missed Content",
            HallucinationCategory::PrintChange => "Print Change",
            HallucinationCategory::AddedCode => "Added Code",
            HallucinationCategory::NameChange => "Name Change",
            HallucinationCategory::IndentationChange => "Indentation Change",
            HallucinationCategory::SyntaxFix => "Syntax Fix",
            HallucinationCategory::LogicalFix => "Logical Fix",
        }
    }
}

/// One labeler's verdict on one program's output in one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallucinationLabel {
    pub program_id: String,
    pub category: HallucinationCategory,
    pub labeler_id: String,
    /// Whether the labeler was blind to which configuration produced the output.
    pub blinded: bool,
    /// Run or configuration the labeled output came from.
    pub run: String,
}

/// One column of the taxonomy table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyColumn {
    pub run: String,
    /// Distinct programs labeled in this run.
    pub n_programs: usize,
    pub n_labels: usize,
    /// Share of labels per category, in percent. Every category is present.
    pub percent: BTreeMap<HallucinationCategory, f64>,
    pub all_blinded: bool,
    /// Programs with at least one LogicalFix label.
    pub logical_fix_programs: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyTable {
    pub columns: Vec<TaxonomyColumn>,
    /// Kept for audit.
    pub labels: Vec<HallucinationLabel>,
}

impl TaxonomyTable {
    pub fn column(&self, run: &str) -> Option<&TaxonomyColumn> {
        self.columns.iter().find(|c| c.run == run)
    }

    /// Programs labeled in `run`, mapped to whether any label says LogicalFix.
    pub fn logical_fix_overrides(&self, run: &str) -> BTreeMap<String, bool> {
        let mut out = BTreeMap::new();
        for l in self.labels.iter().filter(|l| l.run == run) {
            *out.entry(l.program_id.clone()).or_insert(false) |= l.category == HallucinationCategory::LogicalFix;
        }
        out
    }

    /// Aligned text table, one row per category and one column per run.
    pub fn render_text(&self) -> String {
        let first = HallucinationCategory::ALL.iter().map(|c| c.title().len()).max().unwrap_or(0).max("Category".len());
        let widths: Vec<usize> = self.columns.iter().map(|c| c.run.len().max(8)).collect();
        let mut out = format!("{:<first$}", "Category");
        for (c, w) in self.columns.iter().zip(&widths) {
            out.push_str(&format!("  {:>w$}", c.run));
        }
        out.push('\n');
        for cat in HallucinationCategory::ALL {
            out.push_str(&format!("{:<first$}", cat.title()));
            for (c, w) in self.columns.iter().zip(&widths) {
                out.push_str(&format!("  {:>w$}", format!("{:.2}%", c.percent[&cat])));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<first$}", "n"));
        for (c, w) in self.columns.iter().zip(&widths) {
            out.push_str(&format!("  {:>w$}", c.n_programs));
        }
        out.push('\n');
        out
    }
}

pub fn load_labels(path: &Path) -> Result<Vec<HallucinationLabel>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| EvalError::InvalidLabels(format!("{}: {e}", path.display())))
}

/// Validates labels against the known program ids and builds the table.
/// Columns are ordered by run name.
pub fn import_labels(
    labels: Vec<HallucinationLabel>,
    known_programs: &BTreeSet<String>,
) -> Result<TaxonomyTable, EvalError> {
    let mut seen = BTreeSet::new();
    for l in &labels {
        if !known_programs.contains(&l.program_id) {
            return Err(EvalError::UnknownProgram(l.program_id.clone()));
        }
        if !seen.insert((l.program_id.as_str(), l.labeler_id.as_str(), l.run.as_str())) {
            return Err(EvalError::DuplicateLabel {
                program_id: l.program_id.clone(),
                labeler_id: l.labeler_id.clone(),
                run: l.run.clone(),
            });
        }
    }

    let mut by_run: BTreeMap<&str, Vec<&HallucinationLabel>> = BTreeMap::new();
    for l in &labels {
        by_run.entry(l.run.as_str()).or_default().push(l);
    }
    let columns = by_run
        .into_iter()
        .map(|(run, ls)| {
            let n_labels = ls.len();
            let percent = HallucinationCategory::ALL
                .iter()
                .map(|&cat| (cat, ls.iter().filter(|l| l.category == cat).count() as f64 / n_labels as f64 * 100.0))
                .collect();
            TaxonomyColumn {
                run: run.to_string(),
                n_programs: ls.iter().map(|l| l.program_id.as_str()).collect::<BTreeSet<_>>().len(),
                n_labels,
                percent,
                all_blinded: ls.iter().all(|l| l.blinded),
                logical_fix_programs: ls
                    .iter()
                    .filter(|l| l.category == HallucinationCategory::LogicalFix)
                    .map(|l| l.program_id.clone())
                    .collect(),
            }
        })
        .collect();
    Ok(TaxonomyTable { columns, labels })
}

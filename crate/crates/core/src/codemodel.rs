//! Document types shared by every pipeline stage.
//!
//! An [`OcrDocument`] is what an OCR backend hands back: one [`LineBox`] per
//! recognised line, plus the image dimensions. The indentation stages turn it
//! into an [`IndentedProgram`], which renders to source text.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical indentation unit used when rendering programs and storing gold labels.
pub const INDENT_UNIT: &str = "    ";

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("bounding box has inverted or non-finite coordinates: {0:?}")]
    InvalidBox(BoundingBox),
    #[error("image dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: f64, height: f64 },
    #[error("indent level of line {line} is {level}, previous line is {previous}")]
    LevelJump { line: usize, level: usize, previous: usize },
    #[error("first line must have indent level 0, got {0}")]
    NonZeroFirstLevel(usize),
}

/// Axis-aligned rectangle in image pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, ModelError> {
        let b = BoundingBox { x_min, y_min, x_max, y_max };
        b.validate()?;
        Ok(b)
    }

    /// Smallest box containing every corner of a (possibly rotated) quadrilateral.
    pub fn from_corners(points: &[(f64, f64)]) -> Option<Self> {
        let (first, rest) = points.split_first()?;
        let mut b = BoundingBox { x_min: first.0, y_min: first.1, x_max: first.0, y_max: first.1 };
        for &(x, y) in rest {
            b.x_min = b.x_min.min(x);
            b.x_max = b.x_max.max(x);
            b.y_min = b.y_min.min(y);
            b.y_max = b.y_max.max(y);
        }
        b.validate().ok().map(|_| b)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [self.x_min, self.y_min, self.x_max, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_min > self.x_max || self.y_min > self.y_max || self.x_min < 0.0 || self.y_min < 0.0 {
            return Err(ModelError::InvalidBox(*self));
        }
        Ok(())
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }
}

/// One OCR'd line: the provider's raw transcription and its box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineBox {
    pub text: String,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

impl LineBox {
    pub fn new(text: impl Into<String>, bbox: BoundingBox) -> Self {
        LineBox { text: text.into(), bbox }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrDocument {
    pub image_width: f64,
    pub image_height: f64,
    pub provider_id: String,
    pub lines: Vec<LineBox>,
}

impl OcrDocument {
    pub fn new(image_width: f64, image_height: f64, provider_id: impl Into<String>, lines: Vec<LineBox>) -> Self {
        OcrDocument { image_width, image_height, provider_id: provider_id.into(), lines }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.image_width) || !ok(self.image_height) {
            return Err(ModelError::InvalidDimensions { width: self.image_width, height: self.image_height });
        }
        self.lines.iter().try_for_each(|l| l.bbox.validate())
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Left edge of every line, in document order.
    pub fn x_mins(&self) -> Vec<f64> {
        self.lines.iter().map(|l| l.bbox.x_min).collect()
    }
}

/// Sorts lines top to bottom (ties left to right) and blanks whitespace-only text.
///
/// The sort is stable, so lines with identical `(y_min, x_min)` keep their
/// relative order and a second application is a no-op.
pub fn normalize_reading_order(mut doc: OcrDocument) -> OcrDocument {
    doc.lines.sort_by(|a, b| a.bbox.y_min.total_cmp(&b.bbox.y_min).then(a.bbox.x_min.total_cmp(&b.bbox.x_min)));
    for line in &mut doc.lines {
        if !line.text.is_empty() && line.text.trim().is_empty() {
            line.text.clear();
        }
    }
    doc
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramLine {
    pub text: String,
    pub level: usize,
}

/// Lines paired with discrete indentation levels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndentedProgram {
    pub lines: Vec<ProgramLine>,
}

impl IndentedProgram {
    /// Builds a program, checking that levels start at 0 and never climb by more than one.
    pub fn new(lines: Vec<ProgramLine>) -> Result<Self, ModelError> {
        let p = IndentedProgram { lines };
        p.validate()?;
        Ok(p)
    }

    /// Every line at level 0; this is what "no indentation recognition" produces.
    pub fn flat(doc: &OcrDocument) -> Self {
        IndentedProgram { lines: doc.lines.iter().map(|l| ProgramLine { text: l.text.clone(), level: 0 }).collect() }
    }

    pub(crate) fn from_levels(doc: &OcrDocument, levels: &[usize]) -> Self {
        debug_assert_eq!(doc.lines.len(), levels.len());
        IndentedProgram {
            lines: doc
                .lines
                .iter()
                .zip(levels)
                .map(|(l, &level)| ProgramLine { text: l.text.clone(), level })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut previous = None;
        for (i, line) in self.lines.iter().enumerate() {
            match previous {
                None if line.level != 0 => return Err(ModelError::NonZeroFirstLevel(line.level)),
                Some(p) if line.level > p + 1 => {
                    return Err(ModelError::LevelJump { line: i, level: line.level, previous: p })
                }
                _ => {}
            }
            previous = Some(line.level);
        }
        Ok(())
    }

    pub fn levels(&self) -> Vec<usize> {
        self.lines.iter().map(|l| l.level).collect()
    }

    pub fn render(&self) -> String {
        render_program(self, INDENT_UNIT)
    }
}

/// Emits each line as `indent_unit` repeated `level` times followed by its
/// text, joined with `\n` and without a trailing newline.
pub fn render_program(program: &IndentedProgram, indent_unit: &str) -> String {
    assert!(!indent_unit.is_empty(), "indent unit must be non-empty");
    program.lines.iter().map(|l| format!("{}{}", indent_unit.repeat(l.level), l.text)).collect::<Vec<_>>().join("\n")
}

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ocr,
    Indent,
    Correct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    /// Absent when the configuration skips OCR (multimodal end-to-end).
    pub raw_ocr: Option<OcrDocument>,
    pub indented: Option<IndentedProgram>,
    pub corrected_code: String,
    #[serde(with = "timings_ms")]
    pub stage_timings: BTreeMap<Stage, Duration>,
    pub config_id: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

mod timings_ms {
    use std::collections::BTreeMap;
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Stage;

    pub fn serialize<S: Serializer>(t: &BTreeMap<Stage, Duration>, s: S) -> Result<S::Ok, S::Error> {
        let ms: BTreeMap<Stage, f64> = t.iter().map(|(k, v)| (*k, v.as_secs_f64() * 1000.0)).collect();
        ms.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Stage, Duration>, D::Error> {
        let ms = BTreeMap::<Stage, f64>::deserialize(d)?;
        Ok(ms.into_iter().map(|(k, v)| (k, Duration::from_secs_f64(v.max(0.0) / 1000.0))).collect())
    }
}

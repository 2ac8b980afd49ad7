//! Per-image cost estimate for a pipeline or a multimodal model.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Prices in currency units. Token prices are per 1000 tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    #[serde(default)]
    pub ocr_price_per_image: f64,
    pub input_token_price: f64,
    pub output_token_price: f64,
    #[serde(default)]
    pub image_price: f64,
    #[serde(default = "default_chars_per_token")]
    pub chars_per_token: f64,
}

fn default_chars_per_token() -> f64 {
    4.0
}

impl CostModel {
    pub fn validate(&self) -> Result<(), EvalError> {
        let prices = [self.ocr_price_per_image, self.input_token_price, self.output_token_price, self.image_price];
        if prices.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(EvalError::InvalidCostModel("prices must be finite and non-negative".into()));
        }
        if !(self.chars_per_token > 0.0 && self.chars_per_token.is_finite()) {
            return Err(EvalError::InvalidCostModel("chars_per_token must be positive".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
        let model: CostModel =
            serde_json::from_str(&text).map_err(|e| EvalError::InvalidCostModel(format!("{}: {e}", path.display())))?;
        model.validate()?;
        Ok(model)
    }
}

/// Average character counts per image.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CharCounts {
    /// OCR'd code sent to the text model. Ignored in multimodal mode.
    pub code_chars: f64,
    pub instruction_chars: f64,
    pub output_chars: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub input_tokens: f64,
    pub output_tokens: f64,
    /// Token charges only.
    pub token_cost: f64,
    /// OCR price for a pipeline, image price for a multimodal model.
    pub per_image_cost: f64,
    pub total: f64,
}

/// Cost per image.
///
/// Pipeline: `ocr_price + (in_tokens × in_price + out_tokens × out_price) / 1000`
/// with input = code + instruction. Multimodal: the image price replaces the
/// OCR price and the input is the instruction alone.
pub fn estimate_cost(model: &CostModel, counts: CharCounts, multimodal: bool) -> Result<CostEstimate, EvalError> {
    model.validate()?;
    let all = [counts.code_chars, counts.instruction_chars, counts.output_chars];
    if all.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(EvalError::InvalidCostModel("character counts must be non-negative".into()));
    }
    let input_chars = if multimodal { counts.instruction_chars } else { counts.code_chars + counts.instruction_chars };
    let input_tokens = input_chars / model.chars_per_token;
    let output_tokens = counts.output_chars / model.chars_per_token;
    let token_cost = (input_tokens * model.input_token_price + output_tokens * model.output_token_price) / 1000.0;
    let per_image_cost = if multimodal { model.image_price } else { model.ocr_price_per_image };
    Ok(CostEstimate { input_tokens, output_tokens, token_cost, per_image_cost, total: token_cost + per_image_cost })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_everything_is_free() {
        let m = CostModel {
            ocr_price_per_image: 0.0,
            input_token_price: 0.0,
            output_token_price: 0.0,
            image_price: 0.0,
            chars_per_token: 4.0,
        };
        assert_eq!(estimate_cost(&m, CharCounts::default(), false).unwrap().total, 0.0);
        assert_eq!(estimate_cost(&m, CharCounts::default(), true).unwrap().total, 0.0);
    }

    #[test]
    fn rejects_bad_models() {
        let mut m = CostModel {
            ocr_price_per_image: 0.0,
            input_token_price: 1.0,
            output_token_price: 1.0,
            image_price: 0.0,
            chars_per_token: 0.0,
        };
        assert!(m.validate().is_err());
        m.chars_per_token = 4.0;
        m.image_price = -1.0;
        assert!(m.validate().is_err());
        m.image_price = 0.0;
        let neg = CharCounts { code_chars: -1.0, ..Default::default() };
        assert!(estimate_cost(&m, neg, false).is_err());
    }

    #[test]
    fn multimodal_ignores_code_and_ocr() {
        let m = CostModel {
            ocr_price_per_image: 5.0,
            input_token_price: 1.0,
            output_token_price: 0.0,
            image_price: 2.0,
            chars_per_token: 1.0,
        };
        let c = CharCounts { code_chars: 1000.0, instruction_chars: 1000.0, output_chars: 0.0 };
        let est = estimate_cost(&m, c, true).unwrap();
        assert_eq!(est.token_cost, 1.0);
        assert_eq!(est.total, 3.0);
    }
}

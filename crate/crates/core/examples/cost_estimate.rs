//! Per-image cost of the OCR + LLM pipeline versus a multimodal model.
//!
//!     cargo run --example cost_estimate

use std::path::Path;

use codeocr::eval::{estimate_cost, CharCounts, CostModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let costs = Path::new(env!("CARGO_MANIFEST_DIR")).join("costs");
    let pipeline = CostModel::load(&costs.join("gpt4-pipeline.json"))?;
    let vision = CostModel::load(&costs.join("gpt4v.json"))?;

    // average character counts per image
    let text = estimate_cost(
        &pipeline,
        CharCounts { code_chars: 320.2545, instruction_chars: 381.0, output_chars: 341.5455 },
        false,
    )?;
    let multimodal =
        estimate_cost(&vision, CharCounts { code_chars: 0.0, instruction_chars: 387.0, output_chars: 308.9636 }, true)?;

    println!(
        "OCR + LLM:   {:.1} in / {:.1} out tokens, ${:.5} tokens + ${:.5} OCR = ${:.5}",
        text.input_tokens, text.output_tokens, text.token_cost, text.per_image_cost, text.total
    );
    println!(
        "multimodal:  {:.1} in / {:.1} out tokens, ${:.5} tokens + ${:.5} image = ${:.5}",
        multimodal.input_tokens,
        multimodal.output_tokens,
        multimodal.token_cost,
        multimodal.per_image_cost,
        multimodal.total
    );
    println!("per 1000 images: ${:.2} vs ${:.2}", text.total * 1000.0, multimodal.total * 1000.0);
    Ok(())
}

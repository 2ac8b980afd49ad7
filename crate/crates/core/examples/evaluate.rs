//! Runs every config in `configs/` over the synthetic manifest and prints the
//! results table.
//!
//!     cargo run --release --example evaluate [-- --heldout-only]

use std::path::Path;

use codeocr::eval::{emit_report, load_manifest, run_evaluation, EvalOptions};
use codeocr::pipeline::{Pipeline, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let heldout_only = std::env::args().any(|a| a == "--heldout-only");
    let entries = load_manifest(&root.join("testdata/synthetic/manifest.json"))?;

    let mut rows = vec![];
    for config in PipelineConfig::load_dir(&root.join("configs"))? {
        let pipeline = Pipeline::from_config(config)?;
        rows.push(run_evaluation(&pipeline, &entries, &EvalOptions { heldout_only, ..Default::default() })?);
    }
    let report = emit_report(&rows)?;
    print!("{}", report.render_text());

    let worst = rows[0].outcomes.iter().max_by(|a, b| a.l_norm.total_cmp(&b.l_norm));
    if let Some(o) = worst {
        println!("\nhardest program for {}: {} at {:.2}%", rows[0].config_id, o.program_id, o.l_norm);
    }
    Ok(())
}

//! Mean-shift clustering of left edges into indentation levels.
//!
//!     cargo run --example absolute_indent [fixture.json]

use std::path::PathBuf;

use codeocr::codemodel::normalize_reading_order;
use codeocr::indent::{absolute_indent, estimate_bandwidth, mean_shift_1d};
use codeocr::ocr::load_fixture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata/synthetic/ocr/c001.json"));
    let doc = normalize_reading_order(load_fixture(&path)?);

    let bandwidth = estimate_bandwidth(&doc)?;
    let clusters = mean_shift_1d(&doc.x_mins(), bandwidth)?;
    println!(
        "bandwidth {bandwidth:.1}px, centers {:?}",
        clusters.centers.iter().map(|c| c.round()).collect::<Vec<_>>()
    );

    let program = absolute_indent(&doc)?;
    for (line, x) in program.lines.iter().zip(doc.x_mins()) {
        println!("x={x:>6.1}  level {}  {}", line.level, line.text);
    }
    println!("\n{}", program.render());
    Ok(())
}

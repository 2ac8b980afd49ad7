//! Line-to-line indentation with the two-component mixture model.
//!
//!     cargo run --example relative_indent [fixture.json]

use std::path::PathBuf;

use codeocr::codemodel::normalize_reading_order;
use codeocr::indent::{compute_deltas, relative_indent, GmmParams};
use codeocr::ocr::load_fixture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata/synthetic/ocr/c007.json"));
    let doc = normalize_reading_order(load_fixture(&path)?);
    let params = GmmParams::default();
    println!("{params:?}");

    let deltas = compute_deltas(&doc).deltas;
    let program = relative_indent(&doc, &params)?;
    for (i, line) in program.lines.iter().enumerate() {
        let d = if i == 0 { String::from("      -") } else { format!("{:+.4}", deltas[i - 1]) };
        // the mixture only decides rightward moves; leftward ones go to the nearest open scope
        let p = match deltas.get(i.wrapping_sub(1)) {
            Some(&delta) if delta > 0.0 => format!("P(indent) {:.3}", params.classify_delta(delta)),
            Some(&delta) if delta < 0.0 => String::from("leftward       "),
            _ => String::from("-              "),
        };
        println!("delta {d}  {p}  level {}  {}", line.level, line.text);
    }
    println!("\n{}", program.render());
    Ok(())
}

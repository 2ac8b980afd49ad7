//! Fits the indentation mixture on the training split of the synthetic set
//! (labels come from the gold indentation) and checks it on the held-out part.
//!
//!     cargo run --example fit_gmm

use std::path::Path;

use codeocr::codemodel::{normalize_reading_order, OcrDocument};
use codeocr::eval::{load_manifest, partition_heldout, DatasetEntry};
use codeocr::indent::{compute_deltas, fit_gmm_mle, relative_indent, DeltaLabel, GmmParams, LabeledDelta};
use codeocr::ocr::load_fixture;

fn gold_levels(code: &str) -> Vec<usize> {
    code.lines().filter(|l| !l.trim().is_empty()).map(|l| (l.len() - l.trim_start().len()) / 4).collect()
}

fn fixture(root: &Path, entry: &DatasetEntry) -> OcrDocument {
    let stem = entry.image_path.file_stem().unwrap().to_string_lossy();
    normalize_reading_order(load_fixture(&root.join(format!("ocr/{stem}.json"))).unwrap())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata/synthetic");
    let (heldout, training) = partition_heldout(&load_manifest(&root.join("manifest.json"))?);

    let mut labeled = vec![];
    for entry in &training {
        let levels = gold_levels(&entry.gold_code);
        let deltas = compute_deltas(&fixture(&root, entry)).deltas;
        for (w, delta) in levels.windows(2).zip(deltas) {
            // dedents are resolved by ancestor lookup, not by the mixture
            let label = match w[1].cmp(&w[0]) {
                std::cmp::Ordering::Greater => DeltaLabel::Indent,
                std::cmp::Ordering::Equal => DeltaLabel::NoIndent,
                std::cmp::Ordering::Less => continue,
            };
            labeled.push(LabeledDelta { delta, label });
        }
    }
    let fitted = fit_gmm_mle(&labeled)?;
    println!("{} labeled deltas from {} training programs", labeled.len(), training.len());
    println!("fitted:  {fitted:?}");
    println!("default: {:?}", GmmParams::default());

    for (name, params) in [("fitted", fitted), ("default", GmmParams::default())] {
        let (mut right, mut total) = (0, 0);
        for entry in &heldout {
            let predicted = relative_indent(&fixture(&root, entry), &params)?.levels();
            let gold = gold_levels(&entry.gold_code);
            right += predicted.iter().zip(&gold).filter(|(p, g)| p == g).count();
            total += gold.len();
        }
        println!("{name:>7}: {right}/{total} held-out lines at the gold level");
    }
    Ok(())
}

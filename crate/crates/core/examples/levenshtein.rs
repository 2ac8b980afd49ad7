//! Edit distance and the normalized OCR Error score.
//!
//!     cargo run --example levenshtein -- "for i in range(3):" "for i in rnage(3):"

use codeocr::metrics::{aggregate_ocr_error, canonicalize, levenshtein, normalized_levenshtein, ProgramScore};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (gold, predicted) = match args.as_slice() {
        [g, p] => (g.clone(), p.clone()),
        _ => (
            "def is_odd(number):\n    return number % 2 == 1\n".to_string(),
            "def is_odd(numbr):\n  return number % 2 == 1".to_string(),
        ),
    };
    println!("gold:      {gold:?}");
    println!("predicted: {predicted:?}");
    println!("canonical: {:?}", canonicalize(&predicted));
    println!("distance:  {}", levenshtein(&canonicalize(&gold), &canonicalize(&predicted)));
    match normalized_levenshtein(&gold, &predicted) {
        Ok(l) => println!("L_norm:    {l:.2}%"),
        Err(e) => println!("L_norm:    {e}"),
    }

    // dataset-level score over a few toy programs
    let pairs = [("kitten", "sitting"), ("print(x)", "print(x)"), ("x = 1", "x = 7")];
    let scores = pairs
        .iter()
        .enumerate()
        .map(|(i, (g, p))| ProgramScore { program_id: format!("p{i}"), l_norm: normalized_levenshtein(g, p).unwrap() })
        .collect();
    let agg = aggregate_ocr_error(scores).unwrap();
    println!("mean over {} programs: {:.2}% (std error {:.2})", agg.n, agg.mean, agg.std_error.unwrap_or(f64::NAN));
}

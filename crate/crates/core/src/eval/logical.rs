//! Automatic screen for "logical fix" hallucinations: did the transcription
//! repair the planted bug instead of copying it?

use super::dataset::ErrorAnnotation;
use crate::metrics::{canonicalize, levenshtein};

/// Runs of whitespace become one space; leading and trailing whitespace goes.
fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn non_ws(s: &str) -> Vec<char> {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Shortest window of `hay` containing `needle` as a subsequence.
fn shortest_subsequence_window(hay: &[char], needle: &[char]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    let mut best: Option<usize> = None;
    for start in 0..hay.len() {
        if hay[start] != needle[0] {
            continue;
        }
        let mut k = 0;
        let mut end = start;
        while end < hay.len() && k < needle.len() {
            if hay[end] == needle[k] {
                k += 1;
            }
            end += 1;
        }
        if k < needle.len() {
            break;
        }
        let len = end - start;
        best = Some(best.map_or(len, |b| b.min(len)));
    }
    best
}

/// Lines of `predicted` that best align with the gold lines covering the
/// buggy snippet (same line count, minimum edit distance, earliest on ties).
fn corresponding_region(gold: &str, buggy: &str, predicted: &str) -> Option<String> {
    let at = gold.find(buggy)?;
    let first = gold[..at].matches('\n').count();
    let span = buggy.matches('\n').count() + 1;
    let gold_lines: Vec<&str> = gold.lines().collect();
    let target = gold_lines.get(first..(first + span).min(gold_lines.len()))?.join("\n");

    let pred_lines: Vec<&str> = predicted.lines().collect();
    if pred_lines.is_empty() {
        return None;
    }
    let width = span.min(pred_lines.len());
    (0..=pred_lines.len() - width).map(|i| pred_lines[i..i + width].join("\n")).min_by_key(|w| levenshtein(w, &target))
}

/// True when `predicted` appears to contain the fix for the annotated bug.
///
/// Two screens, either suffices:
/// 1. the whitespace-collapsed fixed snippet occurs in the prediction more
///    often than in the gold code;
/// 2. the buggy snippet is gone and the fixed snippet's non-whitespace
///    characters appear in order, packed into at most 1.5× their length,
///    within the prediction lines that align with the buggy lines of gold.
pub fn detect_logical_fix(gold: &str, annotation: &ErrorAnnotation, predicted: &str) -> bool {
    let gold = canonicalize(gold);
    let predicted = canonicalize(predicted);
    let fixed = collapse_ws(&annotation.fixed_snippet);
    let buggy = collapse_ws(&annotation.buggy_snippet);
    let gold_flat = collapse_ws(&gold);
    let pred_flat = collapse_ws(&predicted);

    if fixed.is_empty() {
        return false;
    }
    if pred_flat.matches(&fixed).count() > gold_flat.matches(&fixed).count() {
        return true;
    }
    if pred_flat.contains(&buggy) {
        return false;
    }
    let Some(region) = corresponding_region(&gold, &annotation.buggy_snippet, &predicted) else {
        return false;
    };
    let needle = non_ws(&fixed);
    let limit = needle.len() + needle.len().div_ceil(2);
    shortest_subsequence_window(&non_ws(&region), &needle).is_some_and(|w| w <= limit)
}

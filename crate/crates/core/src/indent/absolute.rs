//! Absolute indentation: cluster the left edge of every line with a flat-kernel
//! 1-D mean shift and rank the cluster centres left to right.

use serde::{Deserialize, Serialize};

use super::IndentError;
use crate::codemodel::{IndentedProgram, OcrDocument};

/// Multiplier applied to the mean line height to get the mean-shift bandwidth.
pub const BANDWIDTH_FACTOR: f64 = 1.5;
/// Convergence threshold for a single mode, as a fraction of the bandwidth.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;
pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    /// Strictly increasing.
    pub centers: Vec<f64>,
    /// Index into `centers`, one per input point.
    pub assignment: Vec<usize>,
}

/// `1.5 × mean bounding-box height`.
pub fn estimate_bandwidth(doc: &OcrDocument) -> Result<f64, IndentError> {
    if doc.lines.is_empty() {
        return Err(IndentError::EmptyDocument);
    }
    let mean_height = doc.lines.iter().map(|l| l.bbox.height()).sum::<f64>() / doc.lines.len() as f64;
    let bandwidth = BANDWIDTH_FACTOR * mean_height;
    if !(bandwidth > 0.0) {
        return Err(IndentError::DegenerateBandwidth);
    }
    Ok(bandwidth)
}

fn shift_to_mode(points: &[f64], seed: f64, bandwidth: f64) -> f64 {
    let tolerance = CONVERGENCE_TOLERANCE * bandwidth;
    let mut mode = seed;
    for _ in 0..MAX_ITERATIONS {
        let (sum, count) =
            points.iter().filter(|&&p| (p - mode).abs() <= bandwidth).fold((0.0, 0usize), |(s, c), &p| (s + p, c + 1));
        // the window always holds at least the seed's own neighbourhood
        if count == 0 {
            break;
        }
        let next = sum / count as f64;
        let step = (next - mode).abs();
        mode = next;
        if step <= tolerance {
            break;
        }
    }
    mode
}

/// Flat-kernel mean shift seeded at every point.
///
/// Converged modes within `bandwidth / 2` of their sorted neighbour are merged
/// (single linkage) and replaced by their mean; each point is then assigned to
/// the nearest surviving centre, ties going to the left one.
pub fn mean_shift_1d(points: &[f64], bandwidth: f64) -> Result<ClusterModel, IndentError> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(IndentError::InvalidBandwidth(bandwidth));
    }
    if points.is_empty() {
        return Err(IndentError::EmptyDocument);
    }

    let mut modes: Vec<f64> = points.iter().map(|&p| shift_to_mode(points, p, bandwidth)).collect();
    modes.sort_by(f64::total_cmp);

    let merge_radius = bandwidth / 2.0;
    let mut centers = Vec::new();
    let mut group: Vec<f64> = Vec::new();
    for m in modes {
        if let Some(&last) = group.last() {
            if m - last > merge_radius {
                centers.push(group.iter().sum::<f64>() / group.len() as f64);
                group.clear();
            }
        }
        group.push(m);
    }
    centers.push(group.iter().sum::<f64>() / group.len() as f64);

    let assignment = points
        .iter()
        .map(|&p| {
            centers
                .iter()
                .enumerate()
                .min_by(|a, b| (p - a.1).abs().total_cmp(&(p - b.1).abs()).then(a.0.cmp(&b.0)))
                .map(|(i, _)| i)
                .unwrap_or(0)
        })
        .collect();

    Ok(ClusterModel { centers, assignment })
}

/// Level of each line is the rank of its cluster centre (leftmost = 0).
///
/// Ranks are kept as-is, so a document whose first line is not leftmost, or
/// that skips a cluster, yields a program outside the usual one-step rule.
pub fn absolute_indent(doc: &OcrDocument) -> Result<IndentedProgram, IndentError> {
    let bandwidth = estimate_bandwidth(doc)?;
    let model = mean_shift_1d(&doc.x_mins(), bandwidth)?;
    // centers are sorted, so the cluster index is already the rank
    Ok(IndentedProgram::from_levels(doc, &model.assignment))
}

//! Character overlap of a text against a sketch.
//!
//! The text is normalized, every width-W window (stride 1) is looked up, and
//! each window present in the sketch marks all W of its characters. The ratio
//! is marked characters over all non-whitespace characters.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::normalize::{normalize, NormalizedText};
use crate::sketch::NgramSketch;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub total_chars: usize,
    pub overlapped_chars: usize,
    pub ratio: f64,
    /// Coalesced original byte ranges of the overlapped characters.
    pub matched_ranges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Per-character marks from a list of window hits: a difference array over
/// window starts, then a running sum.
pub fn mark_windows(len: usize, width: usize, hits: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut diff = vec![0i64; len + 1];
    for start in hits {
        diff[start] += 1;
        diff[start + width] -= 1;
    }
    let mut depth = 0;
    diff[..len]
        .iter()
        .map(|d| {
            depth += d;
            depth > 0
        })
        .collect()
}

pub fn overlap(text: &str, sketch: &NgramSketch) -> OverlapReport {
    let normalized = normalize(text);
    let width = sketch.gram_width();
    let total = normalized.len();
    if total < width {
        return OverlapReport {
            total_chars: total,
            overlapped_chars: 0,
            ratio: 0.0,
            matched_ranges: Vec::new(),
            note: Some(format!("text has {total} non-whitespace characters, fewer than the gram width {width}")),
        };
    }
    let hits = normalized
        .windows(width)
        .enumerate()
        .filter(|(_, gram)| sketch.contains_window(gram))
        .map(|(i, _)| i);
    let marks = mark_windows(total, width, hits);
    report_from_marks(&normalized, &marks)
}

pub(crate) fn report_from_marks(normalized: &NormalizedText, marks: &[bool]) -> OverlapReport {
    let total = marks.len();
    let overlapped = marks.iter().filter(|m| **m).count();
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < total {
        if !marks[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < total && marks[i] {
            i += 1;
        }
        let r = normalized.original_range(start..i);
        ranges.push((r.start, r.end));
    }
    OverlapReport {
        total_chars: total,
        overlapped_chars: overlapped,
        ratio: if total == 0 { 0.0 } else { overlapped as f64 / total as f64 },
        matched_ranges: ranges,
        note: None,
    }
}

/// `overlap(original).ratio − overlap(refactored).ratio`.
pub fn overlap_delta(original: &str, refactored: &str, sketch: &NgramSketch) -> f64 {
    overlap(original, sketch).ratio - overlap(refactored, sketch).ratio
}

/// Median of a list; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledReport {
    pub unit_id: String,
    pub label: String,
    pub report: OverlapReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchOverlap {
    pub reports: Vec<LabeledReport>,
    /// Median ratio per label (operator chain).
    pub medians: BTreeMap<String, f64>,
}

/// Overlap for `(unit_id, label, text)` triples, computed in parallel, with
/// the median ratio per label.
pub fn batch_overlap(items: &[(String, String, String)], sketch: &NgramSketch) -> BatchOverlap {
    let reports: Vec<LabeledReport> = items
        .par_iter()
        .map(|(unit_id, label, text)| LabeledReport {
            unit_id: unit_id.clone(),
            label: label.clone(),
            report: overlap(text, sketch),
        })
        .collect();
    let mut by_label: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &reports {
        by_label.entry(r.label.clone()).or_default().push(r.report.ratio);
    }
    let medians = by_label
        .into_iter()
        .filter_map(|(label, ratios)| median(&ratios).map(|m| (label, m)))
        .collect();
    BatchOverlap { reports, medians }
}

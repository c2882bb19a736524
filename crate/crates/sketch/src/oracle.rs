//! Brute-force reference for overlap: each window is searched for as a
//! substring of every normalized corpus document. Slow, but obviously right.

use memchr::memmem;

use crate::normalize::{normalize, NormalizedText};
use crate::overlap::{mark_windows, report_from_marks, OverlapReport};

pub struct Oracle {
    width: usize,
    docs: Vec<String>,
}

impl Oracle {
    pub fn new(width: usize, corpus: &[&str]) -> Self {
        Oracle {
            width,
            docs: corpus.iter().map(|d| normalize(d).chars).collect(),
        }
    }

    pub fn contains(&self, gram: &str) -> bool {
        let finder = memmem::Finder::new(gram.as_bytes());
        self.docs.iter().any(|d| finder.find(d.as_bytes()).is_some())
    }

    pub fn overlap(&self, text: &str) -> OverlapReport {
        let normalized: NormalizedText = normalize(text);
        let total = normalized.len();
        if total < self.width {
            let mut r = report_from_marks(&normalized, &vec![false; total]);
            r.note = Some(format!("text shorter than the gram width {}", self.width));
            return r;
        }
        let hits: Vec<usize> = (0..=total - self.width)
            .filter(|&i| self.contains(normalized.window(i, self.width)))
            .collect();
        report_from_marks(&normalized, &mark_windows(total, self.width, hits))
    }
}

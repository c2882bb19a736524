//! Building a sketch from a corpus manifest.

use std::thread;

use log::warn;
use serde::Serialize;

use crate::manifest::CorpusManifest;
use crate::normalize::normalize;
use crate::sketch::{
    Mode, NgramSketch, Result, SketchParams, DEFAULT_GRAM_WIDTH, EXACT_FP_THRESHOLD, EXACT_MAX_CHARS,
};

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub gram_width: usize,
    pub target_fp: f64,
    pub mode: Mode,
    /// Number of shards built concurrently and then merged.
    pub threads: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            gram_width: DEFAULT_GRAM_WIDTH,
            target_fp: 1e-6,
            mode: Mode::Auto,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SkippedFile {
    pub path: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BuildReport {
    pub files_read: usize,
    pub skipped: Vec<SkippedFile>,
    pub normalized_chars: u64,
    pub grams: u64,
    pub exact: bool,
    pub estimated_fp: f64,
}

/// Sketch parameters for a corpus of the given size.
pub fn choose_params(options: &BuildOptions, normalized_chars: u64, grams: u64) -> Result<SketchParams> {
    let exact = match options.mode {
        Mode::Exact => true,
        Mode::Filter => false,
        Mode::Auto => options.target_fp < EXACT_FP_THRESHOLD && normalized_chars <= EXACT_MAX_CHARS,
    };
    if exact {
        // Validate the width through the common path.
        SketchParams::for_capacity(options.gram_width, 1, 0.25)?;
        Ok(SketchParams::exact(options.gram_width))
    } else {
        SketchParams::for_capacity(options.gram_width, grams, options.target_fp)
    }
}

fn window_count(chars: u64, width: usize) -> u64 {
    (chars + 1).saturating_sub(width as u64)
}

/// Builds a sketch over in-memory documents.
pub fn build_from_texts(texts: &[&str], options: &BuildOptions) -> Result<(NgramSketch, BuildReport)> {
    let lengths: Vec<u64> = texts.iter().map(|t| normalize(t).len() as u64).collect();
    let chars = lengths.iter().sum();
    let grams = lengths.iter().map(|&l| window_count(l, options.gram_width)).sum();
    let params = choose_params(options, chars, grams)?;
    let sketch = fill(params, texts.len(), options.threads, |i| Some(texts[i].to_string()))?;
    let report = BuildReport {
        files_read: texts.len(),
        skipped: Vec::new(),
        normalized_chars: chars,
        grams: sketch.inserted_grams(),
        exact: sketch.is_exact(),
        estimated_fp: sketch.estimated_fp(),
    };
    Ok((sketch, report))
}

/// Builds a sketch over every readable file of a manifest. Unreadable files
/// are skipped with a warning and listed in the report.
pub fn build(manifest: &CorpusManifest, options: &BuildOptions) -> Result<(NgramSketch, BuildReport)> {
    let mut report = BuildReport::default();
    let mut readable = Vec::new();
    for (i, entry) in manifest.entries.iter().enumerate() {
        match manifest.read(entry) {
            Ok(text) => {
                let len = normalize(&text).len() as u64;
                report.normalized_chars += len;
                report.grams += window_count(len, options.gram_width);
                readable.push(i);
            }
            Err(err) => {
                warn!("skipping {}: {err}", entry.path);
                report.skipped.push(SkippedFile {
                    path: entry.path.clone(),
                    error: err.to_string(),
                });
            }
        }
    }
    let params = choose_params(options, report.normalized_chars, report.grams)?;
    let sketch = fill(params, readable.len(), options.threads, |i| {
        manifest.read(&manifest.entries[readable[i]]).ok()
    })?;
    report.files_read = readable.len();
    report.grams = sketch.inserted_grams();
    report.exact = sketch.is_exact();
    report.estimated_fp = sketch.estimated_fp();
    Ok((sketch, report))
}

/// Inserts documents `0..count` into shards built concurrently, then merges.
/// The result does not depend on the number of shards.
fn fill<F>(params: SketchParams, count: usize, threads: usize, fetch: F) -> Result<NgramSketch>
where
    F: Fn(usize) -> Option<String> + Sync,
{
    let threads = threads.clamp(1, count.max(1));
    let mut merged = NgramSketch::new(params)?;
    if threads == 1 {
        for i in 0..count {
            if let Some(text) = fetch(i) {
                merged.insert_text(&text);
            }
        }
        return Ok(merged);
    }
    let shards: Vec<NgramSketch> = thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let fetch = &fetch;
                scope.spawn(move || {
                    let mut shard = NgramSketch::new(params).expect("validated parameters");
                    for i in (t..count).step_by(threads) {
                        if let Some(text) = fetch(i) {
                            shard.insert_text(&text);
                        }
                    }
                    shard
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard thread panicked")).collect()
    });
    for shard in &shards {
        merged.merge_from(shard)?;
    }
    Ok(merged)
}

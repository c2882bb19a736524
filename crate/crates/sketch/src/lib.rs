//! Whitespace-insensitive n-gram sketches of a pretraining corpus and the
//! character-overlap measurement built on them.

pub mod build;
pub mod manifest;
pub mod normalize;
pub mod oracle;
pub mod overlap;
pub mod sketch;

pub use build::{build, build_from_texts, BuildOptions, BuildReport, SkippedFile};
pub use manifest::{CorpusManifest, ManifestEntry};
pub use normalize::{normalize, NormalizedText};
pub use oracle::Oracle;
pub use overlap::{batch_overlap, median, overlap, overlap_delta, BatchOverlap, LabeledReport, OverlapReport};
pub use sketch::{Mode, NgramSketch, Result, SketchError, SketchParams, DEFAULT_GRAM_WIDTH};

//! End-to-end contamination study pipeline: sample code units from a corpus,
//! refactor them with operator chains, and measure how much of each variant
//! still overlaps the corpus and how familiar it looks to a model.

pub mod artifacts;
pub mod pipeline;
pub mod report;
pub mod sampling;
pub mod synth;

pub use artifacts::ArtifactTree;
pub use pipeline::{run_metrics, run_overlap, run_refactor, ChainSpec};
pub use report::{build_report, Report};
pub use sampling::{allocate, population, sample_size, sample_units, SampleConfig, SampleError};

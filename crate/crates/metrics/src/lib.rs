//! Model-side contamination measurements computed from per-token
//! log-probability traces: perplexity, Min-K% Prob, and the change in both
//! between an original code unit and its refactored variant.

pub mod aggregate;
pub mod scores;
pub mod trace;

pub use aggregate::{aggregate, pair_deltas, DeltaRow, DeltaTable, PairDelta, Unpaired, AVERAGE_ROW};
pub use scores::{
    mean_nll, metric_delta, metric_delta_with, min_k_prob, perplexity, MetricDelta, MetricsReport, SignConvention,
    DEFAULT_K,
};
pub use trace::{read_traces, read_traces_file, write_traces, LogProbTrace, Token, ORIGINAL_VARIANT};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("trace for unit `{unit_id}` has no scored tokens")]
    EmptyTrace { unit_id: String },
    #[error("traces do not pair: {0}")]
    PairMismatch(String),
    #[error("k must be in (0, 100], got {0}")]
    InvalidK(f64),
    #[error("trace line {line}: {reason}")]
    InvalidTrace { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = MetricsError> = std::result::Result<T, E>;

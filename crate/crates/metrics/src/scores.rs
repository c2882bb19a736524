//! Perplexity and Min-K% Prob.
//!
//! Both are order-free statistics of a trace's log-probabilities, in natural
//! log. Min-K% is reported as the mean negative log-likelihood of the k%
//! least likely tokens, so for both scores larger means "less familiar".

use serde::{Deserialize, Serialize};

use crate::trace::LogProbTrace;
use crate::{MetricsError, Result};

/// Default k: score the lowest-probability fifth of the tokens.
pub const DEFAULT_K: f64 = 20.0;

fn nonempty(trace: &LogProbTrace) -> Result<()> {
    if trace.tokens.is_empty() {
        return Err(MetricsError::EmptyTrace { unit_id: trace.unit_id.clone() });
    }
    Ok(())
}

/// Mean negative log-likelihood per token.
pub fn mean_nll(trace: &LogProbTrace) -> Result<f64> {
    nonempty(trace)?;
    Ok(-trace.logprobs().sum::<f64>() / trace.tokens.len() as f64)
}

/// `exp(mean NLL)`.
pub fn perplexity(trace: &LogProbTrace) -> Result<f64> {
    mean_nll(trace).map(f64::exp)
}

/// Mean NLL of the `max(1, ceil(k/100 · n))` lowest-probability tokens.
pub fn min_k_prob(trace: &LogProbTrace, k_percent: f64) -> Result<f64> {
    if !(k_percent > 0.0 && k_percent <= 100.0) {
        return Err(MetricsError::InvalidK(k_percent));
    }
    nonempty(trace)?;
    let n = trace.tokens.len();
    let m = ((k_percent / 100.0 * n as f64).ceil() as usize).clamp(1, n);
    let mut lps: Vec<f64> = trace.logprobs().collect();
    lps.sort_by(f64::total_cmp);
    Ok(-lps[..m].iter().sum::<f64>() / m as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ppl: f64,
    /// `(k, score)` pairs in the order requested.
    pub mink_scores: Vec<(f64, f64)>,
}

impl MetricsReport {
    pub fn compute(trace: &LogProbTrace, ks: &[f64]) -> Result<Self> {
        Ok(MetricsReport {
            ppl: perplexity(trace)?,
            mink_scores: ks
                .iter()
                .map(|&k| min_k_prob(trace, k).map(|s| (k, s)))
                .collect::<Result<_>>()?,
        })
    }

    pub fn mink(&self, k: f64) -> Option<f64> {
        self.mink_scores.iter().find(|(kk, _)| *kk == k).map(|(_, s)| *s)
    }
}

/// Which way a delta is taken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignConvention {
    /// `refactored − original`: positive means less familiar after refactoring.
    #[default]
    RefactoredMinusOriginal,
    /// `original − refactored`.
    OriginalMinusRefactored,
}

impl SignConvention {
    pub fn apply(self, original: f64, refactored: f64) -> f64 {
        match self {
            SignConvention::RefactoredMinusOriginal => refactored - original,
            SignConvention::OriginalMinusRefactored => original - refactored,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub ppl_delta: f64,
    pub mink_delta: f64,
}

pub fn metric_delta(original: &LogProbTrace, refactored: &LogProbTrace, k: f64) -> Result<MetricDelta> {
    metric_delta_with(original, refactored, k, SignConvention::default())
}

pub fn metric_delta_with(
    original: &LogProbTrace,
    refactored: &LogProbTrace,
    k: f64,
    sign: SignConvention,
) -> Result<MetricDelta> {
    if original.model_id != refactored.model_id {
        return Err(MetricsError::PairMismatch(format!(
            "model `{}` vs `{}`",
            original.model_id, refactored.model_id
        )));
    }
    if original.unit_id != refactored.unit_id {
        return Err(MetricsError::PairMismatch(format!(
            "unit `{}` vs `{}`",
            original.unit_id, refactored.unit_id
        )));
    }
    Ok(MetricDelta {
        ppl_delta: sign.apply(perplexity(original)?, perplexity(refactored)?),
        mink_delta: sign.apply(min_k_prob(original, k)?, min_k_prob(refactored, k)?),
    })
}

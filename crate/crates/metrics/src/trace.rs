//! The trace format: one JSON object per line,
//! `{"model_id": .., "unit_id": .., "variant": .., "tokens": [{"t": .., "lp": ..}]}`.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{MetricsError, Result};

/// Variant label of the unrefactored unit.
pub const ORIGINAL_VARIANT: &str = "original";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub t: String,
    /// Natural-log probability, ≤ 0.
    pub lp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogProbTrace {
    pub model_id: String,
    pub unit_id: String,
    pub variant: String,
    pub tokens: Vec<Token>,
}

impl LogProbTrace {
    pub fn new(
        model_id: impl Into<String>,
        unit_id: impl Into<String>,
        variant: impl Into<String>,
        logprobs: impl IntoIterator<Item = f64>,
    ) -> Self {
        LogProbTrace {
            model_id: model_id.into(),
            unit_id: unit_id.into(),
            variant: variant.into(),
            tokens: logprobs.into_iter().map(|lp| Token { t: String::new(), lp }).collect(),
        }
    }

    pub fn logprobs(&self) -> impl Iterator<Item = f64> + '_ {
        self.tokens.iter().map(|t| t.lp)
    }

    pub fn is_original(&self) -> bool {
        self.variant == ORIGINAL_VARIANT
    }

    fn validate(&self) -> Result<(), String> {
        match self.tokens.iter().position(|t| !t.lp.is_finite() || t.lp > 0.0) {
            Some(i) => Err(format!("token {i} has log-probability {}, expected a finite value ≤ 0", self.tokens[i].lp)),
            None => Ok(()),
        }
    }
}

/// Reads JSON-lines traces. Blank lines are ignored; malformed lines and
/// positive or non-finite log-probabilities are errors.
pub fn read_traces(reader: impl BufRead) -> Result<Vec<LogProbTrace>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let invalid = |reason: String| MetricsError::InvalidTrace { line: i + 1, reason };
        let trace: LogProbTrace = serde_json::from_str(&line).map_err(|e| invalid(e.to_string()))?;
        trace.validate().map_err(invalid)?;
        out.push(trace);
    }
    Ok(out)
}

pub fn read_traces_file(path: impl AsRef<Path>) -> Result<Vec<LogProbTrace>> {
    read_traces(BufReader::new(File::open(path)?))
}

pub fn write_traces(mut w: impl Write, traces: &[LogProbTrace]) -> Result<()> {
    for trace in traces {
        let line = serde_json::to_string(trace).map_err(std::io::Error::other)?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_the_line_format() {
        let text = r#"{"model_id":"m","unit_id":"u1","variant":"original","tokens":[{"t":"def","lp":-0.5},{"t":" f","lp":0}]}

{"model_id":"m","unit_id":"u1","variant":"NORM+STYL","tokens":[{"t":"def","lp":-1.25}]}
"#;
        let traces = read_traces(text.as_bytes()).unwrap();
        assert_eq!(traces.len(), 2);
        assert!(traces[0].is_original());
        assert_eq!(traces[1].tokens[0], Token { t: "def".into(), lp: -1.25 });
        let mut buf = Vec::new();
        write_traces(&mut buf, &traces).unwrap();
        assert_eq!(read_traces(buf.as_slice()).unwrap(), traces);
    }

    #[test]
    fn rejects_bad_lines() {
        let positive = r#"{"model_id":"m","unit_id":"u","variant":"original","tokens":[{"t":"x","lp":0.5}]}"#;
        assert!(matches!(read_traces(positive.as_bytes()), Err(MetricsError::InvalidTrace { line: 1, .. })));
        let missing = "\n{\"model_id\":\"m\"}\n";
        assert!(matches!(read_traces(missing.as_bytes()), Err(MetricsError::InvalidTrace { line: 2, .. })));
    }
}

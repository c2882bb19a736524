//! The final report: one row per (unit, variant), per-chain summaries, and
//! an environment stamp. The CSV holds no timestamp, so identical runs give
//! identical CSV bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::Serialize;
use unleak_sketch::{median, OverlapReport};

use crate::artifacts::{read_json, ArtifactTree, OverlapRunInfo, Status, ORIGINAL, OVERLAP_FILE, OVERLAP_RUN_FILE};
use crate::pipeline::{read_metrics, MetricsOutput, TOOL_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub unit_id: String,
    pub operator_chain: String,
    pub total_chars: Option<usize>,
    pub overlapped_chars: Option<usize>,
    pub ratio: Option<f64>,
    /// `ok`, `failed: <reason>`, or `not scored`.
    pub status: String,
    /// Operators rolled back because their output did not re-parse.
    pub rolled_back: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSummary {
    pub scored: usize,
    pub median_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestTrial {
    pub original_median: f64,
    pub all_median: f64,
    /// `1 − all / original`.
    pub relative_drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub tool_version: String,
    pub seed: u64,
    pub sketch_digest: Option<String>,
    pub gram_width: Option<usize>,
    /// Seconds since the Unix epoch; the only field that differs between
    /// identical runs.
    pub generated_at_unix: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub environment: Environment,
    pub rows: Vec<ReportRow>,
    pub chains: BTreeMap<String, ChainSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_trial: Option<BestTrial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_metrics: Option<MetricsOutput>,
}

pub fn build_report(tree: &ArtifactTree) -> Result<Report> {
    let overlap_run: Option<OverlapRunInfo> = {
        let p = tree.root.join(OVERLAP_RUN_FILE);
        if p.exists() {
            Some(read_json(&p)?)
        } else {
            None
        }
    };
    let mut rows = Vec::new();
    for (unit, dir) in &tree.units {
        for variant in tree.variants() {
            let outcome = if variant == ORIGINAL { None } else { ArtifactTree::outcome(dir, &variant)? };
            let overlap_path = dir.join(&variant).join(OVERLAP_FILE);
            let overlap: Option<OverlapReport> = if overlap_path.exists() { Some(read_json(&overlap_path)?) } else { None };
            let status = match (&outcome, &overlap) {
                (Some(o), _) if o.status == Status::Failed => {
                    format!("failed: {}", o.error.as_deref().unwrap_or("unknown error"))
                }
                (None, _) if variant != ORIGINAL => "failed: no outcome recorded".into(),
                (_, None) => "not scored".into(),
                _ => "ok".into(),
            };
            rows.push(ReportRow {
                unit_id: unit.id.clone(),
                operator_chain: variant.clone(),
                total_chars: overlap.as_ref().map(|r| r.total_chars),
                overlapped_chars: overlap.as_ref().map(|r| r.overlapped_chars),
                ratio: overlap.as_ref().map(|r| r.ratio),
                status,
                rolled_back: outcome
                    .as_ref()
                    .map(|o| o.rolled_back().map(|op| op.name().to_string()).collect())
                    .unwrap_or_default(),
            });
        }
    }

    let mut chains = BTreeMap::new();
    for variant in tree.variants() {
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.operator_chain == variant)
            .filter_map(|r| r.ratio)
            .collect();
        let mean = if ratios.is_empty() { None } else { Some(ratios.iter().sum::<f64>() / ratios.len() as f64) };
        chains.insert(variant, ChainSummary { scored: ratios.len(), median_ratio: median(&ratios), mean_ratio: mean });
    }
    let best_trial = match (
        chains.get(ORIGINAL).and_then(|c| c.median_ratio),
        chains.get("ALL").and_then(|c| c.median_ratio),
    ) {
        (Some(orig), Some(all)) => Some(BestTrial {
            original_median: orig,
            all_median: all,
            relative_drop: if orig > 0.0 { 1.0 - all / orig } else { 0.0 },
        }),
        _ => None,
    };
    let generated_at_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(Report {
        environment: Environment {
            tool_version: TOOL_VERSION.into(),
            seed: tree.run.seed,
            sketch_digest: overlap_run.as_ref().map(|o| o.sketch_digest.clone()),
            gram_width: overlap_run.as_ref().map(|o| o.gram_width),
            generated_at_unix,
        },
        rows,
        chains,
        best_trial,
        model_metrics: read_metrics(tree)?,
    })
}

impl Report {
    pub fn rollbacks(&self) -> usize {
        self.rows.iter().map(|r| r.rolled_back.len()).sum()
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "unit_id",
            "operator_chain",
            "total_chars",
            "overlapped_chars",
            "ratio",
            "status",
            "rolled_back",
            "seed",
            "sketch_digest",
        ])?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.rows {
            out.write_record([
                r.unit_id.clone(),
                r.operator_chain.clone(),
                opt(r.total_chars.map(|v| v.to_string())),
                opt(r.overlapped_chars.map(|v| v.to_string())),
                opt(r.ratio.map(|v| v.to_string())),
                r.status.clone(),
                r.rolled_back.join("+"),
                self.environment.seed.to_string(),
                opt(self.environment.sketch_digest.clone()),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }
}

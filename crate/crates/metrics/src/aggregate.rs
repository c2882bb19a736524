//! Pairing traces and averaging deltas per (operator, model), laid out like a
//! delta table: one row per operator chain, two columns per model, and a
//! final `Average` row.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::scores::{metric_delta_with, SignConvention};
use crate::trace::LogProbTrace;
use crate::Result;

pub const AVERAGE_ROW: &str = "Average";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDelta {
    /// The refactored variant's operator-chain label.
    pub operator: String,
    pub model_id: String,
    pub unit_id: String,
    pub ppl_delta: f64,
    pub mink_delta: f64,
}

/// `(model_id, unit_id, variant)` of a trace with no original to pair with.
pub type Unpaired = (String, String, String);

/// Pairs every non-original trace with the original trace of the same model
/// and unit, and computes their deltas in parallel. Variants without an
/// original are returned as `(model_id, unit_id, variant)` instead.
pub fn pair_deltas(
    traces: &[LogProbTrace],
    k: f64,
    sign: SignConvention,
) -> Result<(Vec<PairDelta>, Vec<Unpaired>)> {
    let originals: HashMap<(&str, &str), &LogProbTrace> = traces
        .iter()
        .filter(|t| t.is_original())
        .map(|t| ((t.model_id.as_str(), t.unit_id.as_str()), t))
        .collect();
    let mut missing = Vec::new();
    let mut pairs = Vec::new();
    for t in traces.iter().filter(|t| !t.is_original()) {
        match originals.get(&(t.model_id.as_str(), t.unit_id.as_str())) {
            Some(orig) => pairs.push((*orig, t)),
            None => missing.push((t.model_id.clone(), t.unit_id.clone(), t.variant.clone())),
        }
    }
    let mut deltas = pairs
        .par_iter()
        .map(|(orig, refac)| {
            metric_delta_with(orig, refac, k, sign).map(|d| PairDelta {
                operator: refac.variant.clone(),
                model_id: refac.model_id.clone(),
                unit_id: refac.unit_id.clone(),
                ppl_delta: d.ppl_delta,
                mink_delta: d.mink_delta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    deltas.sort_by(|a, b| (&a.operator, &a.model_id, &a.unit_id).cmp(&(&b.operator, &b.model_id, &b.unit_id)));
    Ok((deltas, missing))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DeltaCell {
    pub pairs: usize,
    pub ppl_delta: f64,
    pub mink_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub operator: String,
    /// Mean deltas per model.
    pub cells: BTreeMap<String, DeltaCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaTable {
    pub models: Vec<String>,
    /// One row per operator, sorted by label, followed by the `Average` row
    /// (the mean over all pairs of each model).
    pub rows: Vec<DeltaRow>,
}

fn mean_cell(items: &[&PairDelta]) -> DeltaCell {
    let n = items.len() as f64;
    DeltaCell {
        pairs: items.len(),
        ppl_delta: items.iter().map(|p| p.ppl_delta).sum::<f64>() / n,
        mink_delta: items.iter().map(|p| p.mink_delta).sum::<f64>() / n,
    }
}

pub fn aggregate(pairs: &[PairDelta]) -> DeltaTable {
    let models: BTreeSet<&str> = pairs.iter().map(|p| p.model_id.as_str()).collect();
    let mut groups: BTreeMap<&str, BTreeMap<&str, Vec<&PairDelta>>> = BTreeMap::new();
    let mut per_model: BTreeMap<&str, Vec<&PairDelta>> = BTreeMap::new();
    for p in pairs {
        groups.entry(&p.operator).or_default().entry(&p.model_id).or_default().push(p);
        per_model.entry(&p.model_id).or_default().push(p);
    }
    let mut rows: Vec<DeltaRow> = groups
        .into_iter()
        .map(|(op, by_model)| DeltaRow {
            operator: op.to_string(),
            cells: by_model.into_iter().map(|(m, items)| (m.to_string(), mean_cell(&items))).collect(),
        })
        .collect();
    if !pairs.is_empty() {
        rows.push(DeltaRow {
            operator: AVERAGE_ROW.to_string(),
            cells: per_model.into_iter().map(|(m, items)| (m.to_string(), mean_cell(&items))).collect(),
        });
    }
    DeltaTable {
        models: models.into_iter().map(str::to_string).collect(),
        rows,
    }
}

impl DeltaTable {
    pub fn row(&self, operator: &str) -> Option<&DeltaRow> {
        self.rows.iter().find(|r| r.operator == operator)
    }

    /// CSV with columns `operator, <model> ppl, <model> mink, ...`. Cells
    /// without pairs are left empty.
    pub fn write_csv(&self, w: impl Write, k: f64) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["operator".to_string()];
        for m in &self.models {
            header.push(format!("{m} ppl_delta"));
            header.push(format!("{m} min{k}%_delta"));
        }
        out.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![row.operator.clone()];
            for m in &self.models {
                match row.cells.get(m) {
                    Some(c) => {
                        record.push(format!("{:.6}", c.ppl_delta));
                        record.push(format!("{:.6}", c.mink_delta));
                    }
                    None => record.extend([String::new(), String::new()]),
                }
            }
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

//! The pipeline stages. Each stage reads and writes the artifact tree, so
//! stages can be rerun independently.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unleak_core::{apply_chain, chain_text, CodeUnit, OperatorId, RefactorConfig};
use unleak_metrics::{
    aggregate, pair_deltas, read_traces_file, LogProbTrace, MetricsReport, PairDelta, SignConvention,
};
use unleak_sketch::{batch_overlap, NgramSketch};

use crate::artifacts::{
    read_json, unit_dir_name, write_json, ArtifactTree, ChainOutcome, OverlapRunInfo, RunInfo, Status, StepRecord,
    CODE_FILE, METRICS_FILE, METRICS_TABLE_FILE, ORIGINAL, OUTCOME_FILE, OVERLAP_FILE, OVERLAP_RUN_FILE, RUN_FILE,
    UNIT_FILE,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A chain requested on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainSpec {
    /// Every operator that applies to the unit's language and granularity.
    All,
    Ops(Vec<OperatorId>),
}

impl ChainSpec {
    /// Parses `ALL`, `EACH` (one chain per operator) or `IFF,LOOP`. NORM is
    /// put first when a chain does not start with it.
    pub fn parse(s: &str) -> Result<Vec<ChainSpec>> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ALL" => Ok(vec![ChainSpec::All]),
            "EACH" => Ok(OperatorId::ALL_ORDER.iter().map(|&op| ChainSpec::Ops(vec![op]).normalized()).collect()),
            _ => {
                let ops = OperatorId::parse_list(s)?;
                if ops.is_empty() {
                    bail!("empty operator chain `{s}`");
                }
                Ok(vec![ChainSpec::Ops(ops).normalized()])
            }
        }
    }

    fn normalized(self) -> Self {
        match self {
            ChainSpec::Ops(mut ops) => {
                if ops.first() != Some(&OperatorId::Norm) {
                    ops.insert(0, OperatorId::Norm);
                }
                ChainSpec::Ops(ops)
            }
            all => all,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ChainSpec::All => "ALL".into(),
            ChainSpec::Ops(ops) => ops.iter().map(|o| o.name()).collect::<Vec<_>>().join("+"),
        }
    }

    pub fn operators(&self, unit: &CodeUnit) -> Vec<OperatorId> {
        match self {
            ChainSpec::All => OperatorId::full_chain(unit.language, unit.granularity),
            ChainSpec::Ops(ops) => ops.clone(),
        }
    }
}

pub fn read_units(path: &Path) -> Result<Vec<CodeUnit>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

pub fn write_units(path: &Path, units: &[CodeUnit]) -> Result<()> {
    let mut out = String::new();
    for unit in units {
        out.push_str(&serde_json::to_string(unit)?);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Default, Serialize)]
pub struct RefactorSummary {
    pub units: usize,
    pub chains: usize,
    pub failures: Vec<(String, String, String)>,
    pub rollbacks: usize,
}

/// Applies every chain to every unit and writes the artifact tree.
pub fn run_refactor(units: &[CodeUnit], chains: &[ChainSpec], config: &RefactorConfig, out: &Path) -> Result<RefactorSummary> {
    let mut labels: Vec<String> = Vec::new();
    for chain in chains {
        let label = chain.label();
        if labels.contains(&label) {
            bail!("chain {label} requested twice");
        }
        labels.push(label);
    }
    let mut seen = std::collections::HashSet::new();
    for unit in units {
        if !seen.insert(unit.id.as_str()) {
            bail!("duplicate unit id `{}`", unit.id);
        }
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(
        &out.join(RUN_FILE),
        &RunInfo { tool_version: TOOL_VERSION.into(), seed: config.seed, chains: labels.clone() },
    )?;

    let results: Vec<Result<Vec<ChainOutcome>>> = units
        .par_iter()
        .map(|unit| {
            let dir = out.join(unit_dir_name(&unit.id));
            fs::create_dir_all(dir.join(ORIGINAL))?;
            write_json(&dir.join(UNIT_FILE), unit)?;
            fs::write(dir.join(ORIGINAL).join(CODE_FILE), &unit.text)?;
            chains
                .iter()
                .zip(&labels)
                .map(|(chain, label)| refactor_one(unit, chain, label, config, &dir.join(label)))
                .collect()
        })
        .collect();

    let mut summary = RefactorSummary { units: units.len(), chains: chains.len(), ..Default::default() };
    for outcomes in results {
        for o in outcomes? {
            summary.rollbacks += o.rolled_back().count();
            if o.status == Status::Failed {
                summary.failures.push((o.unit_id, o.chain, o.error.unwrap_or_default()));
            }
        }
    }
    Ok(summary)
}

fn refactor_one(unit: &CodeUnit, chain: &ChainSpec, label: &str, config: &RefactorConfig, dir: &Path) -> Result<ChainOutcome> {
    fs::create_dir_all(dir)?;
    let operators = chain.operators(unit);
    let code_path = dir.join(CODE_FILE);
    let outcome = match apply_chain(unit, &operators, config) {
        Ok(steps) => {
            fs::write(&code_path, chain_text(unit, &steps))?;
            ChainOutcome {
                unit_id: unit.id.clone(),
                chain: label.into(),
                operators,
                status: Status::Ok,
                error: None,
                steps: steps.iter().map(StepRecord::from).collect(),
            }
        }
        Err(err) => {
            if code_path.exists() {
                fs::remove_file(&code_path)?;
            }
            ChainOutcome {
                unit_id: unit.id.clone(),
                chain: label.into(),
                operators,
                status: Status::Failed,
                error: Some(err.to_string()),
                steps: Vec::new(),
            }
        }
    };
    write_json(&dir.join(OUTCOME_FILE), &outcome)?;
    Ok(outcome)
}

#[derive(Debug, Default, Serialize)]
pub struct OverlapSummary {
    pub scored: usize,
    pub missing: usize,
    pub medians: BTreeMap<String, f64>,
}

/// Scores every variant text of the tree against a sketch.
pub fn run_overlap(tree: &ArtifactTree, sketch: &NgramSketch) -> Result<OverlapSummary> {
    let mut items = Vec::new();
    let mut paths: Vec<PathBuf> = Vec::new();
    let mut summary = OverlapSummary::default();
    for (unit, dir) in &tree.units {
        for variant in tree.variants() {
            let out = dir.join(&variant).join(OVERLAP_FILE);
            match ArtifactTree::code(dir, &variant)? {
                Some(text) => {
                    items.push((unit.id.clone(), variant.clone(), text));
                    paths.push(out);
                }
                None => {
                    summary.missing += 1;
                    if out.exists() {
                        fs::remove_file(&out)?;
                    }
                }
            }
        }
    }
    let batch = batch_overlap(&items, sketch);
    for (report, path) in batch.reports.iter().zip(&paths) {
        write_json(path, &report.report)?;
    }
    write_json(
        &tree.root.join(OVERLAP_RUN_FILE),
        &OverlapRunInfo {
            sketch_digest: sketch.content_digest(),
            gram_width: sketch.gram_width(),
            exact: sketch.is_exact(),
        },
    )?;
    summary.scored = batch.reports.len();
    summary.medians = batch.medians;
    Ok(summary)
}

/// Reads traces from a `.jsonl` file or every `.jsonl` file in a directory
/// (in name order).
pub fn load_traces(path: &Path) -> Result<Vec<LogProbTrace>> {
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in fs::read_dir(path)? {
            let p = entry?.path();
            if p.extension().is_some_and(|e| e == "jsonl") {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut traces = Vec::new();
    for f in files {
        traces.extend(read_traces_file(&f).with_context(|| format!("reading traces from {}", f.display()))?);
    }
    Ok(traces)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceScore {
    pub model_id: String,
    pub unit_id: String,
    pub variant: String,
    pub ppl: f64,
    pub mink: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MissingPair {
    pub model_id: String,
    pub unit_id: String,
    pub variant: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsOutput {
    pub k: f64,
    pub sign: SignConvention,
    pub scores: Vec<TraceScore>,
    pub deltas: Vec<PairDeltaRecord>,
    pub missing: Vec<MissingPair>,
    /// Traces whose unit or variant is not in the artifact tree.
    pub unknown: Vec<MissingPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDeltaRecord {
    pub operator: String,
    pub model_id: String,
    pub unit_id: String,
    pub ppl_delta: f64,
    pub mink_delta: f64,
}

impl From<PairDelta> for PairDeltaRecord {
    fn from(p: PairDelta) -> Self {
        PairDeltaRecord {
            operator: p.operator,
            model_id: p.model_id,
            unit_id: p.unit_id,
            ppl_delta: p.ppl_delta,
            mink_delta: p.mink_delta,
        }
    }
}

/// Scores traces, pairs them with originals, and writes `metrics.json` and
/// the per-(operator, model) table.
pub fn run_metrics(tree: &ArtifactTree, traces: &[LogProbTrace], k: f64, sign: SignConvention) -> Result<MetricsOutput> {
    let known: std::collections::HashSet<(String, String)> = tree
        .units
        .iter()
        .flat_map(|(u, _)| tree.variants().into_iter().map(move |v| (u.id.clone(), v)))
        .collect();
    let mut unknown = Vec::new();
    let mut kept = Vec::new();
    for t in traces {
        if known.contains(&(t.unit_id.clone(), t.variant.clone())) {
            kept.push(t.clone());
        } else {
            unknown.push(MissingPair { model_id: t.model_id.clone(), unit_id: t.unit_id.clone(), variant: t.variant.clone() });
        }
    }
    if !unknown.is_empty() {
        warn!("{} trace(s) do not match any artifact", unknown.len());
    }
    let scores = kept
        .par_iter()
        .map(|t| {
            let r = MetricsReport::compute(t, &[k])?;
            Ok(TraceScore {
                model_id: t.model_id.clone(),
                unit_id: t.unit_id.clone(),
                variant: t.variant.clone(),
                ppl: r.ppl,
                mink: r.mink_scores[0].1,
            })
        })
        .collect::<Result<Vec<_>, unleak_metrics::MetricsError>>()?;
    let (deltas, missing) = pair_deltas(&kept, k, sign)?;
    let table = aggregate(&deltas);
    let mut csv = Vec::new();
    table.write_csv(&mut csv, k)?;
    fs::write(tree.root.join(METRICS_TABLE_FILE), csv)?;
    let output = MetricsOutput {
        k,
        sign,
        scores,
        deltas: deltas.into_iter().map(PairDeltaRecord::from).collect(),
        missing: missing
            .into_iter()
            .map(|(model_id, unit_id, variant)| MissingPair { model_id, unit_id, variant })
            .collect(),
        unknown,
    };
    write_json(&tree.root.join(METRICS_FILE), &output)?;
    Ok(output)
}

pub fn read_metrics(tree: &ArtifactTree) -> Result<Option<MetricsOutput>> {
    let path = tree.root.join(METRICS_FILE);
    if path.exists() {
        read_json(&path).map(Some)
    } else {
        Ok(None)
    }
}

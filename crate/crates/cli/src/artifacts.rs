//! The artifact tree shared by all pipeline stages:
//!
//! ```text
//! out/
//!   run.json                   seed, chain labels, tool version
//!   <unit>/unit.json           the sampled unit
//!   <unit>/original/code.txt
//!   <unit>/<chain>/code.txt    refactored text (absent when the chain failed)
//!   <unit>/<chain>/outcome.json
//!   <unit>/<chain>/overlap.json  written by the overlap stage
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use unleak_core::ops::mix_seed;
use unleak_core::{CodeUnit, OperatorId, OperatorOutcome};

pub const ORIGINAL: &str = "original";
pub const RUN_FILE: &str = "run.json";
pub const UNIT_FILE: &str = "unit.json";
pub const CODE_FILE: &str = "code.txt";
pub const OUTCOME_FILE: &str = "outcome.json";
pub const OVERLAP_FILE: &str = "overlap.json";
pub const OVERLAP_RUN_FILE: &str = "overlap_run.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const METRICS_TABLE_FILE: &str = "metrics_table.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub tool_version: String,
    pub seed: u64,
    pub chains: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRunInfo {
    pub sketch_digest: String,
    pub gram_width: usize,
    pub exact: bool,
}

/// One step of a chain as recorded on disk (the text lives in `code.txt`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub operator: OperatorId,
    pub applied: bool,
    pub sites: usize,
    pub rolled_back: bool,
    pub notes: Vec<String>,
}

impl From<&OperatorOutcome> for StepRecord {
    fn from(o: &OperatorOutcome) -> Self {
        StepRecord {
            operator: o.operator,
            applied: o.applied,
            sites: o.sites,
            rolled_back: o.rolled_back,
            notes: o.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainOutcome {
    pub unit_id: String,
    pub chain: String,
    pub operators: Vec<OperatorId>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub steps: Vec<StepRecord>,
}

impl ChainOutcome {
    pub fn rolled_back(&self) -> impl Iterator<Item = OperatorId> + '_ {
        self.steps.iter().filter(|s| s.rolled_back).map(|s| s.operator)
    }
}

/// Directory name for a unit id: the id made filesystem-safe, plus a short
/// hash so that distinct ids never share a directory.
pub fn unit_dir_name(unit_id: &str) -> String {
    let safe: String = unit_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' })
        .collect();
    let tail: String = safe.chars().rev().take(80).collect::<Vec<_>>().into_iter().rev().collect();
    format!("{tail}-{:08x}", mix_seed(0, unit_id) as u32)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Read-only view of an artifact tree.
pub struct ArtifactTree {
    pub root: PathBuf,
    pub run: RunInfo,
    /// `(unit, directory)`, sorted by unit id.
    pub units: Vec<(CodeUnit, PathBuf)>,
}

impl ArtifactTree {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        let run_path = root.join(RUN_FILE);
        if !run_path.exists() {
            bail!("{} is not an artifact tree (no {RUN_FILE})", root.display());
        }
        let run: RunInfo = read_json(&run_path)?;
        let mut units = Vec::new();
        for entry in fs::read_dir(&root).with_context(|| format!("listing {}", root.display()))? {
            let dir = entry?.path();
            let unit_file = dir.join(UNIT_FILE);
            if dir.is_dir() && unit_file.exists() {
                units.push((read_json::<CodeUnit>(&unit_file)?, dir));
            }
        }
        units.sort_by(|a, b| a.0.id.cmp(&b.0.id));
        Ok(ArtifactTree { root, run, units })
    }

    /// `original` followed by the run's chains.
    pub fn variants(&self) -> Vec<String> {
        std::iter::once(ORIGINAL.to_string()).chain(self.run.chains.iter().cloned()).collect()
    }

    pub fn code(dir: &Path, variant: &str) -> io::Result<Option<String>> {
        match fs::read_to_string(dir.join(variant).join(CODE_FILE)) {
            Ok(text) => Ok(Some(text)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn outcome(dir: &Path, chain: &str) -> Result<Option<ChainOutcome>> {
        let path = dir.join(chain).join(OUTCOME_FILE);
        if path.exists() {
            read_json(&path).map(Some)
        } else {
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_dirs_are_safe_and_distinct() {
        let a = unit_dir_name("pkg/mod.py::Foo.bar@12");
        assert!(a.starts_with("pkg_mod.py__Foo.bar_12-"));
        assert_ne!(unit_dir_name("a/b"), unit_dir_name("a_b"));
        assert!(!unit_dir_name(&"x/".repeat(200)).contains('/'));
    }
}

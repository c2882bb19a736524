//! Choosing which code units to study: the sample-size helper, proportional
//! allocation across strata, and seeded sampling from a corpus manifest.

use std::collections::BTreeMap;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unleak_core::ops::mix_seed;
use unleak_core::{extract_units, reparses, CodeUnit, Granularity, Language, SourceFile};
use unleak_sketch::CorpusManifest;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("population of {population} units is smaller than the requested sample of {requested}")]
    PopulationTooSmall { population: usize, requested: usize },
    #[error("stratum `{stratum}` has {available} units but its allocation is {allocated}")]
    StratumTooSmall { stratum: String, available: usize, allocated: usize },
    #[error("confidence must be one of 0.90, 0.95, 0.99, got {0}")]
    UnsupportedConfidence(f64),
}

/// Two-sided z value for a confidence level.
pub fn z_score(confidence: f64) -> Result<f64, SampleError> {
    const TABLE: [(f64, f64); 3] = [(0.90, 1.644_853_626_951_472), (0.95, 1.959_963_984_540_054), (0.99, 2.575_829_303_548_901)];
    TABLE
        .iter()
        .find(|(c, _)| (c - confidence).abs() < 1e-9)
        .map(|(_, z)| *z)
        .ok_or(SampleError::UnsupportedConfidence(confidence))
}

/// Sample size for estimating a proportion: `n0 = z²·0.25/e²`, with the
/// finite-population correction `n0 / (1 + (n0 − 1)/N)` when `population`
/// is given, rounded to the nearest integer.
pub fn sample_size(confidence: f64, margin: f64, population: Option<usize>) -> Result<usize, SampleError> {
    let z = z_score(confidence)?;
    let n0 = z * z * 0.25 / (margin * margin);
    let n = match population {
        Some(pop) => n0 / (1.0 + (n0 - 1.0) / pop as f64),
        None => n0,
    };
    Ok(n.round() as usize)
}

/// Proportional allocation of `n` over strata by size, largest remainder
/// first (ties to the earlier stratum). Sums to `n`.
pub fn allocate(sizes: &[usize], n: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return vec![0; sizes.len()];
    }
    let quotas: Vec<f64> = sizes.iter().map(|&s| s as f64 * n as f64 / total as f64).collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut left = n - alloc.iter().sum::<usize>();
    for i in order {
        if left == 0 {
            break;
        }
        alloc[i] += 1;
        left -= 1;
    }
    alloc
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    /// Minimum non-blank lines per unit.
    pub min_loc: usize,
    pub seed: u64,
    pub granularity: Granularity,
    pub language: Option<Language>,
    /// Keep only entries whose metadata has these values.
    pub filters: BTreeMap<String, String>,
    /// Metadata key to stratify by.
    pub stratify_by: Option<String>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            n: 384,
            min_loc: 4,
            seed: 0,
            granularity: Granularity::Method,
            language: None,
            filters: BTreeMap::new(),
            stratify_by: None,
        }
    }
}

#[derive(Debug, Default)]
pub struct Population {
    pub units: Vec<CodeUnit>,
    /// Manifest entries that could not be read or parsed.
    pub skipped: Vec<String>,
}

/// Every eligible unit of a manifest: readable, parseable files matching the
/// filters, units with at least `min_loc` lines that re-parse on their own.
pub fn population(manifest: &CorpusManifest, config: &SampleConfig) -> Population {
    let mut pop = Population::default();
    for entry in &manifest.entries {
        if config.filters.iter().any(|(k, v)| entry.metadata.get(k) != Some(v)) {
            continue;
        }
        let language = entry
            .language
            .as_deref()
            .and_then(|l| l.parse().ok())
            .or_else(|| entry.path.rsplit('.').next().and_then(Language::from_extension));
        let Some(language) = language else { continue };
        if config.language.is_some_and(|l| l != language) {
            continue;
        }
        let text = match manifest.read(entry) {
            Ok(text) => text,
            Err(err) => {
                warn!("skipping {}: {err}", entry.path);
                pop.skipped.push(entry.path.clone());
                continue;
            }
        };
        let mut file = SourceFile::new(entry.path.clone(), language, text);
        file.metadata = entry.metadata.clone();
        match extract_units(&file, config.granularity) {
            Ok(units) => pop.units.extend(
                units
                    .into_iter()
                    .filter(|u| u.loc >= config.min_loc && reparses(&u.text, u.language)),
            ),
            Err(err) => {
                warn!("skipping {}: {err}", entry.path);
                pop.skipped.push(entry.path.clone());
            }
        }
    }
    pop
}

/// Seeded sample of `config.n` units, stratified when requested. The result
/// is sorted by unit id.
pub fn sample_units(units: Vec<CodeUnit>, config: &SampleConfig) -> Result<Vec<CodeUnit>, SampleError> {
    if units.len() < config.n {
        return Err(SampleError::PopulationTooSmall { population: units.len(), requested: config.n });
    }
    let mut strata: BTreeMap<String, Vec<CodeUnit>> = BTreeMap::new();
    for unit in units {
        let key = match &config.stratify_by {
            Some(k) => unit.metadata.get(k).cloned().unwrap_or_default(),
            None => String::new(),
        };
        strata.entry(key).or_default().push(unit);
    }
    let sizes: Vec<usize> = strata.values().map(Vec::len).collect();
    let alloc = allocate(&sizes, config.n);
    let mut out = Vec::with_capacity(config.n);
    for ((key, mut members), take) in strata.into_iter().zip(alloc) {
        if members.len() < take {
            return Err(SampleError::StratumTooSmall { stratum: key, available: members.len(), allocated: take });
        }
        members.sort_by(|a, b| a.id.cmp(&b.id));
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, &key));
        members.shuffle(&mut rng);
        members.truncate(take);
        out.extend(members);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}
